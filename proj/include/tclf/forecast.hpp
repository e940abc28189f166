#pragma once

#include <string>
#include <vector>

#include "tclf/linalg.hpp"
#include "tclf/lstm.hpp"

namespace tclf::forecast {

enum class Mode { ClosedLoop, OneStep };

std::string mode_name(Mode mode);  // "closed_loop" / "one_step"

struct Standardized {
  Vec z;
  double mu = 0.0;
  double sigma = 1.0;
};

/// z = (x - mu) / sigma with the arithmetic mean and the n-1 sample
/// standard deviation. A constant series raises ConstantSeriesError.
Standardized standardize(const Vec& series);

/// Elementwise z * sigma + mu.
Vec destandardize(const Vec& z, double mu, double sigma);

/// Warms the LSTM state over the full history (standardized with the
/// network's stored statistics), then rolls out `horizon` steps feeding each
/// prediction back as the next input. Returns original-unit predictions.
Vec forecast_closed_loop(const lstm::LstmNetwork& net, const Vec& history,
                         std::size_t horizon);

/// Warm-up as above; at step k the current prediction is emitted, then the
/// state advances on the observed value. predictions[k] forecasts
/// observations[k].
Vec forecast_one_step(const lstm::LstmNetwork& net, const Vec& history,
                      const Vec& observations);

/// Root of the mean squared difference.
double rmse(const Vec& preds, const Vec& obs);

struct ForecastResult {
  Mode mode = Mode::ClosedLoop;
  double step_s = 0.0;
  Vec predictions;   // original units
  Vec observations;  // original units, same length as predictions
  double rmse_value = 0.0;
};

/// Pairs predictions with observations (truncating both to the overlap) and
/// computes the RMSE. The overlap must be non-empty.
ForecastResult evaluate_forecast(Mode mode, double step_s, const Vec& preds,
                                 const Vec& obs);

}  // namespace tclf::forecast
