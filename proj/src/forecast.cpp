#include "tclf/forecast.hpp"

#include <cmath>
#include <stdexcept>

#include "tclf/errors.hpp"

namespace tclf::forecast {

namespace {

// Both forecasting modes and the final output route through these two
// helpers so that feeding a forecast back in is bit-identical to feeding the
// same value in as an observation.
double to_raw(double z, const lstm::LstmNetwork& net) { return z * net.sigma + net.mu; }
double to_std(double x, const lstm::LstmNetwork& net) { return (x - net.mu) / net.sigma; }

// Runs the network over the history and returns its final output, i.e. the
// first prediction.
double warm_up(lstm::CellStepper& stepper, const lstm::LstmNetwork& net,
               const Vec& history, lstm::LstmState& state) {
  if (history.empty())
    throw std::invalid_argument("forecast: history must be non-empty");
  double last = 0.0;
  for (double x : history) last = stepper.step(to_std(x, net), state);
  return last;
}

}  // namespace

std::string mode_name(Mode mode) {
  return mode == Mode::ClosedLoop ? "closed_loop" : "one_step";
}

Standardized standardize(const Vec& series) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("standardize: need at least 2 samples");
  double mean = 0.0;
  for (double v : series) {
    if (!std::isfinite(v)) throw std::invalid_argument("standardize: non-finite sample");
    mean += v;
  }
  mean /= static_cast<double>(n);

  double sq = 0.0;
  for (double v : series) sq += (v - mean) * (v - mean);
  const double sigma = std::sqrt(sq / static_cast<double>(n - 1));
  if (!(sigma > 0.0))
    throw ConstantSeriesError("standardize: series is constant (sigma = 0)");

  Standardized out;
  out.mu = mean;
  out.sigma = sigma;
  out.z.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.z[k] = (series[k] - mean) / sigma;
  return out;
}

Vec destandardize(const Vec& z, double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("destandardize: sigma must be > 0");
  Vec out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = z[k] * sigma + mu;
  return out;
}

Vec forecast_closed_loop(const lstm::LstmNetwork& net, const Vec& history,
                         std::size_t horizon) {
  if (!(net.sigma > 0.0))
    throw std::invalid_argument("forecast_closed_loop: network sigma must be > 0");
  lstm::CellStepper stepper(net);
  lstm::LstmState state = lstm::zero_state(net.hidden_size());
  double last = warm_up(stepper, net, history, state);

  Vec preds;
  preds.reserve(horizon);
  for (std::size_t j = 0; j < horizon; ++j) {
    const double raw = to_raw(last, net);
    preds.push_back(raw);
    if (j + 1 < horizon) last = stepper.step(to_std(raw, net), state);
  }
  return preds;
}

Vec forecast_one_step(const lstm::LstmNetwork& net, const Vec& history,
                      const Vec& observations) {
  if (!(net.sigma > 0.0))
    throw std::invalid_argument("forecast_one_step: network sigma must be > 0");
  if (observations.empty())
    throw std::invalid_argument("forecast_one_step: observations must be non-empty");
  lstm::CellStepper stepper(net);
  lstm::LstmState state = lstm::zero_state(net.hidden_size());
  double last = warm_up(stepper, net, history, state);

  Vec preds(observations.size());
  for (std::size_t k = 0; k < observations.size(); ++k) {
    preds[k] = to_raw(last, net);
    if (k + 1 < observations.size())
      last = stepper.step(to_std(observations[k], net), state);
  }
  return preds;
}

double rmse(const Vec& preds, const Vec& obs) {
  if (preds.size() != obs.size())
    throw std::invalid_argument("rmse: length mismatch (" +
                                std::to_string(preds.size()) + " vs " +
                                std::to_string(obs.size()) + ")");
  if (preds.empty()) throw std::invalid_argument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const double e = preds[k] - obs[k];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(preds.size()));
}

ForecastResult evaluate_forecast(Mode mode, double step_s, const Vec& preds,
                                 const Vec& obs) {
  const std::size_t overlap = std::min(preds.size(), obs.size());
  if (overlap == 0)
    throw std::invalid_argument("evaluate_forecast: no overlapping samples");
  ForecastResult result;
  result.mode = mode;
  result.step_s = step_s;
  result.predictions.assign(preds.begin(), preds.begin() + static_cast<std::ptrdiff_t>(overlap));
  result.observations.assign(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(overlap));
  result.rmse_value = rmse(result.predictions, result.observations);
  return result;
}

}  // namespace tclf::forecast
