#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tclf/thermal.hpp"
#include "tclf/time_series.hpp"

namespace tclf::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict `t,value` reader: constant spacing (1e-6 relative), strictly
/// increasing t, finite values. Parse errors name the 1-based data row.
TimeSeries read_series_csv(const std::string& path);

/// Inverse of read_series_csv; lossless for 64-bit values.
void write_series_csv(const TimeSeries& series, const std::string& path);

/// Reads the prediction column from either a `t,value` file or a
/// `t,prediction[,observation]` forecast export.
TimeSeries read_prediction_csv(const std::string& path);

/// Full trace export: `t,indoor_temp,heater_power,relay,t_ext,q_other,solar`
/// with relay as 0/1.
void write_trace_csv(const thermal::SimulationTrace& trace, const std::string& path);

/// Forecast export: `t,prediction,observation`; observation cells beyond the
/// available data stay empty.
void write_forecast_csv(double step_s, double start_s,
                        const std::vector<double>& predictions,
                        const std::vector<double>& observations,
                        const std::string& path);

struct SplitSeries {
  TimeSeries train;
  TimeSeries test;
};

/// Prefix/suffix split; the test start continues the time axis. Counts must
/// sum to the series length and both be >= 1.
SplitSeries split_series(const TimeSeries& series, std::size_t train_count,
                         std::size_t test_count);

/// Hourly stand-in for a metered aggregate-load year: base level, daily
/// sinusoid with a second harmonic, weekly modulation, Gaussian noise.
struct SynthLoadConfig {
  double base = 1.0;
  double daily_amplitude = 0.3;
  double second_harmonic = 0.1;
  double weekly_amplitude = 0.08;
  double noise_sd = 0.01;
  void validate() const;
};

TimeSeries synth_load_series(const SynthLoadConfig& cfg, std::uint64_t seed, int days);

/// Standalone SVG line chart: one polyline per series, axis ticks, legend.
/// Byte-deterministic for identical inputs.
void emit_plot_svg(const std::vector<TimeSeries>& series,
                   const std::vector<std::string>& labels,
                   const std::string& path);

}  // namespace tclf::io
