#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tclf/time_series.hpp"

namespace tclf::thermal {

using State = std::array<double, 4>;

/// Four-state linear house model, x' = A x + B u + E d with indoor
/// temperature T = C x. States are the floor, internal facade, external
/// facade and indoor air temperatures (degC); u is heater power (W); d is
/// the disturbance vector (external temperature, internal gains, solar).
struct ThermalModel {
  std::array<std::array<double, 4>, 4> A{};  // 1/s
  std::array<double, 4> B{};                 // degC/(s W)
  std::array<std::array<double, 3>, 4> E{};  // per disturbance channel
  std::array<double, 4> C{};                 // output selector, fixed [0 0 0 1]
  State x0{};                                // degC

  /// Default residential parameters.
  static ThermalModel house_defaults();

  /// Shape/sign invariants: C = [0 0 0 1], diag(A) < 0, everything finite.
  void validate() const;
};

struct DisturbanceSample {
  double t_ext = 0.0;    // external temperature, degC
  double q_other = 0.0;  // occupants/appliances, W
  double solar = 0.0;    // solar radiation, W-equivalent
};

enum class RelayCommand : std::uint8_t { Off = 0, On = 1 };

struct RelayConfig {
  double setpoint = 21.0;    // degC
  double tolerance = 1.0;    // degC, half-width of the hold band
  double on_power = 4000.0;  // W
  double ramp_rate = 100.0;  // W/s
  void validate() const;
};

/// Time-aligned record of one closed-loop run; all channels share the index.
struct SimulationTrace {
  double dt = 1.0;  // s
  std::vector<double> times;
  std::vector<double> indoor_temp;
  std::vector<double> heater_power;
  std::vector<RelayCommand> relay;
  std::vector<DisturbanceSample> disturbances;

  std::size_t size() const { return times.size(); }
};

/// One forward-Euler step: x + dt * (A x + B u + E d).
/// Rejects non-finite inputs and dt <= 0 with std::domain_error.
State step_state(const ThermalModel& model, const State& x, double heater_w,
                 const DisturbanceSample& d, double dt);

/// Heating hysteresis: ON below setpoint - tolerance, OFF above
/// setpoint + tolerance, previous command held inside the closed band.
RelayCommand relay_command(double indoor_temp, const RelayConfig& cfg,
                           RelayCommand prev);

/// Slew-limited heater: moves toward the commanded target by at most
/// ramp_rate * dt, clamped to [0, on_power].
double heater_step(double current_w, RelayCommand cmd, const RelayConfig& cfg,
                   double dt);

/// Synthetic winter weather/occupancy. t_ext is a diurnal sinusoid plus
/// clipped, knot-interpolated noise; q_other is piecewise-constant in
/// [q_min, q_max]; solar is a half-sine over the daylight window.
struct DisturbanceConfig {
  double t_ext_mean = -6.0;       // degC
  double t_ext_amplitude = 4.0;   // degC, diurnal swing
  double t_ext_noise_sd = 1.0;    // degC, knot noise, clipped to +-3 sd
  double noise_knot_s = 600.0;    // spacing of noise knots
  double q_min = 0.0;             // W
  double q_max = 1000.0;          // W
  double q_dwell_s = 3600.0;      // occupancy level hold time
  double solar_peak = 500.0;      // W at midday, 0 disables
  double sunrise_hour = 8.0;
  double sunset_hour = 16.0;
  void validate() const;
};

/// Deterministic given (cfg, seed). duration_s must be a multiple of dt.
std::vector<DisturbanceSample> generate_disturbances(const DisturbanceConfig& cfg,
                                                     std::uint64_t seed,
                                                     double duration_s, double dt);

/// Closed-loop run: per step reads T = C x, updates the relay (initially
/// OFF), slews the heater (initially 0 W), then integrates the state.
SimulationTrace simulate(const ThermalModel& model, const RelayConfig& cfg,
                         std::span<const DisturbanceSample> disturbances,
                         double dt);

/// Mean heater power per window. window_s must be a multiple of trace.dt
/// and the trace length a multiple of window_s / dt.
TimeSeries average_power(const SimulationTrace& trace, double window_s);

}  // namespace tclf::thermal
