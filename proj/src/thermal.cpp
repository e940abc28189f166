#include "tclf/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tclf/linalg.hpp"

namespace tclf::thermal {

namespace {

bool finite(const State& x) {
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]) &&
         std::isfinite(x[3]);
}

bool finite(const DisturbanceSample& d) {
  return std::isfinite(d.t_ext) && std::isfinite(d.q_other) && std::isfinite(d.solar);
}

}  // namespace

ThermalModel ThermalModel::house_defaults() {
  ThermalModel m;
  m.A = {{{-0.020e-3, 0.0, 0.0, 0.020e-3},
          {0.0, -0.020e-3, 0.001e-3, 0.020e-3},
          {0.0, 0.001e-3, -0.056e-3, 0.0},
          {1.234e-3, 2.987e-3, 0.0, -4.548e-3}}};
  m.B = {0.0, 0.0, 0.0, 0.003e-3};
  m.E = {{{0.0, 0.0, 0.0},
          {0.0, 0.0, 0.0},
          {0.055e-3, 0.0, 0.0},
          {0.327e-3, 0.003e-3, 0.001e-3}}};
  m.C = {0.0, 0.0, 0.0, 1.0};
  m.x0 = {21.0, 21.0, 21.0, 21.0};
  return m;
}

void ThermalModel::validate() const {
  for (int r = 0; r < 4; ++r) {
    if (!(A[r][r] < 0.0))
      throw std::invalid_argument("ThermalModel: A diagonal must be strictly negative");
    for (int c = 0; c < 4; ++c)
      if (!std::isfinite(A[r][c]))
        throw std::invalid_argument("ThermalModel: non-finite A entry");
    if (!std::isfinite(B[r]))
      throw std::invalid_argument("ThermalModel: non-finite B entry");
    for (int c = 0; c < 3; ++c)
      if (!std::isfinite(E[r][c]))
        throw std::invalid_argument("ThermalModel: non-finite E entry");
    if (!std::isfinite(x0[r]))
      throw std::invalid_argument("ThermalModel: non-finite initial state");
  }
  if (C != std::array<double, 4>{0.0, 0.0, 0.0, 1.0})
    throw std::invalid_argument("ThermalModel: C must be [0 0 0 1]");
}

void RelayConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("RelayConfig: tolerance must be > 0");
  if (!(on_power > 0.0)) throw std::invalid_argument("RelayConfig: on_power must be > 0");
  if (!(ramp_rate > 0.0)) throw std::invalid_argument("RelayConfig: ramp_rate must be > 0");
  if (!std::isfinite(setpoint)) throw std::invalid_argument("RelayConfig: non-finite setpoint");
}

State step_state(const ThermalModel& model, const State& x, double heater_w,
                 const DisturbanceSample& d, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::domain_error("step_state: dt must be finite and > 0");
  if (!finite(x) || !std::isfinite(heater_w) || !finite(d))
    throw std::domain_error("step_state: non-finite input");

  State next{};
  for (int r = 0; r < 4; ++r) {
    double deriv = model.B[r] * heater_w;
    for (int c = 0; c < 4; ++c) deriv += model.A[r][c] * x[c];
    deriv += model.E[r][0] * d.t_ext + model.E[r][1] * d.q_other + model.E[r][2] * d.solar;
    next[r] = x[r] + dt * deriv;
  }
  return next;
}

RelayCommand relay_command(double indoor_temp, const RelayConfig& cfg,
                           RelayCommand prev) {
  if (!std::isfinite(indoor_temp))
    throw std::domain_error("relay_command: non-finite temperature");
  if (indoor_temp < cfg.setpoint - cfg.tolerance) return RelayCommand::On;
  if (indoor_temp > cfg.setpoint + cfg.tolerance) return RelayCommand::Off;
  return prev;  // hold inside the closed band
}

double heater_step(double current_w, RelayCommand cmd, const RelayConfig& cfg,
                   double dt) {
  if (!(dt > 0.0)) throw std::domain_error("heater_step: dt must be > 0");
  const double target = cmd == RelayCommand::On ? cfg.on_power : 0.0;
  const double max_delta = cfg.ramp_rate * dt;
  const double delta = std::clamp(target - current_w, -max_delta, max_delta);
  return std::clamp(current_w + delta, 0.0, cfg.on_power);
}

void DisturbanceConfig::validate() const {
  if (!(t_ext_amplitude >= 0.0))
    throw std::invalid_argument("DisturbanceConfig: t_ext_amplitude must be >= 0");
  if (!(t_ext_noise_sd >= 0.0))
    throw std::invalid_argument("DisturbanceConfig: t_ext_noise_sd must be >= 0");
  if (!(noise_knot_s > 0.0))
    throw std::invalid_argument("DisturbanceConfig: noise_knot_s must be > 0");
  if (!(q_min >= 0.0) || !(q_max >= q_min))
    throw std::invalid_argument("DisturbanceConfig: need 0 <= q_min <= q_max");
  if (!(q_dwell_s > 0.0))
    throw std::invalid_argument("DisturbanceConfig: q_dwell_s must be > 0");
  if (!(solar_peak >= 0.0))
    throw std::invalid_argument("DisturbanceConfig: solar_peak must be >= 0");
  if (!(sunrise_hour >= 0.0) || !(sunset_hour <= 24.0) || !(sunrise_hour < sunset_hour))
    throw std::invalid_argument("DisturbanceConfig: need 0 <= sunrise < sunset <= 24");
  if (!std::isfinite(t_ext_mean))
    throw std::invalid_argument("DisturbanceConfig: non-finite t_ext_mean");
}

std::vector<DisturbanceSample> generate_disturbances(const DisturbanceConfig& cfg,
                                                     std::uint64_t seed,
                                                     double duration_s, double dt) {
  cfg.validate();
  if (!(duration_s > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("generate_disturbances: duration and dt must be > 0");
  const double steps = duration_s / dt;
  const auto n = static_cast<std::size_t>(std::llround(steps));
  if (n == 0 || std::abs(steps - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument("generate_disturbances: duration must be a multiple of dt");

  // Independent streams per channel so one channel's settings cannot shift
  // another channel's draws.
  Rng noise_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Rng q_rng(seed ^ 0xd1b54a32d192ed03ULL);

  const std::size_t n_knots =
      static_cast<std::size_t>(duration_s / cfg.noise_knot_s) + 2;
  Vec knots(n_knots);
  const double bound = 3.0 * cfg.t_ext_noise_sd;
  for (auto& k : knots)
    k = std::clamp(noise_rng.normal() * cfg.t_ext_noise_sd, -bound, bound);

  const std::size_t n_levels =
      static_cast<std::size_t>(duration_s / cfg.q_dwell_s) + 1;
  Vec levels(n_levels);
  for (auto& l : levels) l = q_rng.uniform(cfg.q_min, cfg.q_max);

  const double two_pi = 2.0 * std::numbers::pi;
  const double day_s = 86400.0;
  std::vector<DisturbanceSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;

    // diurnal sinusoid, coldest at midnight, plus interpolated noise
    const double knot_pos = t / cfg.noise_knot_s;
    const auto j = static_cast<std::size_t>(knot_pos);
    const double frac = knot_pos - static_cast<double>(j);
    const double noise = (1.0 - frac) * knots[j] + frac * knots[j + 1];
    const double t_ext = cfg.t_ext_mean -
                         cfg.t_ext_amplitude * std::cos(two_pi * t / day_s) + noise;

    const auto level = static_cast<std::size_t>(t / cfg.q_dwell_s);
    const double q = levels[level];

    const double hour = std::fmod(t, day_s) / 3600.0;
    double solar = 0.0;
    if (hour >= cfg.sunrise_hour && hour < cfg.sunset_hour) {
      const double phase = (hour - cfg.sunrise_hour) / (cfg.sunset_hour - cfg.sunrise_hour);
      solar = cfg.solar_peak * std::sin(std::numbers::pi * phase);
    }

    out[k] = DisturbanceSample{t_ext, q, solar};
  }
  return out;
}

SimulationTrace simulate(const ThermalModel& model, const RelayConfig& cfg,
                         std::span<const DisturbanceSample> disturbances,
                         double dt) {
  model.validate();
  cfg.validate();
  if (disturbances.empty())
    throw std::invalid_argument("simulate: disturbance series is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");

  const std::size_t n = disturbances.size();
  SimulationTrace trace;
  trace.dt = dt;
  trace.times.reserve(n);
  trace.indoor_temp.reserve(n);
  trace.heater_power.reserve(n);
  trace.relay.reserve(n);
  trace.disturbances.assign(disturbances.begin(), disturbances.end());

  State x = model.x0;
  RelayCommand prev = RelayCommand::Off;
  double power = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double temp = model.C[0] * x[0] + model.C[1] * x[1] +
                        model.C[2] * x[2] + model.C[3] * x[3];
    const RelayCommand cmd = relay_command(temp, cfg, prev);
    power = heater_step(power, cmd, cfg, dt);

    trace.times.push_back(static_cast<double>(k) * dt);
    trace.indoor_temp.push_back(temp);
    trace.heater_power.push_back(power);
    trace.relay.push_back(cmd);

    x = step_state(model, x, power, disturbances[k], dt);
    prev = cmd;
  }
  return trace;
}

TimeSeries average_power(const SimulationTrace& trace, double window_s) {
  if (!(window_s > 0.0)) throw std::invalid_argument("average_power: window must be > 0");
  const double per_window = window_s / trace.dt;
  const auto m = static_cast<std::size_t>(std::llround(per_window));
  if (m == 0 || std::abs(per_window - static_cast<double>(m)) > 1e-9)
    throw std::invalid_argument("average_power: window must be a multiple of dt");
  if (trace.size() == 0 || trace.size() % m != 0)
    throw std::invalid_argument(
        "average_power: trace length must be a multiple of window/dt (got " +
        std::to_string(trace.size()) + " samples, window of " + std::to_string(m) + ")");

  TimeSeries out;
  out.step_s = window_s;
  out.start_s = 0.0;
  out.values.reserve(trace.size() / m);
  for (std::size_t w = 0; w < trace.size(); w += m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += trace.heater_power[w + k];
    out.values.push_back(acc / static_cast<double>(m));
  }
  return out;
}

}  // namespace tclf::thermal
