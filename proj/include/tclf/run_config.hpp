#pragma once

#include <cstdint>
#include <string>

#include "tclf/forecast.hpp"
#include "tclf/lstm.hpp"
#include "tclf/thermal.hpp"

namespace tclf::io {

/// Pipeline configuration. Defaults match the reference operating point
/// (21 degC setpoint, 1 degC tolerance, 4000 W heater, 100 W/s ramp,
/// 100 s averaging window, 200 hidden units), so a config file only needs
/// to name what it changes. Unknown keys are rejected.
struct RunConfig {
  struct Sim {
    thermal::ThermalModel model = thermal::ThermalModel::house_defaults();
    thermal::RelayConfig relay;
    thermal::DisturbanceConfig disturbance;
    double dt = 1.0;             // s
    double duration_days = 7.0;
    double avg_window_s = 100.0;
  } sim;

  struct Train {
    lstm::TrainingConfig cfg;  // cfg.seed falls back to io.seed unless set
    bool seed_set = false;
    std::size_t hidden = 200;
    double train_days = 6.0;
  } train;

  struct Forecast {
    forecast::Mode mode = forecast::Mode::ClosedLoop;
    std::size_t horizon = 0;  // 0 = one prediction per held-out observation
  } forecast;

  struct Io {
    std::uint64_t seed = 42;
    std::string trace_path;
    std::string load_path;
    std::string model_path;
    std::string forecast_path;
    std::string data_path;
  } io;

  /// Training seed: explicit train.seed if given, otherwise io.seed.
  std::uint64_t training_seed() const {
    return train.seed_set ? train.cfg.seed : io.seed;
  }
};

/// Strict loader; every unknown key anywhere in the document is an error.
RunConfig load_run_config(const std::string& path);

}  // namespace tclf::io
