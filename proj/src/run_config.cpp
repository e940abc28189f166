#include "tclf/run_config.hpp"

#include <fstream>

#include "json_util.hpp"

namespace tclf::io {

namespace {

void parse_model(const json& obj, const std::string& ctx, thermal::ThermalModel& model) {
  check_keys(obj, ctx, {"A", "B", "E", "x0"});
  const auto read_row = [&](const json& arr, const std::string& rctx, auto& row) {
    if (!arr.is_array() || arr.size() != row.size())
      throw ParseError(rctx + ": expected " + std::to_string(row.size()) + " numbers");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!arr[c].is_number()) throw ParseError(rctx + ": non-numeric entry");
      row[c] = arr[c].get<double>();
    }
  };
  if (obj.contains("A")) {
    const json& a = obj.at("A");
    if (!a.is_array() || a.size() != 4) throw ParseError(ctx + ".A: expected 4 rows");
    for (std::size_t r = 0; r < 4; ++r)
      read_row(a[r], ctx + ".A[" + std::to_string(r) + "]", model.A[r]);
  }
  if (obj.contains("B")) read_row(obj.at("B"), ctx + ".B", model.B);
  if (obj.contains("E")) {
    const json& e = obj.at("E");
    if (!e.is_array() || e.size() != 4) throw ParseError(ctx + ".E: expected 4 rows");
    for (std::size_t r = 0; r < 4; ++r)
      read_row(e[r], ctx + ".E[" + std::to_string(r) + "]", model.E[r]);
  }
  if (obj.contains("x0")) read_row(obj.at("x0"), ctx + ".x0", model.x0);
}

void parse_sim(const json& obj, const std::string& ctx, RunConfig::Sim& sim) {
  check_keys(obj, ctx,
             {"dt", "duration_days", "avg_window_s", "relay", "disturbance", "model"});
  sim.dt = get_num(obj, ctx, "dt", sim.dt);
  sim.duration_days = get_num(obj, ctx, "duration_days", sim.duration_days);
  sim.avg_window_s = get_num(obj, ctx, "avg_window_s", sim.avg_window_s);

  if (obj.contains("relay")) {
    const json& r = obj.at("relay");
    const std::string rctx = ctx + ".relay";
    check_keys(r, rctx, {"setpoint", "tolerance", "on_power", "ramp_rate"});
    sim.relay.setpoint = get_num(r, rctx, "setpoint", sim.relay.setpoint);
    sim.relay.tolerance = get_num(r, rctx, "tolerance", sim.relay.tolerance);
    sim.relay.on_power = get_num(r, rctx, "on_power", sim.relay.on_power);
    sim.relay.ramp_rate = get_num(r, rctx, "ramp_rate", sim.relay.ramp_rate);
  }
  if (obj.contains("disturbance")) {
    const json& d = obj.at("disturbance");
    const std::string dctx = ctx + ".disturbance";
    check_keys(d, dctx,
               {"t_ext_mean", "t_ext_amplitude", "t_ext_noise_sd", "noise_knot_s",
                "q_min", "q_max", "q_dwell_s", "solar_peak", "sunrise_hour",
                "sunset_hour"});
    auto& dist = sim.disturbance;
    dist.t_ext_mean = get_num(d, dctx, "t_ext_mean", dist.t_ext_mean);
    dist.t_ext_amplitude = get_num(d, dctx, "t_ext_amplitude", dist.t_ext_amplitude);
    dist.t_ext_noise_sd = get_num(d, dctx, "t_ext_noise_sd", dist.t_ext_noise_sd);
    dist.noise_knot_s = get_num(d, dctx, "noise_knot_s", dist.noise_knot_s);
    dist.q_min = get_num(d, dctx, "q_min", dist.q_min);
    dist.q_max = get_num(d, dctx, "q_max", dist.q_max);
    dist.q_dwell_s = get_num(d, dctx, "q_dwell_s", dist.q_dwell_s);
    dist.solar_peak = get_num(d, dctx, "solar_peak", dist.solar_peak);
    dist.sunrise_hour = get_num(d, dctx, "sunrise_hour", dist.sunrise_hour);
    dist.sunset_hour = get_num(d, dctx, "sunset_hour", dist.sunset_hour);
  }
  if (obj.contains("model")) parse_model(obj.at("model"), ctx + ".model", sim.model);
}

void parse_train(const json& obj, const std::string& ctx, RunConfig::Train& train) {
  check_keys(obj, ctx,
             {"epochs", "learning_rate", "beta1", "beta2", "epsilon", "clip_norm",
              "seed", "hidden", "train_days"});
  train.cfg.epochs = static_cast<int>(get_int(obj, ctx, "epochs", train.cfg.epochs));
  train.cfg.learning_rate = get_num(obj, ctx, "learning_rate", train.cfg.learning_rate);
  train.cfg.beta1 = get_num(obj, ctx, "beta1", train.cfg.beta1);
  train.cfg.beta2 = get_num(obj, ctx, "beta2", train.cfg.beta2);
  train.cfg.epsilon = get_num(obj, ctx, "epsilon", train.cfg.epsilon);
  train.cfg.clip_norm = get_num(obj, ctx, "clip_norm", train.cfg.clip_norm);
  if (obj.contains("seed")) {
    train.cfg.seed = get_uint(obj, ctx, "seed", 0);
    train.seed_set = true;
  }
  const auto hidden = get_int(obj, ctx, "hidden", static_cast<std::int64_t>(train.hidden));
  if (hidden < 1) throw ParseError(ctx + ".hidden: must be >= 1");
  train.hidden = static_cast<std::size_t>(hidden);
  train.train_days = get_num(obj, ctx, "train_days", train.train_days);
}

void parse_forecast(const json& obj, const std::string& ctx, RunConfig::Forecast& fc) {
  check_keys(obj, ctx, {"mode", "horizon"});
  const std::string mode = get_str(obj, ctx, "mode", "closed");
  if (mode == "closed")
    fc.mode = forecast::Mode::ClosedLoop;
  else if (mode == "onestep")
    fc.mode = forecast::Mode::OneStep;
  else
    throw ParseError(ctx + ".mode: expected 'closed' or 'onestep', got '" + mode + "'");
  const auto horizon = get_int(obj, ctx, "horizon", static_cast<std::int64_t>(fc.horizon));
  if (horizon < 0) throw ParseError(ctx + ".horizon: must be >= 0");
  fc.horizon = static_cast<std::size_t>(horizon);
}

void parse_io(const json& obj, const std::string& ctx, RunConfig::Io& io) {
  check_keys(obj, ctx,
             {"seed", "trace_path", "load_path", "model_path", "forecast_path",
              "data_path"});
  io.seed = get_uint(obj, ctx, "seed", io.seed);
  io.trace_path = get_str(obj, ctx, "trace_path", io.trace_path);
  io.load_path = get_str(obj, ctx, "load_path", io.load_path);
  io.model_path = get_str(obj, ctx, "model_path", io.model_path);
  io.forecast_path = get_str(obj, ctx, "forecast_path", io.forecast_path);
  io.data_path = get_str(obj, ctx, "data_path", io.data_path);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }

  RunConfig cfg;
  check_keys(doc, path, {"sim", "train", "forecast", "io"});
  if (doc.contains("sim")) parse_sim(doc.at("sim"), path + ".sim", cfg.sim);
  if (doc.contains("train")) parse_train(doc.at("train"), path + ".train", cfg.train);
  if (doc.contains("forecast"))
    parse_forecast(doc.at("forecast"), path + ".forecast", cfg.forecast);
  if (doc.contains("io")) parse_io(doc.at("io"), path + ".io", cfg.io);

  cfg.sim.model.validate();
  cfg.sim.relay.validate();
  cfg.sim.disturbance.validate();
  if (!(cfg.sim.dt > 0.0)) throw ParseError(path + ".sim.dt: must be > 0");
  if (!(cfg.sim.duration_days > 0.0))
    throw ParseError(path + ".sim.duration_days: must be > 0");
  if (!(cfg.sim.avg_window_s > 0.0))
    throw ParseError(path + ".sim.avg_window_s: must be > 0");
  if (!(cfg.train.train_days > 0.0)) throw ParseError(path + ".train.train_days: must be > 0");
  cfg.train.cfg.validate();
  return cfg;
}

}  // namespace tclf::io
