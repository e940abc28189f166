#include "tclf/cli.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tclf/data_io.hpp"
#include "tclf/errors.hpp"
#include "tclf/forecast.hpp"
#include "tclf/lstm.hpp"
#include "tclf/model_json.hpp"
#include "tclf/run_config.hpp"
#include "tclf/thermal.hpp"

namespace tclf::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::size_t days_to_samples(double days, double step_s, const std::string& what) {
  const double exact = days * 86400.0 / step_s;
  const auto n = static_cast<std::size_t>(std::llround(exact));
  if (n < 1 || std::abs(exact - static_cast<double>(n)) > 1e-9 * std::max(1.0, exact))
    throw std::invalid_argument(what + ": " + io::format_double(days) +
                                " days is not a whole number of " +
                                io::format_double(step_s) + " s samples");
  return n;
}

struct SimulateArgs {
  std::string config, out, avg_out, plot;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_simulate(const SimulateArgs& args) {
  io::RunConfig cfg;
  if (!args.config.empty()) cfg = io::load_run_config(args.config);
  if (args.seed_set) cfg.io.seed = args.seed;
  const std::string out = args.out.empty() ? cfg.io.trace_path : args.out;
  if (out.empty()) {
    std::cerr << "simulate: --out (or io.trace_path in the config) is required\n";
    return kExitUsage;
  }
  const std::string avg_out = args.avg_out.empty() ? cfg.io.load_path : args.avg_out;

  const double duration_s = cfg.sim.duration_days * 86400.0;
  const auto disturbances = thermal::generate_disturbances(
      cfg.sim.disturbance, cfg.io.seed, duration_s, cfg.sim.dt);
  const auto trace =
      thermal::simulate(cfg.sim.model, cfg.sim.relay, disturbances, cfg.sim.dt);
  io::write_trace_csv(trace, out);

  if (!avg_out.empty() || !args.plot.empty()) {
    const TimeSeries avg = thermal::average_power(trace, cfg.sim.avg_window_s);
    if (!avg_out.empty()) io::write_series_csv(avg, avg_out);
    if (!args.plot.empty()) io::emit_plot_svg({avg}, {"average heater power (W)"}, args.plot);
  }
  return kExitOk;
}

struct GenDataArgs {
  int days = 365;
  std::uint64_t seed = 42;
  std::string out, plot;
  io::SynthLoadConfig cfg;
};

int cmd_gen_data(const GenDataArgs& args) {
  const TimeSeries series = io::synth_load_series(args.cfg, args.seed, args.days);
  io::write_series_csv(series, args.out);
  if (!args.plot.empty()) io::emit_plot_svg({series}, {"load"}, args.plot);
  return kExitOk;
}

struct TrainArgs {
  std::string config, data, model_out;
  double train_days = -1.0;  // <0: use config
  std::int64_t hidden = -1;
  std::int64_t epochs = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_train(const TrainArgs& args) {
  io::RunConfig cfg;
  if (!args.config.empty()) cfg = io::load_run_config(args.config);
  const std::string data = args.data.empty() ? cfg.io.data_path : args.data;
  const std::string model_out = args.model_out.empty() ? cfg.io.model_path : args.model_out;
  if (data.empty() || model_out.empty()) {
    std::cerr << "train: --data and --model (or io.data_path/io.model_path) are required\n";
    return kExitUsage;
  }

  lstm::TrainingConfig tcfg = cfg.train.cfg;
  tcfg.seed = args.seed_set ? args.seed : cfg.training_seed();
  if (args.epochs > 0) tcfg.epochs = static_cast<int>(args.epochs);
  const std::size_t hidden =
      args.hidden > 0 ? static_cast<std::size_t>(args.hidden) : cfg.train.hidden;
  const double train_days = args.train_days > 0.0 ? args.train_days : cfg.train.train_days;

  const TimeSeries series = io::read_series_csv(data);
  const std::size_t n_train = days_to_samples(train_days, series.step_s, "train");
  if (n_train > series.size())
    throw std::invalid_argument("train: " + io::format_double(train_days) +
                                " training days need " + std::to_string(n_train) +
                                " samples but '" + data + "' has " +
                                std::to_string(series.size()));

  Vec train_values(series.values.begin(),
                   series.values.begin() + static_cast<std::ptrdiff_t>(n_train));
  const auto std_series = forecast::standardize(train_values);

  std::cerr << "training on " << n_train << " samples (" << hidden << " hidden units, "
            << tcfg.epochs << " epochs, seed " << tcfg.seed << ")\n";
  lstm::TrainResult result = lstm::train(std_series.z, tcfg, hidden);
  result.net.mu = std_series.mu;
  result.net.sigma = std_series.sigma;
  std::cerr << "loss " << result.loss_history.front() << " -> "
            << result.loss_history.back() << "\n";

  io::SavedModel saved;
  saved.net = std::move(result.net);
  saved.training = tcfg;
  saved.hidden = hidden;
  saved.train_count = n_train;
  saved.step_s = series.step_s;
  io::save_model_json(saved, model_out);
  return kExitOk;
}

struct ForecastArgs {
  std::string config, model, data, out, plot, mode;
  std::int64_t horizon = -1;
};

int cmd_forecast(const ForecastArgs& args) {
  io::RunConfig cfg;
  if (!args.config.empty()) cfg = io::load_run_config(args.config);

  forecast::Mode mode = cfg.forecast.mode;
  if (!args.mode.empty()) {
    if (args.mode == "closed")
      mode = forecast::Mode::ClosedLoop;
    else if (args.mode == "onestep")
      mode = forecast::Mode::OneStep;
    else {
      std::cerr << "forecast: --mode must be 'closed' or 'onestep', got '" << args.mode
                << "'\n";
      return kExitUsage;
    }
  }

  const io::SavedModel saved = io::load_model_json(args.model);
  const TimeSeries series = io::read_series_csv(args.data);
  if (std::abs(series.step_s - saved.step_s) > 1e-6 * std::abs(saved.step_s))
    throw std::invalid_argument("forecast: '" + args.data + "' step " +
                                io::format_double(series.step_s) +
                                " s does not match the model's training step " +
                                io::format_double(saved.step_s) + " s");
  if (saved.train_count < 1 || saved.train_count > series.size())
    throw std::invalid_argument("forecast: model was trained on " +
                                std::to_string(saved.train_count) +
                                " samples but '" + args.data + "' has " +
                                std::to_string(series.size()));

  const Vec history(series.values.begin(),
                    series.values.begin() + static_cast<std::ptrdiff_t>(saved.train_count));
  const Vec observations(series.values.begin() + static_cast<std::ptrdiff_t>(saved.train_count),
                         series.values.end());

  Vec preds;
  if (mode == forecast::Mode::ClosedLoop) {
    std::size_t horizon = cfg.forecast.horizon;
    if (args.horizon >= 0) horizon = static_cast<std::size_t>(args.horizon);
    if (horizon == 0) horizon = observations.size();
    if (horizon == 0)
      throw std::invalid_argument("forecast: nothing to forecast; '" + args.data +
                                  "' has no samples past the training range and no "
                                  "--horizon was given");
    preds = forecast::forecast_closed_loop(saved.net, history, horizon);
  } else {
    if (observations.empty())
      throw std::invalid_argument("forecast: one-step mode needs held-out samples in '" +
                                  args.data + "' past the training range");
    preds = forecast::forecast_one_step(saved.net, history, observations);
  }

  const double test_start = series.start_s + static_cast<double>(saved.train_count) * series.step_s;
  io::write_forecast_csv(series.step_s, test_start, preds, observations, args.out);

  nlohmann::json summary;
  summary["mode"] = forecast::mode_name(mode);
  summary["steps"] = preds.size();
  if (!observations.empty() && !preds.empty()) {
    const auto result = forecast::evaluate_forecast(mode, series.step_s, preds, observations);
    summary["rmse"] = result.rmse_value;
  } else {
    summary["rmse"] = nullptr;
  }
  std::cout << summary.dump() << "\n";

  if (!args.plot.empty()) {
    std::vector<TimeSeries> plot_series;
    std::vector<std::string> labels;
    if (!observations.empty()) {
      plot_series.push_back(TimeSeries{series.step_s, test_start, observations});
      labels.push_back("observed");
    }
    plot_series.push_back(TimeSeries{series.step_s, test_start, preds});
    labels.push_back("forecast");
    io::emit_plot_svg(plot_series, labels, args.plot);
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string pred, obs;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const TimeSeries pred = io::read_prediction_csv(args.pred);
  const TimeSeries obs = io::read_series_csv(args.obs);
  if (pred.size() != obs.size())
    throw std::invalid_argument("evaluate: '" + args.pred + "' has " +
                                std::to_string(pred.size()) + " samples but '" +
                                args.obs + "' has " + std::to_string(obs.size()));
  std::cout << io::format_double(forecast::rmse(pred.values, obs.values)) << "\n";
  return kExitOk;
}

struct GradcheckArgs {
  std::uint64_t seed = 1;
  int instances = 10;
  std::size_t hidden = 4;
  std::size_t steps = 20;
  double eps = 1e-5;
  double tol = 1e-4;
};

int cmd_gradcheck(const GradcheckArgs& args) {
  double worst = 0.0;
  for (int k = 0; k < args.instances; ++k) {
    const auto report =
        lstm::grad_check(args.seed + static_cast<std::uint64_t>(k), args.hidden,
                         args.steps, args.eps, args.tol);
    worst = std::max(worst, report.max_rel_err);
  }
  const bool pass = worst < args.tol;
  std::cout << "gradcheck: max relative error " << io::format_double(worst) << " over "
            << args.instances << " instances (tolerance " << io::format_double(args.tol)
            << "): " << (pass ? "PASS" : "FAIL") << "\n";
  if (!pass)
    throw NumericError("gradcheck failed: max relative error " +
                       io::format_double(worst) + " >= " + io::format_double(args.tol));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Thermostatic-load simulator and LSTM load forecaster"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand(
      "simulate", "Run the relay-controlled thermal simulation, export trace and load");
  sim->add_option("--config", sim_args.config, "JSON run configuration");
  sim->add_option("--out", sim_args.out, "trace CSV output path");
  sim->add_option("--avg-out", sim_args.avg_out, "window-averaged load CSV output path");
  sim->add_option("--plot", sim_args.plot, "SVG plot of the averaged load");
  sim->add_option("--seed", sim_args.seed, "disturbance seed (overrides config)")
      ->each([&](const std::string&) { sim_args.seed_set = true; });

  GenDataArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic hourly load year");
  gen->add_option("--days", gen_args.days, "number of days")
      ->default_val(365)
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_args.seed, "generator seed")->default_val(42);
  gen->add_option("--out", gen_args.out, "CSV output path")->required();
  gen->add_option("--plot", gen_args.plot, "SVG plot path");
  gen->add_option("--base", gen_args.cfg.base, "base load level");
  gen->add_option("--daily-amplitude", gen_args.cfg.daily_amplitude, "daily sinusoid amplitude");
  gen->add_option("--second-harmonic", gen_args.cfg.second_harmonic, "12 h harmonic amplitude");
  gen->add_option("--weekly-amplitude", gen_args.cfg.weekly_amplitude, "weekly modulation amplitude");
  gen->add_option("--noise-sd", gen_args.cfg.noise_sd, "Gaussian noise level");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the forecaster on a series prefix");
  train->add_option("--config", train_args.config, "JSON run configuration");
  train->add_option("--data", train_args.data, "input series CSV");
  train->add_option("--train-days", train_args.train_days, "days of data to train on")
      ->check(CLI::PositiveNumber);
  train->add_option("--model", train_args.model_out, "model JSON output path");
  train->add_option("--hidden", train_args.hidden, "hidden units (overrides config)")
      ->check(CLI::PositiveNumber);
  train->add_option("--epochs", train_args.epochs, "training epochs (overrides config)")
      ->check(CLI::PositiveNumber);
  train->add_option("--seed", train_args.seed, "training seed (overrides config)")
      ->each([&](const std::string&) { train_args.seed_set = true; });

  ForecastArgs fc_args;
  auto* fc = app.add_subcommand("forecast", "Forecast past the training range");
  fc->add_option("--config", fc_args.config, "JSON run configuration");
  fc->add_option("--model", fc_args.model, "model JSON")->required();
  fc->add_option("--data", fc_args.data, "input series CSV")->required();
  fc->add_option("--mode", fc_args.mode, "'closed' or 'onestep'");
  fc->add_option("--horizon", fc_args.horizon, "closed-loop steps (default: held-out length)")
      ->check(CLI::NonNegativeNumber);
  fc->add_option("--out", fc_args.out, "forecast CSV output path")->required();
  fc->add_option("--plot", fc_args.plot, "SVG plot path");

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "RMSE between a prediction and an observation CSV");
  eval->add_option("--pred", eval_args.pred, "prediction CSV")->required();
  eval->add_option("--obs", eval_args.obs, "observation CSV")->required();

  GradcheckArgs gc_args;
  auto* gc = app.add_subcommand("gradcheck", "Verify BPTT gradients against finite differences");
  gc->add_option("--seed", gc_args.seed, "base seed")->default_val(1);
  gc->add_option("--instances", gc_args.instances, "number of random instances")
      ->default_val(10)
      ->check(CLI::PositiveNumber);
  gc->add_option("--hidden", gc_args.hidden, "hidden units")
      ->default_val(4)
      ->check(CLI::PositiveNumber);
  gc->add_option("--steps", gc_args.steps, "sequence length")
      ->default_val(20)
      ->check(CLI::PositiveNumber);
  gc->add_option("--eps", gc_args.eps, "finite-difference epsilon")
      ->default_val(1e-5)
      ->check(CLI::PositiveNumber);
  gc->add_option("--tol", gc_args.tol, "max relative error tolerance")
      ->default_val(1e-4)
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(sim)) return cmd_simulate(sim_args);
    if (app.got_subcommand(gen)) return cmd_gen_data(gen_args);
    if (app.got_subcommand(train)) return cmd_train(train_args);
    if (app.got_subcommand(fc)) return cmd_forecast(fc_args);
    if (app.got_subcommand(eval)) return cmd_evaluate(eval_args);
    if (app.got_subcommand(gc)) return cmd_gradcheck(gc_args);
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace tclf::cli
