#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tclf/cli.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"tclf"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return tclf::cli::run(static_cast<int>(argv.size()), argv.data());
}

/// Redirects a stream into a buffer for one scope.
class Capture {
 public:
  explicit Capture(std::ostream& stream) : stream_(stream), old_(stream.rdbuf(buf_.rdbuf())) {}
  ~Capture() { stream_.rdbuf(old_); }
  std::string text() const { return buf_.str(); }

 private:
  std::ostream& stream_;
  std::ostringstream buf_;
  std::streambuf* old_;
};

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "tclf_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string at(const std::string& name) { return (work_dir() / name).string(); }

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  Capture out(std::cout);
  Capture err(std::cerr);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"forecast"}) == 1);  // missing required flags
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("gradcheck passes on a healthy build") {
  Capture out(std::cout);
  CHECK(run_cli({"gradcheck", "--seed", "7"}) == 0);
  CHECK(out.text().find("PASS") != std::string::npos);

  SUBCASE("an unreachable tolerance exits with the numeric-failure code") {
    Capture err(std::cerr);
    CHECK(run_cli({"gradcheck", "--seed", "7", "--tol", "1e-15"}) == 3);
  }
}

TEST_CASE("evaluate: matching series, then a length mismatch") {
  write_text(at("pred.csv"), "t,value\n0,1\n1,2\n2,3\n");
  write_text(at("obs.csv"), "t,value\n0,1\n1,2\n2,5\n");
  {
    Capture out(std::cout);
    CHECK(run_cli({"evaluate", "--pred", at("pred.csv"), "--obs", at("obs.csv")}) == 0);
    const double rmse = std::stod(out.text());
    CHECK(rmse == doctest::Approx(std::sqrt(4.0 / 3.0)));
  }

  write_text(at("obs_short.csv"), "t,value\n0,1\n1,2\n");
  Capture err(std::cerr);
  CHECK(run_cli({"evaluate", "--pred", at("pred.csv"), "--obs", at("obs_short.csv")}) == 2);
  CHECK(err.text().find("3") != std::string::npos);
  CHECK(err.text().find("2") != std::string::npos);
}

TEST_CASE("malformed inputs exit with code 2") {
  Capture err(std::cerr);
  write_text(at("bad_cfg.json"), R"({"sim": {"unknown_knob": 1}})");
  CHECK(run_cli({"simulate", "--config", at("bad_cfg.json"), "--out", at("t.csv")}) == 2);

  write_text(at("const.csv"), "t,value\n0,5\n100,5\n200,5\n300,5\n");
  CHECK(run_cli({"train", "--data", at("const.csv"), "--train-days",
                 "0.004629629629629629", "--model", at("m.json")}) == 2);

  // 0.003 days is 2.592 samples at 100 s: not a whole split
  CHECK(run_cli({"train", "--data", at("const.csv"), "--train-days", "0.003",
                 "--model", at("m.json")}) == 2);
}

TEST_CASE("full pipeline: simulate, train, forecast, evaluate") {
  const std::string cfg_path = at("cfg.json");
  write_text(cfg_path, R"({
    "sim": {"duration_days": 0.125},
    "train": {"epochs": 8, "hidden": 8, "train_days": 0.0625},
    "io": {"seed": 11}
  })");

  {
    Capture err(std::cerr);
    REQUIRE(run_cli({"simulate", "--config", cfg_path, "--out", at("trace.csv"),
                     "--avg-out", at("load.csv"), "--plot", at("load.svg")}) == 0);
  }
  const std::string trace = read_text(at("trace.csv"));
  CHECK(trace.rfind("t,indoor_temp,heater_power,relay,t_ext,q_other,solar\n", 0) == 0);
  CHECK(read_text(at("load.svg")).find("<polyline") != std::string::npos);

  {
    Capture err(std::cerr);
    REQUIRE(run_cli({"train", "--config", cfg_path, "--data", at("load.csv"), "--model",
                     at("model.json")}) == 0);
  }

  nlohmann::json summary;
  {
    Capture out(std::cout);
    Capture err(std::cerr);
    REQUIRE(run_cli({"forecast", "--model", at("model.json"), "--data", at("load.csv"),
                     "--mode", "closed", "--out", at("fc.csv"), "--plot",
                     at("fc.svg")}) == 0);
    summary = nlohmann::json::parse(out.text());
  }
  CHECK(summary.at("mode") == "closed_loop");
  CHECK(summary.at("steps").get<int>() == 54);  // (0.125 - 0.0625) days at 100 s
  CHECK(summary.at("rmse").is_number());

  {
    Capture out(std::cout);
    Capture err(std::cerr);
    REQUIRE(run_cli({"forecast", "--model", at("model.json"), "--data", at("load.csv"),
                     "--mode", "onestep", "--out", at("fc1.csv")}) == 0);
    const auto s2 = nlohmann::json::parse(out.text());
    CHECK(s2.at("mode") == "one_step");
    CHECK(s2.at("steps").get<int>() == 54);
  }

  const std::string fc = read_text(at("fc.csv"));
  CHECK(fc.rfind("t,prediction,observation\n", 0) == 0);

  SUBCASE("byte-identical artifacts on a repeated run") {
    const std::string trace1 = read_text(at("trace.csv"));
    const std::string model1 = read_text(at("model.json"));
    const std::string fc1 = read_text(at("fc.csv"));
    Capture out(std::cout);
    Capture err(std::cerr);
    REQUIRE(run_cli({"simulate", "--config", cfg_path, "--out", at("trace.csv"),
                     "--avg-out", at("load.csv")}) == 0);
    REQUIRE(run_cli({"train", "--config", cfg_path, "--data", at("load.csv"), "--model",
                     at("model.json")}) == 0);
    REQUIRE(run_cli({"forecast", "--model", at("model.json"), "--data", at("load.csv"),
                     "--mode", "closed", "--out", at("fc.csv")}) == 0);
    CHECK(read_text(at("trace.csv")) == trace1);
    CHECK(read_text(at("model.json")) == model1);
    CHECK(read_text(at("fc.csv")) == fc1);
  }

  SUBCASE("model/data step mismatch is a data error") {
    Capture err(std::cerr);
    write_text(at("hourly.csv"), "t,value\n0,1\n3600,2\n7200,3\n");
    CHECK(run_cli({"forecast", "--model", at("model.json"), "--data", at("hourly.csv"),
                   "--mode", "closed", "--out", at("x.csv")}) == 2);
  }

  SUBCASE("closed-loop horizon may run past the held-out data") {
    Capture out(std::cout);
    Capture err(std::cerr);
    REQUIRE(run_cli({"forecast", "--model", at("model.json"), "--data", at("load.csv"),
                     "--mode", "closed", "--horizon", "60", "--out",
                     at("fc_long.csv")}) == 0);
    const auto s = nlohmann::json::parse(out.text());
    CHECK(s.at("steps").get<int>() == 60);
    CHECK(s.at("rmse").is_number());  // over the 54 overlapping samples
    const std::string fc_long = read_text(at("fc_long.csv"));
    // final row has an empty observation cell
    const auto last_newline = fc_long.find_last_of('\n', fc_long.size() - 2);
    CHECK(fc_long.substr(last_newline + 1).find(",\n") != std::string::npos);
  }
}

TEST_CASE("gen-data writes a readable series with the requested length") {
  Capture err(std::cerr);
  REQUIRE(run_cli({"gen-data", "--days", "10", "--seed", "3", "--out", at("synth.csv"),
                   "--plot", at("synth.svg")}) == 0);
  const std::string text = read_text(at("synth.csv"));
  CHECK(text.rfind("t,value\n", 0) == 0);
  // 10 days * 24 samples + header + trailing newline
  CHECK(std::count(text.begin(), text.end(), '\n') == 241);

  SUBCASE("deterministic for the same seed") {
    REQUIRE(run_cli({"gen-data", "--days", "10", "--seed", "3", "--out",
                     at("synth2.csv")}) == 0);
    CHECK(read_text(at("synth2.csv")) == text);
  }
}
