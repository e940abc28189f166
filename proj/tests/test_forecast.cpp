#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tclf/errors.hpp"
#include "tclf/forecast.hpp"
#include "tclf/lstm.hpp"

using namespace tclf;
using namespace tclf::forecast;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

lstm::LstmNetwork zero_network(std::size_t hidden, double mu, double sigma) {
  lstm::LstmNetwork net = lstm::init_params(hidden, 1, 1, 0);
  Vec flat(lstm::param_count(net), 0.0);
  lstm::unflatten_params(net, flat);
  net.mu = mu;
  net.sigma = sigma;
  return net;
}

// All four gates share (w, r, b); dense head is (wd, bd).
lstm::LstmNetwork scalar_network(double w, double r, double b, double wd, double bd,
                                 double mu, double sigma) {
  lstm::LstmNetwork net = zero_network(1, mu, sigma);
  for (lstm::GateParams* g : {&net.lstm.forget, &net.lstm.cand, &net.lstm.input_gate,
                              &net.lstm.output}) {
    g->W(0, 0) = w;
    g->R(0, 0) = r;
    g->b[0] = b;
  }
  net.dense.W(0, 0) = wd;
  net.dense.b[0] = bd;
  return net;
}

// independent scalar re-implementation of one step
double scalar_step(const lstm::LstmNetwork& net, double z, double& h, double& c) {
  const double w = net.lstm.forget.W(0, 0);
  const double r = net.lstm.forget.R(0, 0);
  const double b = net.lstm.forget.b[0];
  const double pre = w * z + r * h + b;
  const double f = sig(pre), g = std::tanh(pre), i = f, o = f;
  c = f * c + i * g;
  h = o * std::tanh(c);
  return net.dense.W(0, 0) * h + net.dense.b[0];
}

double mean_of(const Vec& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double sd_of(const Vec& v) {
  const double m = mean_of(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("standardize: hand-computed example and validation") {
  const auto s = standardize(Vec{1.0, 2.0, 3.0});
  CHECK(s.mu == 2.0);
  CHECK(s.sigma == 1.0);  // n-1 denominator: sqrt((1+0+1)/2)
  CHECK(s.z == Vec{-1.0, 0.0, 1.0});

  CHECK_THROWS_AS(standardize(Vec{5.0, 5.0, 5.0}), ConstantSeriesError);
  CHECK_THROWS_AS(standardize(Vec{1.0}), std::invalid_argument);
}

TEST_CASE("standardize: output has zero mean and unit deviation") {
  Rng rng(14);
  Vec series(500);
  for (auto& v : series) v = 3.0 + 10.0 * rng.normal();
  const auto s = standardize(series);
  CHECK(std::abs(mean_of(s.z)) < 1e-12);
  CHECK(std::abs(sd_of(s.z) - 1.0) < 1e-12);

  SUBCASE("round-trip within 1e-9 relative") {
    const Vec back = destandardize(s.z, s.mu, s.sigma);
    for (std::size_t k = 0; k < series.size(); ++k)
      REQUIRE(std::abs(back[k] - series[k]) <= 1e-9 * std::max(1.0, std::abs(series[k])));
  }
}

TEST_CASE("destandardize: inverse example and identity") {
  CHECK(destandardize(Vec{-1.0, 0.0, 1.0}, 2.0, 1.0) == Vec{1.0, 2.0, 3.0});
  CHECK(destandardize(Vec{0.25, -7.0}, 0.0, 1.0) == Vec{0.25, -7.0});
  CHECK_THROWS_AS(destandardize(Vec{1.0}, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("forecasting with a zero-weight network yields the stored mean") {
  const lstm::LstmNetwork net = zero_network(4, 5.0, 2.0);
  const Vec history{9.0, 4.0, 6.0};

  const Vec closed = forecast_closed_loop(net, history, 4);
  REQUIRE(closed.size() == 4);
  for (double p : closed) CHECK(p == 5.0);

  const Vec one = forecast_one_step(net, history, Vec{9.0, 8.0, 7.0});
  REQUIRE(one.size() == 3);
  for (double p : one) CHECK(p == 5.0);

  CHECK(forecast_closed_loop(net, history, 0).empty());
  CHECK_THROWS_AS(forecast_closed_loop(net, Vec{}, 2), std::invalid_argument);
  CHECK_THROWS_AS(forecast_one_step(net, history, Vec{}), std::invalid_argument);
}

TEST_CASE("closed-loop matches a manual two-step feedback rollout") {
  const double mu = 100.0, sigma = 40.0;
  const lstm::LstmNetwork net = scalar_network(0.8, -0.3, 0.1, 1.1, 0.05, mu, sigma);
  const Vec history{120.0, 90.0};

  double h = 0.0, c = 0.0, last = 0.0;
  for (double x : history) last = scalar_step(net, (x - mu) / sigma, h, c);
  const double p1 = last * sigma + mu;
  const double z1 = (p1 - mu) / sigma;
  const double p2 = scalar_step(net, z1, h, c) * sigma + mu;

  const Vec preds = forecast_closed_loop(net, history, 2);
  REQUIRE(preds.size() == 2);
  // the oracle sums the pre-activations in a different order, so compare to
  // a dozen digits rather than bitwise
  CHECK(std::abs(preds[0] - p1) < 1e-12 * std::abs(p1));
  CHECK(std::abs(preds[1] - p2) < 1e-12 * std::abs(p2));
}

TEST_CASE("one-step matches a manual teacher-forced rollout") {
  const double mu = -4.0, sigma = 3.0;
  const lstm::LstmNetwork net = scalar_network(0.5, 0.4, -0.2, 0.9, 0.3, mu, sigma);
  const Vec history{-5.0, -2.0};
  const Vec obs{-1.0, -6.0, -3.5};

  double h = 0.0, c = 0.0, last = 0.0;
  for (double x : history) last = scalar_step(net, (x - mu) / sigma, h, c);
  Vec expected;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    expected.push_back(last * sigma + mu);
    if (k + 1 < obs.size()) last = scalar_step(net, (obs[k] - mu) / sigma, h, c);
  }

  const Vec preds = forecast_one_step(net, history, obs);
  REQUIRE(preds.size() == expected.size());
  for (std::size_t k = 0; k < preds.size(); ++k)
    REQUIRE(std::abs(preds[k] - expected[k]) < 1e-12 * std::max(1.0, std::abs(expected[k])));
}

TEST_CASE("alignment contracts hold for arbitrary instances") {
  const lstm::LstmNetwork base = lstm::init_params(5, 1, 1, 55);
  lstm::LstmNetwork net = base;
  net.mu = 10.0;
  net.sigma = 4.0;
  Rng rng(56);
  Vec history(40);
  for (auto& v : history) v = 10.0 + 4.0 * rng.normal();

  for (std::size_t horizon : {1u, 5u, 33u})
    CHECK(forecast_closed_loop(net, history, horizon).size() == horizon);
  for (std::size_t n : {1u, 7u, 29u}) {
    Vec obs(n);
    for (auto& v : obs) v = 10.0 + 4.0 * rng.normal();
    CHECK(forecast_one_step(net, history, obs).size() == n);
  }
}

TEST_CASE("one-step on the closed-loop's own output reproduces it bit for bit") {
  lstm::LstmNetwork net = lstm::init_params(6, 1, 1, 71);
  net.mu = 2726.0;
  net.sigma = 1766.0;
  Rng rng(72);
  Vec history(60);
  for (auto& v : history) v = 2726.0 + 1766.0 * rng.normal();

  const Vec closed = forecast_closed_loop(net, history, 25);
  const Vec replay = forecast_one_step(net, history, closed);
  REQUIRE(replay.size() == closed.size());
  for (std::size_t k = 0; k < closed.size(); ++k) REQUIRE(replay[k] == closed[k]);
}

TEST_CASE("rmse: formulas, permutation invariance, validation") {
  CHECK(rmse(Vec{1.0, 2.0, 3.0}, Vec{1.0, 2.0, 3.0}) == 0.0);
  CHECK(std::abs(rmse(Vec{1.0, 2.0}, Vec{1.0, 4.0}) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(rmse(Vec{0.0, 0.0, 0.0}, Vec{3.0, 0.0, 0.0}) - std::sqrt(3.0)) < 1e-15);

  const Vec p{4.0, -1.0, 0.5, 9.0};
  const Vec o{3.0, 2.0, 0.0, 9.5};
  const Vec p2{9.0, 0.5, 4.0, -1.0};  // same pairs, permuted
  const Vec o2{9.5, 0.0, 3.0, 2.0};
  CHECK(rmse(p, o) == rmse(p2, o2));

  CHECK_THROWS_AS(rmse(Vec{1.0}, Vec{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(rmse(Vec{}, Vec{}), std::invalid_argument);
}

TEST_CASE("evaluate_forecast pairs the overlap and stores a consistent rmse") {
  const Vec preds{1.0, 2.0, 3.0, 4.0, 5.0};
  const Vec obs{1.5, 2.5, 3.5};
  const ForecastResult r = evaluate_forecast(Mode::ClosedLoop, 100.0, preds, obs);
  CHECK(r.predictions.size() == 3);
  CHECK(r.observations.size() == 3);
  CHECK(r.rmse_value == rmse(r.predictions, r.observations));
  CHECK(r.rmse_value == doctest::Approx(0.5));
  CHECK(mode_name(r.mode) == "closed_loop");
  CHECK(mode_name(Mode::OneStep) == "one_step");
  CHECK_THROWS_AS(evaluate_forecast(Mode::OneStep, 1.0, Vec{}, obs), std::invalid_argument);
}
