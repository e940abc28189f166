#include "tclf/lstm.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "tclf/errors.hpp"

namespace tclf::lstm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_shapes(const LstmParams& p) {
  const std::size_t H = p.hidden, I = p.input;
  for (const GateParams* g : {&p.forget, &p.cand, &p.input_gate, &p.output}) {
    if (g->W.rows != H || g->W.cols != I || g->R.rows != H || g->R.cols != H ||
        g->b.size() != H)
      throw std::invalid_argument("LstmParams: inconsistent gate shapes");
  }
}

void check_shapes(const LstmNetwork& net) {
  check_shapes(net.lstm);
  if (net.dense.W.cols != net.lstm.hidden ||
      net.dense.b.size() != net.dense.W.rows)
    throw std::invalid_argument("LstmNetwork: inconsistent dense shapes");
}

GateParams zero_gate(std::size_t H, std::size_t I) {
  return GateParams{Matrix(H, I), Matrix(H, H), Vec(H, 0.0)};
}

Gradients zero_like(const LstmNetwork& net) {
  const std::size_t H = net.lstm.hidden, I = net.lstm.input;
  Gradients g;
  g.lstm.hidden = H;
  g.lstm.input = I;
  g.lstm.forget = zero_gate(H, I);
  g.lstm.cand = zero_gate(H, I);
  g.lstm.input_gate = zero_gate(H, I);
  g.lstm.output = zero_gate(H, I);
  g.dense.W = Matrix(net.dense.W.rows, H);
  g.dense.b = Vec(net.dense.b.size(), 0.0);
  return g;
}

void fill_glorot(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : m.data) v = rng.uniform(-limit, limit);
}

template <typename Fn>
void for_each_block(const LstmParams& lstm, const DenseParams& dense, Fn&& fn) {
  for (const GateParams* g : {&lstm.forget, &lstm.cand, &lstm.input_gate, &lstm.output}) {
    fn(g->W.data);
    fn(g->R.data);
    fn(g->b);
  }
  fn(dense.W.data);
  fn(dense.b);
}

template <typename Fn>
void for_each_block(LstmParams& lstm, DenseParams& dense, Fn&& fn) {
  for (GateParams* g : {&lstm.forget, &lstm.cand, &lstm.input_gate, &lstm.output}) {
    fn(g->W.data);
    fn(g->R.data);
    fn(g->b);
  }
  fn(dense.W.data);
  fn(dense.b);
}

}  // namespace

LstmState zero_state(std::size_t hidden) {
  return LstmState{Vec(hidden, 0.0), Vec(hidden, 0.0)};
}

void TrainingConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainingConfig: epochs must be >= 1");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("TrainingConfig: learning_rate must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
    throw std::invalid_argument("TrainingConfig: betas must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("TrainingConfig: epsilon must be > 0");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("TrainingConfig: clip_norm must be > 0");
}

LstmNetwork init_params(std::size_t hidden, std::size_t input, std::size_t output,
                        std::uint64_t seed) {
  if (hidden == 0 || input == 0 || output == 0)
    throw std::invalid_argument("init_params: sizes must be >= 1");

  Rng rng(seed);
  LstmNetwork net;
  net.lstm.hidden = hidden;
  net.lstm.input = input;
  for (GateParams* g : {&net.lstm.forget, &net.lstm.cand, &net.lstm.input_gate,
                        &net.lstm.output}) {
    *g = zero_gate(hidden, input);
    fill_glorot(g->W, input, hidden, rng);
    fill_glorot(g->R, hidden, hidden, rng);
  }
  std::fill(net.lstm.forget.b.begin(), net.lstm.forget.b.end(), 1.0);
  net.dense.W = Matrix(output, hidden);
  net.dense.b = Vec(output, 0.0);
  fill_glorot(net.dense.W, hidden, output, rng);
  return net;
}

std::pair<LstmState, StepCache> lstm_cell_forward(const LstmParams& p,
                                                  std::span<const double> x,
                                                  const LstmState& state) {
  check_shapes(p);
  const std::size_t H = p.hidden;
  if (x.size() != p.input || state.h.size() != H || state.c.size() != H)
    throw std::invalid_argument("lstm_cell_forward: input/state size mismatch");

  StepCache cache;
  cache.f = p.forget.b;
  cache.g = p.cand.b;
  cache.i = p.input_gate.b;
  cache.o = p.output.b;
  matvec_add(p.forget.W, x.data(), cache.f.data());
  matvec_add(p.cand.W, x.data(), cache.g.data());
  matvec_add(p.input_gate.W, x.data(), cache.i.data());
  matvec_add(p.output.W, x.data(), cache.o.data());
  matvec_add(p.forget.R, state.h.data(), cache.f.data());
  matvec_add(p.cand.R, state.h.data(), cache.g.data());
  matvec_add(p.input_gate.R, state.h.data(), cache.i.data());
  matvec_add(p.output.R, state.h.data(), cache.o.data());

  LstmState next = zero_state(H);
  cache.c.resize(H);
  cache.tanh_c.resize(H);
  for (std::size_t k = 0; k < H; ++k) {
    cache.f[k] = sigmoid(cache.f[k]);
    cache.g[k] = std::tanh(cache.g[k]);
    cache.i[k] = sigmoid(cache.i[k]);
    cache.o[k] = sigmoid(cache.o[k]);
    cache.c[k] = cache.f[k] * state.c[k] + cache.i[k] * cache.g[k];
    cache.tanh_c[k] = std::tanh(cache.c[k]);
    next.c[k] = cache.c[k];
    next.h[k] = cache.o[k] * cache.tanh_c[k];
  }
  return {std::move(next), std::move(cache)};
}

Matrix network_forward(const LstmNetwork& net, const Matrix& sequence,
                       const LstmState& initial, ForwardCache* cache) {
  check_shapes(net);
  const std::size_t H = net.lstm.hidden, I = net.lstm.input;
  const std::size_t O = net.dense.W.rows, T = sequence.rows;
  if (T == 0) throw std::invalid_argument("network_forward: empty sequence");
  if (sequence.cols != I)
    throw std::invalid_argument("network_forward: sequence width != input size");
  if (initial.h.size() != H || initial.c.size() != H)
    throw std::invalid_argument("network_forward: initial state size mismatch");

  if (cache) {
    for (Matrix* m : {&cache->f, &cache->g, &cache->i, &cache->o, &cache->c,
                      &cache->h, &cache->tanh_c})
      *m = Matrix(T, H);
    cache->initial = initial;
  }

  Matrix outputs(T, O);
  Vec h = initial.h;
  Vec c = initial.c;
  Vec af(H), ag(H), ai(H), ao(H);
  const LstmParams& p = net.lstm;

  for (std::size_t t = 0; t < T; ++t) {
    const double* x = sequence.row(t);
    std::memcpy(af.data(), p.forget.b.data(), H * sizeof(double));
    std::memcpy(ag.data(), p.cand.b.data(), H * sizeof(double));
    std::memcpy(ai.data(), p.input_gate.b.data(), H * sizeof(double));
    std::memcpy(ao.data(), p.output.b.data(), H * sizeof(double));
    matvec_add(p.forget.W, x, af.data());
    matvec_add(p.cand.W, x, ag.data());
    matvec_add(p.input_gate.W, x, ai.data());
    matvec_add(p.output.W, x, ao.data());
    matvec_add(p.forget.R, h.data(), af.data());
    matvec_add(p.cand.R, h.data(), ag.data());
    matvec_add(p.input_gate.R, h.data(), ai.data());
    matvec_add(p.output.R, h.data(), ao.data());

    for (std::size_t k = 0; k < H; ++k) {
      const double f = sigmoid(af[k]);
      const double g = std::tanh(ag[k]);
      const double i = sigmoid(ai[k]);
      const double o = sigmoid(ao[k]);
      c[k] = f * c[k] + i * g;
      const double tc = std::tanh(c[k]);
      h[k] = o * tc;
      if (cache) {
        cache->f(t, k) = f;
        cache->g(t, k) = g;
        cache->i(t, k) = i;
        cache->o(t, k) = o;
        cache->c(t, k) = c[k];
        cache->tanh_c(t, k) = tc;
        cache->h(t, k) = h[k];
      }
    }

    double* y = outputs.row(t);
    for (std::size_t r = 0; r < O; ++r)
      y[r] = net.dense.b[r] + dot(net.dense.W.row(r), h.data(), H);
  }
  return outputs;
}

double mse_loss(const Matrix& preds, const Matrix& targets) {
  if (preds.rows != targets.rows || preds.cols != targets.cols)
    throw std::invalid_argument("mse_loss: shape mismatch");
  if (preds.rows == 0) throw std::invalid_argument("mse_loss: empty input");
  double acc = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const double e = preds.data[k] - targets.data[k];
    acc += e * e;
  }
  return acc / static_cast<double>(preds.size());
}

Gradients bptt_gradients(const LstmNetwork& net, const Matrix& sequence,
                         const Matrix& targets, const LstmState& initial,
                         double* loss_out) {
  const std::size_t H = net.lstm.hidden;
  const std::size_t O = net.dense.W.rows, T = sequence.rows;
  if (targets.rows != T || targets.cols != O)
    throw std::invalid_argument("bptt_gradients: target shape mismatch");

  ForwardCache cache;
  const Matrix outputs = network_forward(net, sequence, initial, &cache);
  if (loss_out) *loss_out = mse_loss(outputs, targets);

  Gradients grads = zero_like(net);
  const double scale = 2.0 / static_cast<double>(T * O);

  Vec dy(O), dh(H), dc(H), dh_carry(H, 0.0), dc_carry(H, 0.0);
  Vec daf(H), dag(H), dai(H), dao(H);

  for (std::size_t ti = T; ti-- > 0;) {
    const double* y = outputs.row(ti);
    const double* tr = targets.row(ti);
    for (std::size_t r = 0; r < O; ++r) dy[r] = scale * (y[r] - tr[r]);

    const double* h_t = cache.h.row(ti);
    outer_add(grads.dense.W, dy.data(), h_t);
    for (std::size_t r = 0; r < O; ++r) grads.dense.b[r] += dy[r];

    // dh: dense head plus the recurrent carry from step ti+1
    dh = dh_carry;
    matvec_transpose_add(net.dense.W, dy.data(), dh.data());

    const double* f = cache.f.row(ti);
    const double* g = cache.g.row(ti);
    const double* i = cache.i.row(ti);
    const double* o = cache.o.row(ti);
    const double* tc = cache.tanh_c.row(ti);
    const double* c_prev = ti > 0 ? cache.c.row(ti - 1) : cache.initial.c.data();
    const double* h_prev = ti > 0 ? cache.h.row(ti - 1) : cache.initial.h.data();

    for (std::size_t k = 0; k < H; ++k) {
      dc[k] = dh[k] * o[k] * (1.0 - tc[k] * tc[k]) + dc_carry[k];
      daf[k] = dc[k] * c_prev[k] * f[k] * (1.0 - f[k]);
      dag[k] = dc[k] * i[k] * (1.0 - g[k] * g[k]);
      dai[k] = dc[k] * g[k] * i[k] * (1.0 - i[k]);
      dao[k] = dh[k] * tc[k] * o[k] * (1.0 - o[k]);
      dc_carry[k] = dc[k] * f[k];
    }

    const double* x = sequence.row(ti);
    outer_add(grads.lstm.forget.W, daf.data(), x);
    outer_add(grads.lstm.cand.W, dag.data(), x);
    outer_add(grads.lstm.input_gate.W, dai.data(), x);
    outer_add(grads.lstm.output.W, dao.data(), x);
    outer_add(grads.lstm.forget.R, daf.data(), h_prev);
    outer_add(grads.lstm.cand.R, dag.data(), h_prev);
    outer_add(grads.lstm.input_gate.R, dai.data(), h_prev);
    outer_add(grads.lstm.output.R, dao.data(), h_prev);
    for (std::size_t k = 0; k < H; ++k) {
      grads.lstm.forget.b[k] += daf[k];
      grads.lstm.cand.b[k] += dag[k];
      grads.lstm.input_gate.b[k] += dai[k];
      grads.lstm.output.b[k] += dao[k];
    }

    std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
    matvec_transpose_add(net.lstm.forget.R, daf.data(), dh_carry.data());
    matvec_transpose_add(net.lstm.cand.R, dag.data(), dh_carry.data());
    matvec_transpose_add(net.lstm.input_gate.R, dai.data(), dh_carry.data());
    matvec_transpose_add(net.lstm.output.R, dao.data(), dh_carry.data());
  }
  return grads;
}

Gradients finite_diff_gradients(const LstmNetwork& net, const Matrix& sequence,
                                const Matrix& targets, const LstmState& initial,
                                double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff_gradients: eps must be > 0");
  LstmNetwork probe = net;
  Vec flat = flatten_params(probe);
  Vec fd(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const double saved = flat[k];
    flat[k] = saved + eps;
    unflatten_params(probe, flat);
    const double lp = mse_loss(network_forward(probe, sequence, initial), targets);
    flat[k] = saved - eps;
    unflatten_params(probe, flat);
    const double lm = mse_loss(network_forward(probe, sequence, initial), targets);
    flat[k] = saved;
    fd[k] = (lp - lm) / (2.0 * eps);
  }
  unflatten_params(probe, flat);

  Gradients grads = zero_like(net);
  std::size_t pos = 0;
  for_each_block(grads.lstm, grads.dense, [&](Vec& block) {
    std::copy(fd.begin() + static_cast<std::ptrdiff_t>(pos),
              fd.begin() + static_cast<std::ptrdiff_t>(pos + block.size()),
              block.begin());
    pos += block.size();
  });
  return grads;
}

std::size_t param_count(const LstmNetwork& net) {
  std::size_t n = 0;
  for_each_block(net.lstm, net.dense, [&](const Vec& block) { n += block.size(); });
  return n;
}

Vec flatten_params(const LstmNetwork& net) {
  Vec flat;
  flat.reserve(param_count(net));
  for_each_block(net.lstm, net.dense, [&](const Vec& block) {
    flat.insert(flat.end(), block.begin(), block.end());
  });
  return flat;
}

void unflatten_params(LstmNetwork& net, std::span<const double> flat) {
  if (flat.size() != param_count(net))
    throw std::invalid_argument("unflatten_params: size mismatch");
  std::size_t pos = 0;
  for_each_block(net.lstm, net.dense, [&](Vec& block) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
              flat.begin() + static_cast<std::ptrdiff_t>(pos + block.size()),
              block.begin());
    pos += block.size();
  });
}

Vec flatten_grads(const Gradients& g) {
  Vec flat;
  for_each_block(g.lstm, g.dense, [&](const Vec& block) {
    flat.insert(flat.end(), block.begin(), block.end());
  });
  return flat;
}

double max_relative_error(const Gradients& a, const Gradients& b) {
  const Vec fa = flatten_grads(a);
  const Vec fb = flatten_grads(b);
  if (fa.size() != fb.size())
    throw std::invalid_argument("max_relative_error: shape mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k) {
    const double denom = std::max({std::abs(fa[k]), std::abs(fb[k]), 1e-8});
    worst = std::max(worst, std::abs(fa[k] - fb[k]) / denom);
  }
  return worst;
}

void clip_global_norm(Vec& v, double max_norm) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (double& x : v) x *= s;
  }
}

void adam_step(Vec& params, const Vec& grads, AdamState& state,
               const TrainingConfig& cfg, int step_index) {
  if (step_index < 1) throw std::invalid_argument("adam_step: step_index must be >= 1");
  if (grads.size() != params.size())
    throw std::invalid_argument("adam_step: gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam_step: optimizer state size mismatch");

  Vec g = grads;
  clip_global_norm(g, cfg.clip_norm);

  const double bc1 = 1.0 - std::pow(cfg.beta1, step_index);
  const double bc2 = 1.0 - std::pow(cfg.beta2, step_index);
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g[k];
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
    const double m_hat = state.m[k] / bc1;
    const double v_hat = state.v[k] / bc2;
    params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

TrainResult train(const Vec& standardized_series, const TrainingConfig& cfg,
                  std::size_t hidden) {
  cfg.validate();
  const std::size_t n = standardized_series.size();
  if (n < 2) throw std::invalid_argument("train: series needs at least 2 samples");
  for (double v : standardized_series)
    if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite sample");

  const std::size_t T = n - 1;
  Matrix inputs(T, 1), targets(T, 1);
  for (std::size_t t = 0; t < T; ++t) {
    inputs(t, 0) = standardized_series[t];
    targets(t, 0) = standardized_series[t + 1];
  }

  TrainResult result;
  result.net = init_params(hidden, 1, 1, cfg.seed);
  const LstmState initial = zero_state(hidden);

  Vec flat = flatten_params(result.net);
  AdamState opt;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss = 0.0;
    const Gradients grads = bptt_gradients(result.net, inputs, targets, initial, &loss);
    if (!std::isfinite(loss))
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
    result.loss_history.push_back(loss);

    adam_step(flat, flatten_grads(grads), opt, cfg, epoch);
    unflatten_params(result.net, flat);
  }
  return result;
}

CellStepper::CellStepper(const LstmNetwork& net) : net_(net) {
  check_shapes(net);
  if (net.input_size() != 1 || net.output_size() != 1)
    throw std::invalid_argument("CellStepper: needs a 1-in/1-out network");
  const std::size_t H = net.hidden_size();
  af_.resize(H);
  ag_.resize(H);
  ai_.resize(H);
  ao_.resize(H);
}

double CellStepper::step(double x, LstmState& state) {
  const LstmParams& p = net_.lstm;
  const std::size_t H = p.hidden;
  if (state.h.size() != H || state.c.size() != H)
    throw std::invalid_argument("CellStepper: state size mismatch");

  for (std::size_t k = 0; k < H; ++k) {
    af_[k] = p.forget.b[k] + p.forget.W.data[k] * x;
    ag_[k] = p.cand.b[k] + p.cand.W.data[k] * x;
    ai_[k] = p.input_gate.b[k] + p.input_gate.W.data[k] * x;
    ao_[k] = p.output.b[k] + p.output.W.data[k] * x;
  }
  matvec_add(p.forget.R, state.h.data(), af_.data());
  matvec_add(p.cand.R, state.h.data(), ag_.data());
  matvec_add(p.input_gate.R, state.h.data(), ai_.data());
  matvec_add(p.output.R, state.h.data(), ao_.data());

  for (std::size_t k = 0; k < H; ++k) {
    const double f = sigmoid(af_[k]);
    const double g = std::tanh(ag_[k]);
    const double i = sigmoid(ai_[k]);
    const double o = sigmoid(ao_[k]);
    state.c[k] = f * state.c[k] + i * g;
    state.h[k] = o * std::tanh(state.c[k]);
  }
  return net_.dense.b[0] + dot(net_.dense.W.row(0), state.h.data(), H);
}

GradCheckReport grad_check(std::uint64_t seed, std::size_t hidden,
                           std::size_t steps, double eps, double tol) {
  LstmNetwork net = init_params(hidden, 1, 1, seed);
  Rng rng(seed ^ 0xa0761d6478bd642fULL);
  Matrix sequence(steps, 1), targets(steps, 1);
  for (std::size_t t = 0; t < steps; ++t) {
    sequence(t, 0) = rng.normal();
    targets(t, 0) = rng.normal();
  }
  const LstmState initial = zero_state(hidden);
  const Gradients exact = bptt_gradients(net, sequence, targets, initial);
  const Gradients fd = finite_diff_gradients(net, sequence, targets, initial, eps);

  GradCheckReport report;
  report.max_rel_err = max_relative_error(exact, fd);
  report.pass = report.max_rel_err < tol;
  return report;
}

}  // namespace tclf::lstm
