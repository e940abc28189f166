#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tclf/linalg.hpp"

namespace tclf::lstm {

/// One gate's trainable weights: input W (H x I), recurrent R (H x H),
/// bias b (H).
struct GateParams {
  Matrix W;
  Matrix R;
  Vec b;
};

/// Gate order follows the cell equations: forget, candidate, input, output.
struct LstmParams {
  std::size_t hidden = 0;
  std::size_t input = 0;
  GateParams forget, cand, input_gate, output;
};

/// Output head: W (O x H), b (O).
struct DenseParams {
  Matrix W;
  Vec b;
};

struct LstmState {
  Vec h;
  Vec c;
};

LstmState zero_state(std::size_t hidden);

/// Regression network plus the standardization statistics of the series it
/// was trained on (predictions are produced in standardized space and mapped
/// back through mu/sigma).
struct LstmNetwork {
  LstmParams lstm;
  DenseParams dense;
  double mu = 0.0;
  double sigma = 1.0;

  std::size_t hidden_size() const { return lstm.hidden; }
  std::size_t input_size() const { return lstm.input; }
  std::size_t output_size() const { return dense.W.rows; }
};

struct TrainingConfig {
  int epochs = 250;
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global L2 gradient clip
  std::uint64_t seed = 0;
  void validate() const;
};

/// Glorot-uniform weights, zero biases except the forget bias at 1.
/// Deterministic given seed.
LstmNetwork init_params(std::size_t hidden, std::size_t input, std::size_t output,
                        std::uint64_t seed);

/// Gate activations of a single step, kept for the backward pass.
struct StepCache {
  Vec f, g, i, o, c, tanh_c;
};

/// One cell step:
///   f = sig(Wf x + Rf h + bf)     g = tanh(Wg x + Rg h + bg)
///   i = sig(Wi x + Ri h + bi)     o = sig(Wo x + Ro h + bo)
///   c' = f.c + i.g                h' = o.tanh(c')
std::pair<LstmState, StepCache> lstm_cell_forward(const LstmParams& p,
                                                  std::span<const double> x,
                                                  const LstmState& state);

/// Whole-sequence activations; row t holds the step-t vectors.
struct ForwardCache {
  Matrix f, g, i, o, c, h, tanh_c;
  LstmState initial;
};

/// Unrolls the cell over `sequence` (T x I, row per step) and applies the
/// dense head to every hidden state. Returns T x O outputs; fills `cache`
/// when given.
Matrix network_forward(const LstmNetwork& net, const Matrix& sequence,
                       const LstmState& initial, ForwardCache* cache = nullptr);

/// Mean over all steps and output components of the squared error.
double mse_loss(const Matrix& preds, const Matrix& targets);

/// Parameter-shaped gradient holder.
struct Gradients {
  LstmParams lstm;
  DenseParams dense;
};

/// Exact reverse-mode gradients of mse_loss(network_forward(...)) w.r.t.
/// every parameter, accumulated over the full sequence. Optionally reports
/// the forward loss.
Gradients bptt_gradients(const LstmNetwork& net, const Matrix& sequence,
                         const Matrix& targets, const LstmState& initial,
                         double* loss_out = nullptr);

/// Central-difference gradients, (L(p+eps) - L(p-eps)) / (2 eps) per scalar
/// parameter. Verification oracle for bptt_gradients.
Gradients finite_diff_gradients(const LstmNetwork& net, const Matrix& sequence,
                                const Matrix& targets, const LstmState& initial,
                                double eps);

// Canonical flat parameter order: for each gate in (f, g, i, o): W row-major,
// R row-major, b; then dense W row-major, dense b. Shared by the optimizer,
// the finite-difference oracle and the JSON persistence.
std::size_t param_count(const LstmNetwork& net);
Vec flatten_params(const LstmNetwork& net);
void unflatten_params(LstmNetwork& net, std::span<const double> flat);
Vec flatten_grads(const Gradients& g);

/// max over parameters of |a-b| / max(|a|, |b|, 1e-8).
double max_relative_error(const Gradients& a, const Gradients& b);

/// Scales v to L2 norm <= max_norm; no-op when already inside.
void clip_global_norm(Vec& v, double max_norm);

struct AdamState {
  Vec m;
  Vec v;
};

/// One Adam update with bias correction, applied to the flat parameter
/// vector after clipping the gradient to cfg.clip_norm. step_index starts
/// at 1.
void adam_step(Vec& params, const Vec& grads, AdamState& state,
               const TrainingConfig& cfg, int step_index);

struct TrainResult {
  LstmNetwork net;
  Vec loss_history;  // one forward loss per epoch, before that epoch's update
};

/// Next-step regression on a standardized series: inputs are all samples but
/// the last, targets the series shifted by one. One full-sequence BPTT pass
/// and one Adam update per epoch. Deterministic given cfg.seed.
TrainResult train(const Vec& standardized_series, const TrainingConfig& cfg,
                  std::size_t hidden = 200);

/// Fast single-step evaluation for I = O = 1 networks; reuses scratch
/// buffers across calls. Used by the forecasting loops.
class CellStepper {
 public:
  explicit CellStepper(const LstmNetwork& net);
  /// Advances `state` on input x, returns the dense output.
  double step(double x, LstmState& state);

 private:
  const LstmNetwork& net_;
  Vec af_, ag_, ai_, ao_;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
};

/// Builds a random instance (network, sequence, targets) from `seed` and
/// compares BPTT against central finite differences.
GradCheckReport grad_check(std::uint64_t seed, std::size_t hidden = 4,
                           std::size_t steps = 20, double eps = 1e-5,
                           double tol = 1e-4);

}  // namespace tclf::lstm
