#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace tclf {

using Vec = std::vector<double>;

/// Dense row-major matrix. Just enough surface for the recurrent-network
/// kernels; no expression templates, no views.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return data.size(); }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

/// y += M * x. x must have m.cols entries, y m.rows.
inline void matvec_add(const Matrix& m, const double* x, double* y) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* mr = m.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += mr[c] * x[c];
    y[r] += acc;
  }
}

/// y += M^T * x. x must have m.rows entries, y m.cols.
inline void matvec_transpose_add(const Matrix& m, const double* x, double* y) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* mr = m.row(r);
    const double xr = x[r];
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += mr[c] * xr;
  }
}

/// M += a * x^T (rank-1 accumulate). a has m.rows entries, x m.cols.
inline void outer_add(Matrix& m, const double* a, const double* x) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double* mr = m.row(r);
    const double ar = a[r];
    for (std::size_t c = 0; c < m.cols; ++c) mr[c] += ar * x[c];
  }
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

/// Deterministic random source. The distributions are implemented here
/// rather than taken from <random> so that streams are identical across
/// standard libraries, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tclf
