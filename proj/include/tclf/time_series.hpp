#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tclf {

/// Fixed-step sampled series. Sample k sits at t = start_s + k * step_s.
struct TimeSeries {
  double step_s = 1.0;
  double start_s = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time_at(std::size_t k) const {
    return start_s + static_cast<double>(k) * step_s;
  }

  void validate() const {
    if (step_s <= 0.0) throw std::invalid_argument("TimeSeries: step must be > 0");
    if (values.empty()) throw std::invalid_argument("TimeSeries: no samples");
    for (double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("TimeSeries: non-finite value");
    }
  }
};

}  // namespace tclf
