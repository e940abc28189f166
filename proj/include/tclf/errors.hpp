#pragma once

#include <stdexcept>
#include <string>

namespace tclf {

/// Malformed input file (CSV/JSON); the message carries the offending
/// location (path, row or key).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure: non-finite loss, failed gradient check.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A series with zero sample variance cannot be standardized.
struct ConstantSeriesError : std::invalid_argument {
  explicit ConstantSeriesError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

}  // namespace tclf
