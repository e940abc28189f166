#pragma once

#include <cstdint>
#include <string>

#include "tclf/lstm.hpp"

namespace tclf::io {

/// Trained network plus the context it was produced in.
struct SavedModel {
  lstm::LstmNetwork net;
  lstm::TrainingConfig training;
  std::size_t hidden = 0;
  std::size_t train_count = 0;  // samples the network was trained on
  double step_s = 0.0;          // sampling step of the training series
};

/// Writes one JSON document with sizes, standardization statistics, all
/// weight/bias arrays (row-major) and the training configuration. The
/// round-trip is lossless at 64-bit precision.
void save_model_json(const SavedModel& model, const std::string& path);

/// Strict loader: unknown keys and shape mismatches are rejected.
SavedModel load_model_json(const std::string& path);

}  // namespace tclf::io
