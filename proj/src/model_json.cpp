#include "tclf/model_json.hpp"

#include <cmath>
#include <fstream>

#include "json_util.hpp"

namespace tclf::io {

namespace {

json vec_to_json(const Vec& v) { return json(v); }

Vec json_to_vec(const json& arr, const std::string& ctx, std::size_t expected) {
  if (!arr.is_array())
    throw ParseError(ctx + ": expected an array");
  if (arr.size() != expected)
    throw ParseError(ctx + ": expected " + std::to_string(expected) +
                     " entries, got " + std::to_string(arr.size()));
  Vec out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_number()) throw ParseError(ctx + ": non-numeric entry");
    const double v = e.get<double>();
    if (!std::isfinite(v)) throw ParseError(ctx + ": non-finite entry");
    out.push_back(v);
  }
  return out;
}

// One fixed naming scheme for the weight blocks, matching the flat
// parameter order.
template <typename Net, typename VecPtr>
struct NamedBlockT {
  const char* name;
  VecPtr data;
};

std::vector<NamedBlockT<lstm::LstmNetwork, Vec*>> weight_blocks(lstm::LstmNetwork& net) {
  return {
      {"W_f", &net.lstm.forget.W.data},     {"R_f", &net.lstm.forget.R.data},
      {"b_f", &net.lstm.forget.b},          {"W_g", &net.lstm.cand.W.data},
      {"R_g", &net.lstm.cand.R.data},       {"b_g", &net.lstm.cand.b},
      {"W_i", &net.lstm.input_gate.W.data}, {"R_i", &net.lstm.input_gate.R.data},
      {"b_i", &net.lstm.input_gate.b},      {"W_o", &net.lstm.output.W.data},
      {"R_o", &net.lstm.output.R.data},     {"b_o", &net.lstm.output.b},
      {"W_fc", &net.dense.W.data},          {"b_fc", &net.dense.b},
  };
}

std::vector<NamedBlockT<const lstm::LstmNetwork, const Vec*>> weight_blocks(
    const lstm::LstmNetwork& net) {
  return {
      {"W_f", &net.lstm.forget.W.data},     {"R_f", &net.lstm.forget.R.data},
      {"b_f", &net.lstm.forget.b},          {"W_g", &net.lstm.cand.W.data},
      {"R_g", &net.lstm.cand.R.data},       {"b_g", &net.lstm.cand.b},
      {"W_i", &net.lstm.input_gate.W.data}, {"R_i", &net.lstm.input_gate.R.data},
      {"b_i", &net.lstm.input_gate.b},      {"W_o", &net.lstm.output.W.data},
      {"R_o", &net.lstm.output.R.data},     {"b_o", &net.lstm.output.b},
      {"W_fc", &net.dense.W.data},          {"b_fc", &net.dense.b},
  };
}

}  // namespace

void save_model_json(const SavedModel& model, const std::string& path) {
  json doc;
  doc["hidden"] = model.net.hidden_size();
  doc["input"] = model.net.input_size();
  doc["output"] = model.net.output_size();
  doc["mu"] = model.net.mu;
  doc["sigma"] = model.net.sigma;

  json weights = json::object();
  for (const auto& block : weight_blocks(model.net))
    weights[block.name] = vec_to_json(*block.data);
  doc["weights"] = weights;

  doc["training"] = {
      {"epochs", model.training.epochs},
      {"learning_rate", model.training.learning_rate},
      {"beta1", model.training.beta1},
      {"beta2", model.training.beta2},
      {"epsilon", model.training.epsilon},
      {"clip_norm", model.training.clip_norm},
      {"seed", model.training.seed},
      {"train_count", model.train_count},
      {"step_s", model.step_s},
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << doc.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SavedModel load_model_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }

  check_keys(doc, path, {"hidden", "input", "output", "mu", "sigma", "weights", "training"});
  const auto H = static_cast<std::size_t>(get_uint(doc, path, "hidden", 0));
  const auto I = static_cast<std::size_t>(get_uint(doc, path, "input", 0));
  const auto O = static_cast<std::size_t>(get_uint(doc, path, "output", 0));
  if (H == 0 || I == 0 || O == 0)
    throw ParseError(path + ": hidden/input/output must be >= 1");

  SavedModel model;
  model.hidden = H;
  model.net = lstm::init_params(H, I, O, 0);  // shapes only; weights overwritten below
  model.net.mu = get_num(doc, path, "mu", 0.0);
  model.net.sigma = get_num(doc, path, "sigma", 1.0);
  if (!(model.net.sigma > 0.0)) throw ParseError(path + ": sigma must be > 0");

  if (!doc.contains("weights")) throw ParseError(path + ": missing 'weights'");
  const json& weights = doc.at("weights");
  check_keys(weights, path + ".weights",
             {"W_f", "R_f", "b_f", "W_g", "R_g", "b_g", "W_i", "R_i", "b_i",
              "W_o", "R_o", "b_o", "W_fc", "b_fc"});
  for (auto& block : weight_blocks(model.net)) {
    if (!weights.contains(block.name))
      throw ParseError(path + ".weights: missing '" + std::string(block.name) + "'");
    const std::size_t expected = block.data->size();
    *block.data = json_to_vec(weights.at(block.name),
                              path + ".weights." + block.name, expected);
  }

  if (!doc.contains("training")) throw ParseError(path + ": missing 'training'");
  const json& tr = doc.at("training");
  const std::string ctx = path + ".training";
  check_keys(tr, ctx,
             {"epochs", "learning_rate", "beta1", "beta2", "epsilon", "clip_norm",
              "seed", "train_count", "step_s"});
  model.training.epochs = static_cast<int>(get_int(tr, ctx, "epochs", 250));
  model.training.learning_rate = get_num(tr, ctx, "learning_rate", 0.005);
  model.training.beta1 = get_num(tr, ctx, "beta1", 0.9);
  model.training.beta2 = get_num(tr, ctx, "beta2", 0.999);
  model.training.epsilon = get_num(tr, ctx, "epsilon", 1e-8);
  model.training.clip_norm = get_num(tr, ctx, "clip_norm", 1.0);
  model.training.seed = get_uint(tr, ctx, "seed", 0);
  model.train_count = static_cast<std::size_t>(get_uint(tr, ctx, "train_count", 0));
  model.step_s = get_num(tr, ctx, "step_s", 0.0);
  model.training.validate();
  return model;
}

}  // namespace tclf::io
