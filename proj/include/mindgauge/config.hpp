// Flat key = value config files (toml-style: comments with '#', optional
// quotes around strings, no nesting). Unknown keys are rejected so typos
// fail loudly instead of silently training with defaults.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "mindgauge/common.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/train.hpp"

namespace mindgauge {

struct FlatConfig {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  double get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw Error("config", "key " + key + " is not a number: " + it->second);
    }
  }
  int get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw Error("config", "key " + key + " is not an integer");
    }
    return i;
  }
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw Error("config", "key " + key + " is not an unsigned integer");
    }
  }
};

namespace detail {

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline FlatConfig parse_flat_config(const std::string& text) {
  FlatConfig cfg;
  int line_no = 0;
  for (const std::string& raw : split_lines(text)) {
    ++line_no;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::strip(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config", "line " + std::to_string(line_no) +
                                " is not a key = value pair");
    }
    std::string key = detail::strip(line.substr(0, eq));
    std::string value = detail::strip(line.substr(eq + 1));
    if (key.empty()) {
      throw Error("config", "line " + std::to_string(line_no) + " has an empty key");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (cfg.values.count(key)) {
      throw Error("config", "duplicate key: " + key);
    }
    cfg.values[key] = value;
  }
  return cfg;
}

inline FlatConfig load_flat_config(const std::string& path) {
  return parse_flat_config(read_file(path));
}

// Everything the train pipeline needs, resolved from a config file with
// model-family defaults filling the gaps.
struct TrainSpec {
  ModelConfig model;
  TrainConfig train;
  InputKind input_kind = InputKind::kPosts;
  int min_frequency = 2;
};

inline TrainSpec resolve_train_spec(const FlatConfig& cfg) {
  static const std::set<std::string> known = {
      "model",         "input_kind",    "learning_rate", "num_epochs",
      "batch_size",    "clip_norm",     "beta1",         "beta2",
      "epsilon",       "seed",          "dropout_prob",  "max_len",
      "embedding_dim", "hidden_dim",    "num_layers",    "model_dim",
      "num_heads",     "feedforward_dim", "num_blocks",  "min_frequency"};
  for (const auto& [key, value] : cfg.values) {
    (void)value;
    if (!known.count(key)) throw Error("config", "unknown key: " + key);
  }
  if (!cfg.has("model")) throw Error("config", "missing required key: model");

  TrainSpec spec;
  const ModelKind kind = parse_model_kind(cfg.get_string("model", ""));
  spec.input_kind = parse_input_kind(cfg.get_string("input_kind", "posts"));
  // vocab_size is a placeholder here; the train pipeline sets it once the
  // vocabulary has been built from the training split.
  const int max_len = cfg.get_int("max_len", default_max_len(spec.input_kind));
  spec.model = kind == ModelKind::kLstm
                   ? ModelConfig::lstm_defaults(2, max_len)
                   : ModelConfig::transformer_defaults(2, max_len);
  spec.train = kind == ModelKind::kLstm ? TrainConfig::lstm_defaults()
                                        : TrainConfig::transformer_defaults();

  spec.model.dropout_prob = cfg.get_double("dropout_prob", spec.model.dropout_prob);
  spec.model.embedding_dim = cfg.get_int("embedding_dim", spec.model.embedding_dim);
  spec.model.hidden_dim = cfg.get_int("hidden_dim", spec.model.hidden_dim);
  spec.model.num_layers = cfg.get_int("num_layers", spec.model.num_layers);
  spec.model.model_dim = cfg.get_int("model_dim", spec.model.model_dim);
  spec.model.num_heads = cfg.get_int("num_heads", spec.model.num_heads);
  spec.model.feedforward_dim =
      cfg.get_int("feedforward_dim", spec.model.feedforward_dim);
  spec.model.num_blocks = cfg.get_int("num_blocks", spec.model.num_blocks);

  // Transformer runs over post bodies use a smaller default batch; long
  // sequences dominate the step cost.
  if (kind == ModelKind::kTransformer && spec.input_kind != InputKind::kTitles) {
    spec.train.batch_size = 16;
  }

  spec.train.learning_rate = cfg.get_double("learning_rate", spec.train.learning_rate);
  spec.train.num_epochs = cfg.get_int("num_epochs", spec.train.num_epochs);
  spec.train.batch_size = cfg.get_int("batch_size", spec.train.batch_size);
  spec.train.clip_norm = cfg.get_double("clip_norm", spec.train.clip_norm);
  spec.train.beta1 = cfg.get_double("beta1", spec.train.beta1);
  spec.train.beta2 = cfg.get_double("beta2", spec.train.beta2);
  spec.train.epsilon = cfg.get_double("epsilon", spec.train.epsilon);
  spec.train.seed = cfg.get_u64("seed", spec.train.seed);

  spec.min_frequency = cfg.get_int("min_frequency", 2);
  if (spec.min_frequency < 1) throw Error("config", "min_frequency must be >= 1");
  spec.train.validate();
  return spec;
}

}  // namespace mindgauge
