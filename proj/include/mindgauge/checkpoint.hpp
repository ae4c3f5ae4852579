// Checkpoint files: model configuration, input kind, vocabulary, and every
// named parameter tensor, wrapped in versioned JSON. The format is stable;
// loaders reject unknown versions instead of guessing.
#pragma once

#include <string>
#include <vector>

#include "mindgauge/common.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/textproc.hpp"

#include <nlohmann/json.hpp>

namespace mindgauge {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  InputKind input_kind = InputKind::kPosts;
  Vocabulary vocab;
  ParameterSet params;
};

inline nlohmann::ordered_json model_config_to_json(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = model_kind_name(cfg.kind);
  j["vocab_size"] = cfg.vocab_size;
  j["num_classes"] = cfg.num_classes;
  j["max_len"] = cfg.max_len;
  j["dropout_prob"] = cfg.dropout_prob;
  j["embedding_dim"] = cfg.embedding_dim;
  j["hidden_dim"] = cfg.hidden_dim;
  j["num_layers"] = cfg.num_layers;
  j["model_dim"] = cfg.model_dim;
  j["num_heads"] = cfg.num_heads;
  j["feedforward_dim"] = cfg.feedforward_dim;
  j["num_blocks"] = cfg.num_blocks;
  return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.kind = parse_model_kind(j.at("kind").get<std::string>());
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.num_classes = j.at("num_classes").get<int>();
  cfg.max_len = j.at("max_len").get<int>();
  cfg.dropout_prob = j.at("dropout_prob").get<double>();
  cfg.embedding_dim = j.at("embedding_dim").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.num_layers = j.at("num_layers").get<int>();
  cfg.model_dim = j.at("model_dim").get<int>();
  cfg.num_heads = j.at("num_heads").get<int>();
  cfg.feedforward_dim = j.at("feedforward_dim").get<int>();
  cfg.num_blocks = j.at("num_blocks").get<int>();
  cfg.validate();
  return cfg;
}

inline nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::ordered_json j;
  j["format"] = "mindgauge-checkpoint";
  j["version"] = kCheckpointVersion;
  j["model"] = model_config_to_json(ckpt.config);
  j["input_kind"] = input_kind_name(ckpt.input_kind);
  j["vocab"] = ckpt.vocab.to_json();
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (size_t i = 0; i < ckpt.params.count(); ++i) {
    const Param& p = ckpt.params.param(i);
    nlohmann::ordered_json t;
    t["name"] = ckpt.params.names()[i];
    t["shape"] = p.shape;
    t["values"] = p.value;
    tensors.push_back(std::move(t));
  }
  j["tensors"] = std::move(tensors);
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "mindgauge-checkpoint") {
    throw Error("format", "not a checkpoint file");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw Error("format", "unsupported checkpoint version");
  }
  Checkpoint ckpt;
  ckpt.config = model_config_from_json(j.at("model"));
  ckpt.input_kind = parse_input_kind(j.at("input_kind").get<std::string>());
  ckpt.vocab = Vocabulary::from_json(j.at("vocab"));
  for (const auto& t : j.at("tensors")) {
    const auto name = t.at("name").get<std::string>();
    const auto shape = t.at("shape").get<std::vector<size_t>>();
    ckpt.params.add(name, shape);
    Param& p = ckpt.params.at(name);
    const auto values = t.at("values").get<std::vector<double>>();
    if (values.size() != p.value.size()) {
      throw Error("shape", "tensor " + name + " has wrong element count");
    }
    p.value = values;
  }
  return ckpt;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_json(ckpt).dump());
}

inline Checkpoint load_checkpoint(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("format", std::string("checkpoint parse failure: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace mindgauge
