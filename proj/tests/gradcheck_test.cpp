// Finite-difference verification of every analytic gradient in both model
// families, in eval mode and with dropout active.
#include <gtest/gtest.h>

#include "mindgauge/classifier.hpp"
#include "mindgauge/lstm.hpp"
#include "mindgauge/transformer.hpp"
#include "support.hpp"

namespace mindgauge {
namespace {

using testing::check_gradients;

std::vector<EncodedSample> lstm_batch(const ModelConfig& cfg) {
  // Two samples, one with padding, so both the full-length path and the
  // effective-length cutoff get exercised.
  std::vector<EncodedSample> batch;
  EncodedSample a;
  a.ids = {2, 5, 3, 9, 4, 7};
  a.label = 1;
  batch.push_back(a);
  EncodedSample b;
  b.ids = {8, 3, 6, 0, 0, 0};
  b.label = 4;
  batch.push_back(b);
  return batch;
}

ModelConfig tiny_lstm_config() {
  ModelConfig cfg = ModelConfig::lstm_defaults(10, 6);
  cfg.embedding_dim = 8;
  cfg.hidden_dim = 12;
  cfg.num_layers = 2;
  cfg.dropout_prob = 0.5;
  return cfg;
}

TEST(GradCheck, LstmEvalMode) {
  const ModelConfig cfg = tiny_lstm_config();
  ParameterSet params = init_lstm_params(cfg, 3);
  const auto result = check_gradients(lstm_batch(cfg), cfg, params, false);
  EXPECT_LT(result.max_rel_err, 1e-4)
      << "worst: " << result.worst_param << "[" << result.worst_index << "]";
  EXPECT_GT(result.checked, 2000u);
}

TEST(GradCheck, LstmWithDropoutActive) {
  const ModelConfig cfg = tiny_lstm_config();
  ParameterSet params = init_lstm_params(cfg, 4);
  const auto result = check_gradients(lstm_batch(cfg), cfg, params, true, 9);
  EXPECT_LT(result.max_rel_err, 1e-4)
      << "worst: " << result.worst_param << "[" << result.worst_index << "]";
}

ModelConfig tiny_transformer_config() {
  ModelConfig cfg = ModelConfig::transformer_defaults(10, 8);
  cfg.model_dim = 16;
  cfg.num_heads = 2;
  cfg.feedforward_dim = 32;
  cfg.num_blocks = 1;
  cfg.dropout_prob = 0.3;
  return cfg;
}

std::vector<EncodedSample> transformer_batch(const ModelConfig& cfg) {
  std::vector<EncodedSample> batch;
  EncodedSample a;
  a.pair = build_pair_input({4, 7}, {2, 9, 5}, cfg.max_len, 2, 3);
  a.label = 2;
  batch.push_back(a);
  EncodedSample b;
  b.pair = build_pair_input({}, {6, 8}, cfg.max_len, 2, 3);
  b.label = 5;
  batch.push_back(b);
  return batch;
}

TEST(GradCheck, TransformerEvalMode) {
  const ModelConfig cfg = tiny_transformer_config();
  ParameterSet params = init_transformer_params(cfg, 5);
  const auto result =
      check_gradients(transformer_batch(cfg), cfg, params, false);
  EXPECT_LT(result.max_rel_err, 1e-4)
      << "worst: " << result.worst_param << "[" << result.worst_index << "]";
  EXPECT_GT(result.checked, 2000u);
}

TEST(GradCheck, TransformerWithDropoutActive) {
  const ModelConfig cfg = tiny_transformer_config();
  ParameterSet params = init_transformer_params(cfg, 6);
  const auto result =
      check_gradients(transformer_batch(cfg), cfg, params, true, 13);
  EXPECT_LT(result.max_rel_err, 1e-4)
      << "worst: " << result.worst_param << "[" << result.worst_index << "]";
}

}  // namespace
}  // namespace mindgauge
