// Model-agnostic entry points: parameter initialisation, batch loss and
// gradients, and prediction, dispatching on the configured model kind.
#pragma once

#include <cstdint>
#include <vector>

#include "mindgauge/lstm.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/rng.hpp"
#include "mindgauge/transformer.hpp"

namespace mindgauge {

inline ParameterSet init_params(const ModelConfig& cfg, std::uint64_t seed) {
  return cfg.kind == ModelKind::kLstm ? init_lstm_params(cfg, seed)
                                      : init_transformer_params(cfg, seed);
}

inline void check_shapes(const ModelConfig& cfg, const ParameterSet& params) {
  if (cfg.kind == ModelKind::kLstm) {
    check_lstm_shapes(cfg, params);
  } else {
    check_transformer_shapes(cfg, params);
  }
}

inline std::vector<double> forward_logits(const EncodedSample& sample,
                                          const ModelConfig& cfg,
                                          const ParameterSet& params,
                                          bool train_mode = false,
                                          Rng* dropout_rng = nullptr) {
  if (cfg.kind == ModelKind::kLstm) {
    return lstm_forward(sample.ids, cfg, params, train_mode, dropout_rng);
  }
  return transformer_forward(sample.pair, cfg, params, train_mode, dropout_rng);
}

// Mean cross-entropy over the batch; gradients are zeroed first and come out
// already scaled by 1/batch_size. The dropout stream is a pure function of
// the seed and the batch order.
inline double batch_gradients(const std::vector<EncodedSample>& batch,
                              const ModelConfig& cfg, ParameterSet& params,
                              bool train_mode, std::uint64_t seed) {
  if (batch.empty()) throw Error("empty", "batch_gradients needs samples");
  params.zero_grads();
  Rng dropout_rng(derive_seed(seed, "dropout"));
  Rng* rng_ptr = train_mode ? &dropout_rng : nullptr;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total_loss = 0.0;
  for (const EncodedSample& sample : batch) {
    std::vector<double> dlogits;
    if (cfg.kind == ModelKind::kLstm) {
      LstmCache cache;
      const auto logits =
          lstm_forward(sample.ids, cfg, params, train_mode, rng_ptr, &cache);
      LossGrad lg = softmax_cross_entropy(logits, sample.label);
      total_loss += lg.loss;
      dlogits = std::move(lg.logit_grad);
      for (double& g : dlogits) g *= inv_b;
      lstm_backward(cache, dlogits, cfg, params);
    } else {
      TransformerCache cache;
      const auto logits = transformer_forward(sample.pair, cfg, params,
                                              train_mode, rng_ptr, &cache);
      LossGrad lg = softmax_cross_entropy(logits, sample.label);
      total_loss += lg.loss;
      dlogits = std::move(lg.logit_grad);
      for (double& g : dlogits) g *= inv_b;
      transformer_backward(cache, dlogits, cfg, params);
    }
  }
  return total_loss * inv_b;
}

// Mean loss only, no gradient work. Matches batch_gradients' dropout stream
// so finite-difference checks in train mode see the same masks.
inline double batch_loss(const std::vector<EncodedSample>& batch,
                         const ModelConfig& cfg, const ParameterSet& params,
                         bool train_mode, std::uint64_t seed) {
  if (batch.empty()) throw Error("empty", "batch_loss needs samples");
  Rng dropout_rng(derive_seed(seed, "dropout"));
  Rng* rng_ptr = train_mode ? &dropout_rng : nullptr;
  double total_loss = 0.0;
  for (const EncodedSample& sample : batch) {
    const auto logits = forward_logits(sample, cfg, params, train_mode, rng_ptr);
    total_loss += softmax_cross_entropy(logits, sample.label).loss;
  }
  return total_loss / static_cast<double>(batch.size());
}

// Argmax over logits; ties go to the lowest class index.
inline Label predict(const EncodedSample& sample, const ModelConfig& cfg,
                     const ParameterSet& params) {
  const auto logits = forward_logits(sample, cfg, params);
  size_t best = 0;
  for (size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return label_from_code(static_cast<int>(best));
}

inline std::vector<Label> predict_all(const std::vector<EncodedSample>& samples,
                                      const ModelConfig& cfg,
                                      const ParameterSet& params) {
  std::vector<Label> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(predict(s, cfg, params));
  return out;
}

inline double accuracy(const std::vector<EncodedSample>& samples,
                       const ModelConfig& cfg, const ParameterSet& params) {
  if (samples.empty()) throw Error("empty", "accuracy needs samples");
  size_t hits = 0;
  for (const auto& s : samples) {
    if (label_code(predict(s, cfg, params)) == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace mindgauge
