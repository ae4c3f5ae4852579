// Shared model machinery: architecture configuration, sequence-pair input
// construction, the softmax cross-entropy loss and inverted dropout.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mindgauge/common.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/label.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/rng.hpp"
#include "mindgauge/textproc.hpp"

namespace mindgauge {

enum class ModelKind { kLstm, kTransformer };

inline const char* model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLstm ? "lstm" : "transformer";
}

inline ModelKind parse_model_kind(std::string_view name) {
  if (name == "lstm") return ModelKind::kLstm;
  if (name == "transformer") return ModelKind::kTransformer;
  throw Error("config", "unknown model kind '" + std::string(name) + "'");
}

enum class InputKind { kPosts, kTitles, kPostsTitles };

inline const char* input_kind_name(InputKind kind) {
  switch (kind) {
    case InputKind::kPosts: return "posts";
    case InputKind::kTitles: return "titles";
    case InputKind::kPostsTitles: return "posts+titles";
  }
  throw Error("config", "invalid input kind");
}

inline InputKind parse_input_kind(std::string_view name) {
  if (name == "posts") return InputKind::kPosts;
  if (name == "titles") return InputKind::kTitles;
  if (name == "posts+titles" || name == "posts_titles") return InputKind::kPostsTitles;
  throw Error("config", "unknown input kind '" + std::string(name) + "'");
}

// Sequence length defaults: 35 for titles, 512 otherwise.
inline int default_max_len(InputKind kind) {
  return kind == InputKind::kTitles ? 35 : 512;
}

struct ModelConfig {
  ModelKind kind = ModelKind::kLstm;
  int vocab_size = 0;
  int num_classes = kNumClasses;
  int max_len = 512;
  double dropout_prob = 0.5;

  // LSTM
  int embedding_dim = 100;
  int hidden_dim = 256;
  int num_layers = 2;

  // Transformer
  int model_dim = 64;
  int num_heads = 4;
  int feedforward_dim = 128;
  int num_blocks = 2;

  static ModelConfig lstm_defaults(int vocab_size, int max_len = 512) {
    ModelConfig c;
    c.kind = ModelKind::kLstm;
    c.vocab_size = vocab_size;
    c.max_len = max_len;
    c.dropout_prob = 0.5;
    return c;
  }

  static ModelConfig transformer_defaults(int vocab_size, int max_len = 512) {
    ModelConfig c;
    c.kind = ModelKind::kTransformer;
    c.vocab_size = vocab_size;
    c.max_len = max_len;
    c.dropout_prob = 0.3;
    return c;
  }

  void validate() const {
    if (vocab_size < 2) throw Error("config", "vocab_size must cover pad and unk");
    if (num_classes < 2) throw Error("config", "num_classes must be >= 2");
    if (max_len < 1) throw Error("config", "max_len must be positive");
    if (dropout_prob < 0.0 || dropout_prob >= 1.0) {
      throw Error("config", "dropout_prob must lie in [0, 1)");
    }
    if (kind == ModelKind::kLstm) {
      if (embedding_dim < 1 || hidden_dim < 1 || num_layers < 1) {
        throw Error("config", "lstm dimensions must be positive");
      }
    } else {
      if (model_dim < 1 || num_heads < 1 || feedforward_dim < 1 || num_blocks < 1) {
        throw Error("config", "transformer dimensions must be positive");
      }
      if (model_dim % num_heads != 0) {
        throw Error("config", "model_dim must be divisible by num_heads");
      }
    }
  }
};

// ---- Sequence-pair input -------------------------------------------------

// [BEGIN] A [SEP] B [SEP] plus right padding. Segment ids are 0 for the A
// (title) side including the begin marker, 1 for the B (post) side. The mask
// is 1 on real tokens and markers, 0 on padding.
struct PairInput {
  std::vector<int> ids;
  std::vector<int> segments;
  std::vector<int> mask;

  int length() const { return static_cast<int>(ids.size()); }

  int real_length() const {
    int n = 0;
    while (n < length() && mask[static_cast<size_t>(n)] == 1) ++n;
    return n;
  }
};

// Builds the pair layout. When the budget is exceeded the post segment (B)
// is truncated first, down to a single token if necessary, before the title
// is touched. Empty segments degenerate to a single-segment layout.
inline PairInput build_pair_input(const std::vector<int>& title_ids,
                                  const std::vector<int>& post_ids, int max_len,
                                  int begin_id, int sep_id) {
  if (max_len < 8) throw Error("length", "pair input needs max_len >= 8");
  const size_t a_len = title_ids.size();
  const size_t b_len = post_ids.size();
  const size_t overhead = 1 + (a_len > 0 ? 1 : 0) + (b_len > 0 ? 1 : 0);
  const size_t budget = static_cast<size_t>(max_len) - overhead;

  size_t keep_a = a_len;
  size_t keep_b = b_len;
  if (keep_a + keep_b > budget) {
    if (b_len > 0) {
      keep_b = keep_a >= budget ? 1 : std::min(keep_b, budget - keep_a);
    }
    if (keep_a + keep_b > budget) keep_a = budget - keep_b;
  }

  PairInput pair;
  pair.ids.reserve(static_cast<size_t>(max_len));
  pair.segments.reserve(static_cast<size_t>(max_len));
  const auto push = [&](int id, int seg) {
    pair.ids.push_back(id);
    pair.segments.push_back(seg);
  };
  push(begin_id, 0);
  for (size_t i = 0; i < keep_a; ++i) push(title_ids[i], 0);
  if (a_len > 0) push(sep_id, 0);
  for (size_t i = 0; i < keep_b; ++i) push(post_ids[i], 1);
  if (b_len > 0) push(sep_id, 1);

  pair.mask.assign(pair.ids.size(), 1);
  while (pair.ids.size() < static_cast<size_t>(max_len)) {
    push(Vocabulary::kPadId, 0);
    pair.mask.push_back(0);
  }
  return pair;
}

// ---- Loss ----------------------------------------------------------------

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct LossGrad {
  double loss = 0.0;
  std::vector<double> logit_grad;
};

// Negative log softmax probability of the true class, with max-subtraction
// stabilization. Gradient is softmax(logits) - one_hot(label).
inline LossGrad softmax_cross_entropy(const std::vector<double>& logits,
                                      int true_label) {
  for (double v : logits) {
    if (!std::isfinite(v)) throw Error("numeric", "non-finite logit");
  }
  if (true_label < 0 || true_label >= static_cast<int>(logits.size())) {
    throw Error("label", "true label out of range");
  }
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double log_sum = std::log(sum) + mx;

  LossGrad out;
  out.loss = log_sum - logits[static_cast<size_t>(true_label)];
  out.logit_grad.resize(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    out.logit_grad[i] = std::exp(logits[i] - log_sum);
  }
  out.logit_grad[static_cast<size_t>(true_label)] -= 1.0;
  return out;
}

// ---- Dropout -------------------------------------------------------------

// Inverted dropout multipliers: 0 with probability prob, otherwise
// 1/(1-prob). Eval mode and prob 0 are the identity.
inline std::vector<double> make_dropout_mask(size_t n, double prob, Rng& rng) {
  std::vector<double> mask(n, 1.0);
  if (prob <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - prob);
  for (double& m : mask) m = rng.uniform() < prob ? 0.0 : keep_scale;
  return mask;
}

inline std::vector<double> dropout(const std::vector<double>& activations,
                                   double prob, std::uint64_t seed,
                                   bool train_mode) {
  if (prob < 0.0 || prob >= 1.0) throw Error("config", "dropout prob out of range");
  if (!train_mode || prob == 0.0) return activations;
  Rng rng(seed);
  const auto mask = make_dropout_mask(activations.size(), prob, rng);
  std::vector<double> out(activations.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = activations[i] * mask[i];
  return out;
}

// ---- Encoded samples -----------------------------------------------------

// One classifier input. LSTMs consume the flat id sequence, transformers the
// pair layout; the encoder fills the member the model kind needs.
struct EncodedSample {
  std::vector<int> ids;
  PairInput pair;
  int label = 0;
};

inline std::vector<int> to_ids(const std::vector<std::string>& tokens,
                               const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id_of(t));
  return ids;
}

inline std::vector<int> fit_length(std::vector<int> ids, int max_len) {
  ids.resize(static_cast<size_t>(max_len), Vocabulary::kPadId);
  return ids;
}

// Builds the model input for one post. For the LSTM the posts+titles mode is
// title tokens, a separator marker, then post tokens, tail-truncated to
// max_len; the transformer always receives a pair layout (degenerate
// single-segment for posts-only or titles-only).
inline EncodedSample encode_post(const CuratedPost& post, InputKind input_kind,
                                 const ModelConfig& cfg, const Vocabulary& vocab) {
  EncodedSample sample;
  sample.label = label_code(post.label);
  const auto title_ids = to_ids(tokenize(post.title), vocab);
  const auto body_ids = to_ids(tokenize(post.body), vocab);

  if (cfg.kind == ModelKind::kLstm) {
    switch (input_kind) {
      case InputKind::kPosts:
        sample.ids = fit_length(body_ids, cfg.max_len);
        break;
      case InputKind::kTitles:
        sample.ids = fit_length(title_ids, cfg.max_len);
        break;
      case InputKind::kPostsTitles: {
        std::vector<int> joined = title_ids;
        joined.push_back(vocab.sep_id());
        joined.insert(joined.end(), body_ids.begin(), body_ids.end());
        sample.ids = fit_length(std::move(joined), cfg.max_len);
        break;
      }
    }
  } else {
    switch (input_kind) {
      case InputKind::kPosts:
        sample.pair = build_pair_input({}, body_ids, cfg.max_len,
                                       vocab.begin_id(), vocab.sep_id());
        break;
      case InputKind::kTitles:
        sample.pair = build_pair_input(title_ids, {}, cfg.max_len,
                                       vocab.begin_id(), vocab.sep_id());
        break;
      case InputKind::kPostsTitles:
        sample.pair = build_pair_input(title_ids, body_ids, cfg.max_len,
                                       vocab.begin_id(), vocab.sep_id());
        break;
    }
  }
  return sample;
}

}  // namespace mindgauge
