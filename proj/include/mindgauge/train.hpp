// Training loop: Adam with bias correction, optional global-norm gradient
// clipping, per-epoch seeded shuffling, and best-validation checkpointing.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mindgauge/classifier.hpp"
#include "mindgauge/common.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/rng.hpp"

namespace mindgauge {

struct TrainConfig {
  double learning_rate = 0.005;
  int num_epochs = 25;
  int batch_size = 32;
  double clip_norm = 5.0;  // 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 42;

  void validate() const {
    if (learning_rate < 0.0) throw Error("config", "learning_rate must be >= 0");
    if (num_epochs < 1) throw Error("config", "num_epochs must be >= 1");
    if (batch_size < 1) throw Error("config", "batch_size must be >= 1");
    if (clip_norm < 0.0) throw Error("config", "clip_norm must be >= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
      throw Error("config", "betas must lie in [0, 1)");
    }
    if (epsilon <= 0.0) throw Error("config", "epsilon must be > 0");
  }

  // Learning-rate and schedule defaults per model family. The transformer
  // profile here is the from-scratch one; fine-tuning style runs use a much
  // smaller rate via config files.
  static TrainConfig lstm_defaults() { return TrainConfig{}; }
  static TrainConfig transformer_defaults() {
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.num_epochs = 10;
    cfg.clip_norm = 0.0;
    return cfg;
  }
};

// First and second moment buffers, one slot per parameter tensor in
// registration order.
struct AdamState {
  std::int64_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState init(const ParameterSet& params) {
    AdamState st;
    st.m.resize(params.count());
    st.v.resize(params.count());
    for (size_t i = 0; i < params.count(); ++i) {
      const size_t n = params.param(i).value.size();
      st.m[i].assign(n, 0.0);
      st.v[i].assign(n, 0.0);
    }
    return st;
  }
};

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm. max_norm <= 0 leaves gradients untouched.
inline double clip_gradients(ParameterSet& params, double max_norm) {
  const double norm = params.grad_norm();
  if (max_norm <= 0.0 || norm <= max_norm || norm == 0.0) return norm;
  const double scale = max_norm / norm;
  for (size_t i = 0; i < params.count(); ++i) {
    for (double& g : params.param(i).grad) g *= scale;
  }
  return norm;
}

// One bias-corrected Adam update. Rejects non-finite gradients before
// touching any state so a bad batch cannot poison the moments.
inline void adam_step(ParameterSet& params, AdamState& state,
                      const TrainConfig& cfg) {
  if (state.m.size() != params.count() || state.v.size() != params.count()) {
    throw Error("shape", "optimizer state does not match parameter set");
  }
  if (!params.grads_finite()) {
    throw Error("numeric", "non-finite gradient in adam_step");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.count(); ++i) {
    Param& p = params.param(i);
    std::vector<double>& m = state.m[i];
    std::vector<double>& v = state.v[i];
    if (m.size() != p.value.size()) {
      throw Error("shape", "optimizer slot size mismatch");
    }
    for (size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p.value[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    }
  }
}

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::string status = "ok";  // "ok" or "diverged"
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Runs the full loop and leaves `params` at the weights of the epoch with
// the highest validation accuracy (earliest epoch wins ties). If the mean
// train loss ever goes non-finite the loop stops, reports "diverged", and
// still restores the best finite-epoch weights.
inline TrainResult train_model(const std::vector<EncodedSample>& train_set,
                               const std::vector<EncodedSample>& val_set,
                               const ModelConfig& model_cfg,
                               const TrainConfig& train_cfg,
                               ParameterSet& params,
                               const EpochCallback& on_epoch = nullptr) {
  if (train_set.empty()) throw Error("empty", "training set is empty");
  if (val_set.empty()) throw Error("empty", "validation set is empty");
  model_cfg.validate();
  train_cfg.validate();
  check_shapes(model_cfg, params);

  AdamState opt = AdamState::init(params);
  TrainResult result;
  ParameterSet best = params;
  result.best_val_accuracy = -1.0;

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::uint64_t step_counter = 0;

  for (int epoch = 1; epoch <= train_cfg.num_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(train_cfg.seed, "epoch" + std::to_string(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    size_t sample_count = 0;
    bool finite = true;
    std::vector<EncodedSample> batch;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(train_cfg.batch_size)) {
      const size_t stop = std::min(
          order.size(), start + static_cast<size_t>(train_cfg.batch_size));
      batch.assign(stop - start, {});
      for (size_t i = start; i < stop; ++i) batch[i - start] = train_set[order[i]];

      const std::uint64_t batch_seed =
          derive_seed(train_cfg.seed, "step" + std::to_string(step_counter));
      ++step_counter;
      const double loss =
          batch_gradients(batch, model_cfg, params, true, batch_seed);
      if (!std::isfinite(loss) || !params.grads_finite()) {
        finite = false;
        break;
      }
      if (train_cfg.clip_norm > 0.0) clip_gradients(params, train_cfg.clip_norm);
      adam_step(params, opt, train_cfg);
      loss_sum += loss * static_cast<double>(batch.size());
      sample_count += batch.size();
    }

    if (!finite || !params.values_finite()) {
      result.status = "diverged";
      break;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(sample_count);
    rec.val_accuracy = accuracy(val_set, model_cfg, params);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = rec.val_accuracy;
      result.best_epoch = epoch;
      best = params;
    }
  }

  if (result.best_epoch == 0) {
    // No epoch finished cleanly; keep the initial weights.
    result.best_val_accuracy = 0.0;
  }
  params = best;
  return result;
}

inline std::string history_to_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_acc\n";
  char buf[96];
  for (const EpochRecord& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f\n", r.epoch, r.train_loss,
                  r.val_accuracy);
    out += buf;
  }
  return out;
}

}  // namespace mindgauge
