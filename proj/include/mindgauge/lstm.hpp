// Two-layer (configurable) unidirectional LSTM classifier with manual
// backpropagation through time. The classification head reads the hidden
// state at the last non-padding timestep.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/rng.hpp"
#include "mindgauge/textproc.hpp"

namespace mindgauge {

namespace detail {

inline void check_param(const ParameterSet& params, const std::string& name,
                        const std::vector<std::size_t>& shape) {
  if (!params.has(name)) throw Error("shape", "missing parameter " + name);
  const Param& p = params.at(name);
  if (p.shape != shape || p.value.size() != shape_size(shape)) {
    throw Error("shape", "parameter " + name + " has unexpected shape");
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y += W x for row-major W [rows x cols].
inline void addmv(std::vector<double>& y, const std::vector<double>& w,
                  const double* x, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i) {
    const double* wi = &w[i * cols];
    double acc = 0.0;
    for (size_t j = 0; j < cols; ++j) acc += wi[j] * x[j];
    y[i] += acc;
  }
}

// y += W^T d.
inline void addmv_t(double* y, const std::vector<double>& w,
                    const std::vector<double>& d, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    const double* wi = &w[i * cols];
    for (size_t j = 0; j < cols; ++j) y[j] += wi[j] * di;
  }
}

// dW += d x^T.
inline void add_outer(std::vector<double>& dw, const std::vector<double>& d,
                      const double* x, size_t rows, size_t cols) {
  for (size_t i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0.0) continue;
    double* dwi = &dw[i * cols];
    for (size_t j = 0; j < cols; ++j) dwi[j] += di * x[j];
  }
}

}  // namespace detail

inline std::string lstm_layer_name(int layer, const char* part) {
  return "lstm" + std::to_string(layer) + "." + part;
}

// Registers embedding, per-layer gate weights (rows packed i|f|g|o) and the
// linear head. Everything is drawn uniform in [-0.08, 0.08].
inline ParameterSet init_lstm_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto v = static_cast<size_t>(cfg.vocab_size);
  const auto e = static_cast<size_t>(cfg.embedding_dim);
  const auto h = static_cast<size_t>(cfg.hidden_dim);
  const auto c = static_cast<size_t>(cfg.num_classes);

  ParameterSet params;
  params.add("embedding", {v, e});
  for (int l = 0; l < cfg.num_layers; ++l) {
    const size_t in_dim = l == 0 ? e : h;
    params.add(lstm_layer_name(l, "W"), {4 * h, in_dim});
    params.add(lstm_layer_name(l, "U"), {4 * h, h});
    params.add(lstm_layer_name(l, "b"), {4 * h});
  }
  params.add("head.W", {c, h});
  params.add("head.b", {c});

  Rng rng(seed);
  for (size_t i = 0; i < params.count(); ++i) {
    for (double& x : params.param(i).value) x = rng.uniform(-0.08, 0.08);
  }
  return params;
}

inline void check_lstm_shapes(const ModelConfig& cfg, const ParameterSet& params) {
  const auto v = static_cast<size_t>(cfg.vocab_size);
  const auto e = static_cast<size_t>(cfg.embedding_dim);
  const auto h = static_cast<size_t>(cfg.hidden_dim);
  const auto c = static_cast<size_t>(cfg.num_classes);
  detail::check_param(params, "embedding", {v, e});
  for (int l = 0; l < cfg.num_layers; ++l) {
    const size_t in_dim = l == 0 ? e : h;
    detail::check_param(params, lstm_layer_name(l, "W"), {4 * h, in_dim});
    detail::check_param(params, lstm_layer_name(l, "U"), {4 * h, h});
    detail::check_param(params, lstm_layer_name(l, "b"), {4 * h});
  }
  detail::check_param(params, "head.W", {c, h});
  detail::check_param(params, "head.b", {c});
}

struct LstmCache {
  std::vector<int> ids;
  int effective_len = 0;
  struct Layer {
    // [t][H] gate activations and states
    std::vector<std::vector<double>> i, f, g, o, c, h;
  };
  std::vector<Layer> layers;
  std::vector<double> final_hidden;
  std::vector<double> dropout_mask;  // empty => identity
  std::vector<double> head_input;
  std::vector<double> logits;
};

// Forward pass over the non-padding prefix of the input. In train mode a
// dropout mask drawn from dropout_rng is applied to the final hidden state
// before the head; pass nullptr (or eval mode) for the identity.
inline std::vector<double> lstm_forward(const std::vector<int>& ids,
                                        const ModelConfig& cfg,
                                        const ParameterSet& params,
                                        bool train_mode = false,
                                        Rng* dropout_rng = nullptr,
                                        LstmCache* cache = nullptr) {
  if (static_cast<int>(ids.size()) != cfg.max_len) {
    throw Error("shape", "input length does not match max_len");
  }
  check_lstm_shapes(cfg, params);
  const auto e = static_cast<size_t>(cfg.embedding_dim);
  const auto h = static_cast<size_t>(cfg.hidden_dim);
  const auto num_classes = static_cast<size_t>(cfg.num_classes);

  int effective = 0;
  for (int t = 0; t < cfg.max_len; ++t) {
    if (ids[static_cast<size_t>(t)] != Vocabulary::kPadId) effective = t + 1;
  }

  LstmCache local;
  LstmCache& cc = cache ? *cache : local;
  cc.ids = ids;
  cc.effective_len = effective;
  cc.layers.assign(static_cast<size_t>(cfg.num_layers), {});

  const Param& emb = params.at("embedding");
  std::vector<double> gates(4 * h);

  for (int l = 0; l < cfg.num_layers; ++l) {
    auto& layer = cc.layers[static_cast<size_t>(l)];
    const size_t in_dim = l == 0 ? e : h;
    const Param& w = params.at(lstm_layer_name(l, "W"));
    const Param& u = params.at(lstm_layer_name(l, "U"));
    const Param& b = params.at(lstm_layer_name(l, "b"));
    layer.i.assign(static_cast<size_t>(effective), std::vector<double>(h));
    layer.f.assign(static_cast<size_t>(effective), std::vector<double>(h));
    layer.g.assign(static_cast<size_t>(effective), std::vector<double>(h));
    layer.o.assign(static_cast<size_t>(effective), std::vector<double>(h));
    layer.c.assign(static_cast<size_t>(effective), std::vector<double>(h));
    layer.h.assign(static_cast<size_t>(effective), std::vector<double>(h));

    std::vector<double> h_prev(h, 0.0);
    std::vector<double> c_prev(h, 0.0);
    for (int t = 0; t < effective; ++t) {
      const size_t tt = static_cast<size_t>(t);
      const double* x =
          l == 0 ? &emb.value[static_cast<size_t>(ids[tt]) * e]
                 : cc.layers[static_cast<size_t>(l - 1)].h[tt].data();
      gates = b.value;
      detail::addmv(gates, w.value, x, 4 * h, in_dim);
      detail::addmv(gates, u.value, h_prev.data(), 4 * h, h);
      for (size_t k = 0; k < h; ++k) {
        const double gi = detail::sigmoid(gates[k]);
        const double gf = detail::sigmoid(gates[h + k]);
        const double gg = std::tanh(gates[2 * h + k]);
        const double go = detail::sigmoid(gates[3 * h + k]);
        const double cnew = gf * c_prev[k] + gi * gg;
        layer.i[tt][k] = gi;
        layer.f[tt][k] = gf;
        layer.g[tt][k] = gg;
        layer.o[tt][k] = go;
        layer.c[tt][k] = cnew;
        layer.h[tt][k] = go * std::tanh(cnew);
      }
      h_prev = layer.h[tt];
      c_prev = layer.c[tt];
    }
  }

  cc.final_hidden.assign(h, 0.0);
  if (effective > 0) {
    cc.final_hidden =
        cc.layers[static_cast<size_t>(cfg.num_layers - 1)]
            .h[static_cast<size_t>(effective - 1)];
  }

  cc.head_input = cc.final_hidden;
  cc.dropout_mask.clear();
  if (train_mode && cfg.dropout_prob > 0.0 && dropout_rng) {
    cc.dropout_mask = make_dropout_mask(h, cfg.dropout_prob, *dropout_rng);
    for (size_t k = 0; k < h; ++k) cc.head_input[k] *= cc.dropout_mask[k];
  }

  const Param& head_w = params.at("head.W");
  const Param& head_b = params.at("head.b");
  cc.logits = head_b.value;
  detail::addmv(cc.logits, head_w.value, cc.head_input.data(), num_classes, h);
  return cc.logits;
}

// Accumulates parameter gradients for one sequence given the gradient of the
// loss with respect to the logits.
inline void lstm_backward(const LstmCache& cache,
                          const std::vector<double>& dlogits,
                          const ModelConfig& cfg, ParameterSet& params) {
  const auto e = static_cast<size_t>(cfg.embedding_dim);
  const auto h = static_cast<size_t>(cfg.hidden_dim);
  const auto num_classes = static_cast<size_t>(cfg.num_classes);
  const int effective = cache.effective_len;

  Param& head_w = params.at("head.W");
  Param& head_b = params.at("head.b");
  detail::add_outer(head_w.grad, dlogits, cache.head_input.data(), num_classes, h);
  for (size_t i = 0; i < num_classes; ++i) head_b.grad[i] += dlogits[i];

  std::vector<double> d_final(h, 0.0);
  detail::addmv_t(d_final.data(), head_w.value, dlogits, num_classes, h);
  if (!cache.dropout_mask.empty()) {
    for (size_t k = 0; k < h; ++k) d_final[k] *= cache.dropout_mask[k];
  }
  if (effective == 0) return;

  const Param& emb = params.at("embedding");
  Param& demb = params.at("embedding");

  // dout[t]: gradient flowing into h_t of the current layer from above.
  std::vector<std::vector<double>> dout(static_cast<size_t>(effective),
                                        std::vector<double>(h, 0.0));
  dout[static_cast<size_t>(effective - 1)] = d_final;

  std::vector<double> da(4 * h);
  for (int l = cfg.num_layers - 1; l >= 0; --l) {
    const auto& layer = cache.layers[static_cast<size_t>(l)];
    const size_t in_dim = l == 0 ? e : h;
    const Param& w = params.at(lstm_layer_name(l, "W"));
    const Param& u = params.at(lstm_layer_name(l, "U"));
    Param& dw = params.at(lstm_layer_name(l, "W"));
    Param& du = params.at(lstm_layer_name(l, "U"));
    Param& db = params.at(lstm_layer_name(l, "b"));

    std::vector<std::vector<double>> dinput(
        static_cast<size_t>(effective), std::vector<double>(in_dim, 0.0));
    std::vector<double> dh_rec(h, 0.0);
    std::vector<double> dc_rec(h, 0.0);

    for (int t = effective - 1; t >= 0; --t) {
      const size_t tt = static_cast<size_t>(t);
      const std::vector<double>* c_prev =
          t > 0 ? &layer.c[tt - 1] : nullptr;
      const std::vector<double>* h_prev =
          t > 0 ? &layer.h[tt - 1] : nullptr;
      for (size_t k = 0; k < h; ++k) {
        const double dh = dout[tt][k] + dh_rec[k];
        const double tc = std::tanh(layer.c[tt][k]);
        const double go = layer.o[tt][k];
        const double dc = dc_rec[k] + dh * go * (1.0 - tc * tc);
        const double gi = layer.i[tt][k];
        const double gf = layer.f[tt][k];
        const double gg = layer.g[tt][k];
        const double d_o = dh * tc;
        const double d_i = dc * gg;
        const double d_g = dc * gi;
        const double d_f = dc * (c_prev ? (*c_prev)[k] : 0.0);
        da[k] = d_i * gi * (1.0 - gi);
        da[h + k] = d_f * gf * (1.0 - gf);
        da[2 * h + k] = d_g * (1.0 - gg * gg);
        da[3 * h + k] = d_o * go * (1.0 - go);
        dc_rec[k] = dc * gf;
      }
      const double* x =
          l == 0 ? &emb.value[static_cast<size_t>(cache.ids[tt]) * e]
                 : cache.layers[static_cast<size_t>(l - 1)].h[tt].data();
      detail::add_outer(dw.grad, da, x, 4 * h, in_dim);
      if (h_prev) detail::add_outer(du.grad, da, h_prev->data(), 4 * h, h);
      for (size_t k = 0; k < 4 * h; ++k) db.grad[k] += da[k];
      detail::addmv_t(dinput[tt].data(), w.value, da, 4 * h, in_dim);
      std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
      detail::addmv_t(dh_rec.data(), u.value, da, 4 * h, h);
    }

    if (l == 0) {
      for (int t = 0; t < effective; ++t) {
        const size_t tt = static_cast<size_t>(t);
        double* row = &demb.grad[static_cast<size_t>(cache.ids[tt]) * e];
        for (size_t j = 0; j < e; ++j) row[j] += dinput[tt][j];
      }
    } else {
      dout = std::move(dinput);
    }
  }
}

}  // namespace mindgauge
