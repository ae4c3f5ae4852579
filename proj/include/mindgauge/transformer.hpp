// Toy transformer encoder classifier: token + learned position + segment
// embeddings, post-norm blocks (multi-head self-attention, residual + layer
// norm, GELU feedforward, residual + layer norm), dropout, and a linear head
// reading the begin-marker position. Forward and backward are written by
// hand in double precision.
//
// Attention runs over the non-padding prefix of the input only, which is
// exactly equivalent to additive masking of padding keys: padding positions
// receive zero attention weight and contribute nothing to the logits.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mindgauge/lstm.hpp"  // detail::addmv / addmv_t / add_outer / check_param
#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"
#include "mindgauge/rng.hpp"

namespace mindgauge {

namespace detail {

inline constexpr double kLayerNormEps = 1e-5;

inline double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865476));
}

inline double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * 0.7071067811865476));
  const double pdf = 0.3989422804014327 * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

}  // namespace detail

inline std::string block_name(int block, const char* part) {
  return "blk" + std::to_string(block) + "." + part;
}

// Weight matrices and embeddings are normal(0, 1/sqrt(model_dim)); biases
// and layer-norm shifts start at zero, layer-norm scales at one.
inline ParameterSet init_transformer_params(const ModelConfig& cfg,
                                            std::uint64_t seed) {
  cfg.validate();
  const auto v = static_cast<size_t>(cfg.vocab_size);
  const auto d = static_cast<size_t>(cfg.model_dim);
  const auto f = static_cast<size_t>(cfg.feedforward_dim);
  const auto c = static_cast<size_t>(cfg.num_classes);
  const auto max_len = static_cast<size_t>(cfg.max_len);

  ParameterSet params;
  params.add("tok_emb", {v, d});
  params.add("pos_emb", {max_len, d});
  params.add("seg_emb", {2, d});
  for (int b = 0; b < cfg.num_blocks; ++b) {
    params.add(block_name(b, "attn.Wq"), {d, d});
    params.add(block_name(b, "attn.bq"), {d});
    params.add(block_name(b, "attn.Wk"), {d, d});
    params.add(block_name(b, "attn.bk"), {d});
    params.add(block_name(b, "attn.Wv"), {d, d});
    params.add(block_name(b, "attn.bv"), {d});
    params.add(block_name(b, "attn.Wo"), {d, d});
    params.add(block_name(b, "attn.bo"), {d});
    params.add(block_name(b, "ln1.gamma"), {d});
    params.add(block_name(b, "ln1.beta"), {d});
    params.add(block_name(b, "ffn.W1"), {f, d});
    params.add(block_name(b, "ffn.b1"), {f});
    params.add(block_name(b, "ffn.W2"), {d, f});
    params.add(block_name(b, "ffn.b2"), {d});
    params.add(block_name(b, "ln2.gamma"), {d});
    params.add(block_name(b, "ln2.beta"), {d});
  }
  params.add("head.W", {c, d});
  params.add("head.b", {c});

  Rng rng(seed);
  const double std = 1.0 / std::sqrt(static_cast<double>(cfg.model_dim));
  for (const auto& name : params.names()) {
    Param& p = params.at(name);
    if (p.shape.size() == 2) {
      for (double& x : p.value) x = rng.normal(0.0, std);
    } else if (name.find("gamma") != std::string::npos) {
      std::fill(p.value.begin(), p.value.end(), 1.0);
    }
    // biases and betas stay zero
  }
  return params;
}

inline void check_transformer_shapes(const ModelConfig& cfg,
                                     const ParameterSet& params) {
  const auto v = static_cast<size_t>(cfg.vocab_size);
  const auto d = static_cast<size_t>(cfg.model_dim);
  const auto f = static_cast<size_t>(cfg.feedforward_dim);
  const auto c = static_cast<size_t>(cfg.num_classes);
  detail::check_param(params, "tok_emb", {v, d});
  detail::check_param(params, "pos_emb", {static_cast<size_t>(cfg.max_len), d});
  detail::check_param(params, "seg_emb", {2, d});
  for (int b = 0; b < cfg.num_blocks; ++b) {
    detail::check_param(params, block_name(b, "attn.Wq"), {d, d});
    detail::check_param(params, block_name(b, "attn.Wk"), {d, d});
    detail::check_param(params, block_name(b, "attn.Wv"), {d, d});
    detail::check_param(params, block_name(b, "attn.Wo"), {d, d});
    detail::check_param(params, block_name(b, "ffn.W1"), {f, d});
    detail::check_param(params, block_name(b, "ffn.W2"), {d, f});
  }
  detail::check_param(params, "head.W", {c, d});
  detail::check_param(params, "head.b", {c});
}

struct TransformerBlockCache {
  std::vector<double> x;          // [L*D] block input
  std::vector<double> q, k, v;    // [L*D]
  std::vector<double> probs;      // [H*L*L] attention weights
  std::vector<double> ctx;        // [L*D] concatenated head outputs
  std::vector<double> ln1_xhat;   // [L*D]
  std::vector<double> ln1_inv_sigma;  // [L]
  std::vector<double> y1;         // [L*D]
  std::vector<double> h1;         // [L*F] feedforward pre-activation
  std::vector<double> a;          // [L*F] gelu(h1)
  std::vector<double> ln2_xhat;
  std::vector<double> ln2_inv_sigma;
  std::vector<double> y2;         // [L*D] block output
};

struct TransformerCache {
  PairInput input;
  int len = 0;  // non-padding prefix length
  std::vector<double> emb;  // [L*D] embedding sum
  std::vector<TransformerBlockCache> blocks;
  std::vector<double> dropout_mask;  // empty => identity
  std::vector<double> head_input;
  std::vector<double> logits;
};

namespace detail {

// y = gamma * (x - mean) / sqrt(var + eps) + beta, row-wise over dim d.
inline void layer_norm_forward(const std::vector<double>& x, size_t rows,
                               size_t d, const std::vector<double>& gamma,
                               const std::vector<double>& beta,
                               std::vector<double>& xhat,
                               std::vector<double>& inv_sigma,
                               std::vector<double>& y) {
  xhat.resize(rows * d);
  inv_sigma.resize(rows);
  y.resize(rows * d);
  for (size_t t = 0; t < rows; ++t) {
    const double* xt = &x[t * d];
    double mean = 0.0;
    for (size_t j = 0; j < d; ++j) mean += xt[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double c = xt[j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    inv_sigma[t] = inv;
    for (size_t j = 0; j < d; ++j) {
      const double xh = (xt[j] - mean) * inv;
      xhat[t * d + j] = xh;
      y[t * d + j] = gamma[j] * xh + beta[j];
    }
  }
}

inline void layer_norm_backward(const std::vector<double>& dy, size_t rows,
                                size_t d, const std::vector<double>& xhat,
                                const std::vector<double>& inv_sigma,
                                const std::vector<double>& gamma,
                                std::vector<double>& dgamma,
                                std::vector<double>& dbeta,
                                std::vector<double>& dx) {
  dx.assign(rows * d, 0.0);
  for (size_t t = 0; t < rows; ++t) {
    const double* dyt = &dy[t * d];
    const double* xh = &xhat[t * d];
    double m1 = 0.0, m2 = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double a = dyt[j] * gamma[j];
      m1 += a;
      m2 += a * xh[j];
      dgamma[j] += dyt[j] * xh[j];
      dbeta[j] += dyt[j];
    }
    m1 /= static_cast<double>(d);
    m2 /= static_cast<double>(d);
    for (size_t j = 0; j < d; ++j) {
      const double a = dyt[j] * gamma[j];
      dx[t * d + j] = (a - m1 - xh[j] * m2) * inv_sigma[t];
    }
  }
}

// Row-wise linear: Y[t] = W X[t] + b, W is [out x in] row-major.
inline void linear_forward(const std::vector<double>& x, size_t rows,
                           size_t in_dim, const Param& w, const Param& b,
                           std::vector<double>& y) {
  const size_t out_dim = b.value.size();
  y.resize(rows * out_dim);
  for (size_t t = 0; t < rows; ++t) {
    double* yt = &y[t * out_dim];
    for (size_t i = 0; i < out_dim; ++i) yt[i] = b.value[i];
    const double* xt = &x[t * in_dim];
    for (size_t i = 0; i < out_dim; ++i) {
      const double* wi = &w.value[i * in_dim];
      double acc = 0.0;
      for (size_t j = 0; j < in_dim; ++j) acc += wi[j] * xt[j];
      yt[i] += acc;
    }
  }
}

// Backward of the row-wise linear map: accumulates dW, db, and dX.
inline void linear_backward(const std::vector<double>& x, size_t rows,
                            size_t in_dim, Param& w, Param& b,
                            const std::vector<double>& dy,
                            std::vector<double>& dx) {
  const size_t out_dim = b.value.size();
  dx.assign(rows * in_dim, 0.0);
  for (size_t t = 0; t < rows; ++t) {
    const double* xt = &x[t * in_dim];
    const double* dyt = &dy[t * out_dim];
    double* dxt = &dx[t * in_dim];
    for (size_t i = 0; i < out_dim; ++i) {
      const double di = dyt[i];
      b.grad[i] += di;
      if (di == 0.0) continue;
      double* dwi = &w.grad[i * in_dim];
      const double* wi = &w.value[i * in_dim];
      for (size_t j = 0; j < in_dim; ++j) {
        dwi[j] += di * xt[j];
        dxt[j] += wi[j] * di;
      }
    }
  }
}

}  // namespace detail

inline std::vector<double> transformer_forward(const PairInput& pair,
                                               const ModelConfig& cfg,
                                               const ParameterSet& params,
                                               bool train_mode = false,
                                               Rng* dropout_rng = nullptr,
                                               TransformerCache* cache = nullptr) {
  if (pair.length() != cfg.max_len) {
    throw Error("shape", "pair input length does not match max_len");
  }
  if (pair.segments.size() != pair.ids.size() ||
      pair.mask.size() != pair.ids.size()) {
    throw Error("shape", "pair input fields have mismatched lengths");
  }
  check_transformer_shapes(cfg, params);
  const size_t len = static_cast<size_t>(pair.real_length());
  for (size_t t = len; t < pair.mask.size(); ++t) {
    if (pair.mask[t] != 0) throw Error("shape", "mask must be a solid prefix");
  }
  if (len == 0) throw Error("shape", "pair input has no real tokens");

  const auto d = static_cast<size_t>(cfg.model_dim);
  const auto f = static_cast<size_t>(cfg.feedforward_dim);
  const auto heads = static_cast<size_t>(cfg.num_heads);
  const size_t dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  TransformerCache local;
  TransformerCache& cc = cache ? *cache : local;
  cc.input = pair;
  cc.len = static_cast<int>(len);
  cc.blocks.assign(static_cast<size_t>(cfg.num_blocks), {});

  const Param& tok = params.at("tok_emb");
  const Param& pos = params.at("pos_emb");
  const Param& seg = params.at("seg_emb");
  cc.emb.assign(len * d, 0.0);
  for (size_t t = 0; t < len; ++t) {
    const double* tok_row = &tok.value[static_cast<size_t>(pair.ids[t]) * d];
    const double* pos_row = &pos.value[t * d];
    const double* seg_row = &seg.value[static_cast<size_t>(pair.segments[t]) * d];
    double* e = &cc.emb[t * d];
    for (size_t j = 0; j < d; ++j) e[j] = tok_row[j] + pos_row[j] + seg_row[j];
  }

  std::vector<double> x = cc.emb;
  for (int b = 0; b < cfg.num_blocks; ++b) {
    TransformerBlockCache& bc = cc.blocks[static_cast<size_t>(b)];
    bc.x = x;

    detail::linear_forward(bc.x, len, d, params.at(block_name(b, "attn.Wq")),
                           params.at(block_name(b, "attn.bq")), bc.q);
    detail::linear_forward(bc.x, len, d, params.at(block_name(b, "attn.Wk")),
                           params.at(block_name(b, "attn.bk")), bc.k);
    detail::linear_forward(bc.x, len, d, params.at(block_name(b, "attn.Wv")),
                           params.at(block_name(b, "attn.bv")), bc.v);

    bc.probs.assign(heads * len * len, 0.0);
    bc.ctx.assign(len * d, 0.0);
    std::vector<double> scores(len);
    for (size_t h = 0; h < heads; ++h) {
      const size_t off = h * dk;
      for (size_t t = 0; t < len; ++t) {
        const double* qt = &bc.q[t * d + off];
        double mx = -1e300;
        for (size_t s = 0; s < len; ++s) {
          const double* ks = &bc.k[s * d + off];
          double acc = 0.0;
          for (size_t j = 0; j < dk; ++j) acc += qt[j] * ks[j];
          scores[s] = acc * scale;
          mx = std::max(mx, scores[s]);
        }
        double sum = 0.0;
        double* pt = &bc.probs[(h * len + t) * len];
        for (size_t s = 0; s < len; ++s) {
          pt[s] = std::exp(scores[s] - mx);
          sum += pt[s];
        }
        for (size_t s = 0; s < len; ++s) pt[s] /= sum;
        double* ct = &bc.ctx[t * d + off];
        for (size_t s = 0; s < len; ++s) {
          const double p = pt[s];
          const double* vs = &bc.v[s * d + off];
          for (size_t j = 0; j < dk; ++j) ct[j] += p * vs[j];
        }
      }
    }

    std::vector<double> attn_out;
    detail::linear_forward(bc.ctx, len, d, params.at(block_name(b, "attn.Wo")),
                           params.at(block_name(b, "attn.bo")), attn_out);
    std::vector<double> r1(len * d);
    for (size_t i = 0; i < r1.size(); ++i) r1[i] = bc.x[i] + attn_out[i];
    detail::layer_norm_forward(r1, len, d,
                               params.at(block_name(b, "ln1.gamma")).value,
                               params.at(block_name(b, "ln1.beta")).value,
                               bc.ln1_xhat, bc.ln1_inv_sigma, bc.y1);

    detail::linear_forward(bc.y1, len, d, params.at(block_name(b, "ffn.W1")),
                           params.at(block_name(b, "ffn.b1")), bc.h1);
    bc.a.resize(len * f);
    for (size_t i = 0; i < bc.a.size(); ++i) bc.a[i] = detail::gelu(bc.h1[i]);
    std::vector<double> ffn_out;
    detail::linear_forward(bc.a, len, f, params.at(block_name(b, "ffn.W2")),
                           params.at(block_name(b, "ffn.b2")), ffn_out);
    std::vector<double> r2(len * d);
    for (size_t i = 0; i < r2.size(); ++i) r2[i] = bc.y1[i] + ffn_out[i];
    detail::layer_norm_forward(r2, len, d,
                               params.at(block_name(b, "ln2.gamma")).value,
                               params.at(block_name(b, "ln2.beta")).value,
                               bc.ln2_xhat, bc.ln2_inv_sigma, bc.y2);
    x = bc.y2;
  }

  // Classification reads the begin-marker position.
  std::vector<double> pooled(x.begin(), x.begin() + static_cast<long>(d));
  cc.head_input = pooled;
  cc.dropout_mask.clear();
  if (train_mode && cfg.dropout_prob > 0.0 && dropout_rng) {
    cc.dropout_mask = make_dropout_mask(d, cfg.dropout_prob, *dropout_rng);
    for (size_t j = 0; j < d; ++j) cc.head_input[j] *= cc.dropout_mask[j];
  }
  const Param& head_w = params.at("head.W");
  const Param& head_b = params.at("head.b");
  cc.logits = head_b.value;
  detail::addmv(cc.logits, head_w.value, cc.head_input.data(),
                static_cast<size_t>(cfg.num_classes), d);
  return cc.logits;
}

inline void transformer_backward(const TransformerCache& cache,
                                 const std::vector<double>& dlogits,
                                 const ModelConfig& cfg, ParameterSet& params) {
  const auto d = static_cast<size_t>(cfg.model_dim);
  const auto f = static_cast<size_t>(cfg.feedforward_dim);
  const auto heads = static_cast<size_t>(cfg.num_heads);
  const auto num_classes = static_cast<size_t>(cfg.num_classes);
  const size_t dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const size_t len = static_cast<size_t>(cache.len);

  Param& head_w = params.at("head.W");
  Param& head_b = params.at("head.b");
  detail::add_outer(head_w.grad, dlogits, cache.head_input.data(), num_classes, d);
  for (size_t i = 0; i < num_classes; ++i) head_b.grad[i] += dlogits[i];

  std::vector<double> d_pooled(d, 0.0);
  detail::addmv_t(d_pooled.data(), head_w.value, dlogits, num_classes, d);
  if (!cache.dropout_mask.empty()) {
    for (size_t j = 0; j < d; ++j) d_pooled[j] *= cache.dropout_mask[j];
  }

  std::vector<double> dy(len * d, 0.0);
  for (size_t j = 0; j < d; ++j) dy[j] = d_pooled[j];

  for (int b = cfg.num_blocks - 1; b >= 0; --b) {
    const TransformerBlockCache& bc = cache.blocks[static_cast<size_t>(b)];

    // LN2
    std::vector<double> dr2;
    detail::layer_norm_backward(dy, len, d, bc.ln2_xhat, bc.ln2_inv_sigma,
                                params.at(block_name(b, "ln2.gamma")).value,
                                params.at(block_name(b, "ln2.gamma")).grad,
                                params.at(block_name(b, "ln2.beta")).grad, dr2);

    // FFN: r2 = y1 + W2 gelu(W1 y1 + b1) + b2
    std::vector<double> da;
    detail::linear_backward(bc.a, len, f, params.at(block_name(b, "ffn.W2")),
                            params.at(block_name(b, "ffn.b2")), dr2, da);
    std::vector<double> dh1(len * f);
    for (size_t i = 0; i < dh1.size(); ++i) {
      dh1[i] = da[i] * detail::gelu_derivative(bc.h1[i]);
    }
    std::vector<double> dy1;
    detail::linear_backward(bc.y1, len, d, params.at(block_name(b, "ffn.W1")),
                            params.at(block_name(b, "ffn.b1")), dh1, dy1);
    for (size_t i = 0; i < dy1.size(); ++i) dy1[i] += dr2[i];  // residual

    // LN1
    std::vector<double> dr1;
    detail::layer_norm_backward(dy1, len, d, bc.ln1_xhat, bc.ln1_inv_sigma,
                                params.at(block_name(b, "ln1.gamma")).value,
                                params.at(block_name(b, "ln1.gamma")).grad,
                                params.at(block_name(b, "ln1.beta")).grad, dr1);

    // Attention output projection
    std::vector<double> dctx;
    detail::linear_backward(bc.ctx, len, d, params.at(block_name(b, "attn.Wo")),
                            params.at(block_name(b, "attn.bo")), dr1, dctx);

    std::vector<double> dq(len * d, 0.0);
    std::vector<double> dkk(len * d, 0.0);
    std::vector<double> dv(len * d, 0.0);
    std::vector<double> dp(len);
    std::vector<double> ds(len);
    for (size_t h = 0; h < heads; ++h) {
      const size_t off = h * dk;
      for (size_t t = 0; t < len; ++t) {
        const double* dct = &dctx[t * d + off];
        const double* pt = &bc.probs[(h * len + t) * len];
        double dot_pp = 0.0;
        for (size_t s = 0; s < len; ++s) {
          const double* vs = &bc.v[s * d + off];
          double acc = 0.0;
          for (size_t j = 0; j < dk; ++j) acc += dct[j] * vs[j];
          dp[s] = acc;
          dot_pp += acc * pt[s];
          double* dvs = &dv[s * d + off];
          const double p = pt[s];
          for (size_t j = 0; j < dk; ++j) dvs[j] += p * dct[j];
        }
        for (size_t s = 0; s < len; ++s) ds[s] = pt[s] * (dp[s] - dot_pp);
        double* dqt = &dq[t * d + off];
        const double* qt = &bc.q[t * d + off];
        for (size_t s = 0; s < len; ++s) {
          const double dss = ds[s] * scale;
          if (dss == 0.0) continue;
          const double* ks = &bc.k[s * d + off];
          double* dks = &dkk[s * d + off];
          for (size_t j = 0; j < dk; ++j) {
            dqt[j] += dss * ks[j];
            dks[j] += dss * qt[j];
          }
        }
      }
    }

    std::vector<double> dx_q, dx_k, dx_v;
    detail::linear_backward(bc.x, len, d, params.at(block_name(b, "attn.Wq")),
                            params.at(block_name(b, "attn.bq")), dq, dx_q);
    detail::linear_backward(bc.x, len, d, params.at(block_name(b, "attn.Wk")),
                            params.at(block_name(b, "attn.bk")), dkk, dx_k);
    detail::linear_backward(bc.x, len, d, params.at(block_name(b, "attn.Wv")),
                            params.at(block_name(b, "attn.bv")), dv, dx_v);

    // dX = residual path + the three projection paths
    for (size_t i = 0; i < dr1.size(); ++i) {
      dr1[i] += dx_q[i] + dx_k[i] + dx_v[i];
    }
    dy = std::move(dr1);
  }

  Param& tok = params.at("tok_emb");
  Param& pos = params.at("pos_emb");
  Param& seg = params.at("seg_emb");
  for (size_t t = 0; t < len; ++t) {
    const double* g = &dy[t * d];
    double* tok_row = &tok.grad[static_cast<size_t>(cache.input.ids[t]) * d];
    double* pos_row = &pos.grad[t * d];
    double* seg_row =
        &seg.grad[static_cast<size_t>(cache.input.segments[t]) * d];
    for (size_t j = 0; j < d; ++j) {
      tok_row[j] += g[j];
      pos_row[j] += g[j];
      seg_row[j] += g[j];
    }
  }
}

}  // namespace mindgauge
