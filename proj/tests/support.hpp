// Shared helpers for the test suite: finite-difference gradient checking
// and small corpus builders.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mindgauge/classifier.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/params.hpp"

namespace mindgauge::testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  size_t worst_index = 0;
  size_t checked = 0;
};

// Central finite differences against the analytic batch gradient, every
// element of every tensor. `train_mode` with a fixed seed is legal because
// the dropout stream is a pure function of (seed, sample order).
inline GradCheckResult check_gradients(const std::vector<EncodedSample>& batch,
                                       const ModelConfig& cfg,
                                       ParameterSet& params,
                                       bool train_mode = false,
                                       std::uint64_t seed = 1,
                                       double step = 1e-5) {
  ParameterSet analytic = params;
  batch_gradients(batch, cfg, analytic, train_mode, seed);

  GradCheckResult result;
  for (size_t pi = 0; pi < params.count(); ++pi) {
    Param& p = params.param(pi);
    const Param& g = analytic.param(pi);
    for (size_t j = 0; j < p.value.size(); ++j) {
      const double saved = p.value[j];
      p.value[j] = saved + step;
      const double up = batch_loss(batch, cfg, params, train_mode, seed);
      p.value[j] = saved - step;
      const double down = batch_loss(batch, cfg, params, train_mode, seed);
      p.value[j] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double err = rel_err(g.grad[j], fd);
      ++result.checked;
      if (err > result.max_rel_err) {
        result.max_rel_err = err;
        result.worst_param = params.names()[pi];
        result.worst_index = j;
      }
    }
  }
  return result;
}

// Tiny hand-rolled corpus: six posts, one per class, with obvious keywords.
inline std::vector<CuratedPost> six_class_posts() {
  std::vector<CuratedPost> posts;
  const char* bodies[] = {
      "adhd makes it hard to focus on one thing at a time",
      "anxiety and panic keep me awake most nights lately",
      "bipolar swings take me from mania to nothing at all",
      "depression leaves me feeling hopeless and numb all day",
      "ptsd flashbacks and nightmares come back every night",
      "music and travel plans for the summer holidays ahead",
  };
  const char* titles[] = {"cannot focus",    "always on edge", "up and down",
                          "feeling hopeless", "bad nights",     "trip playlist"};
  for (int i = 0; i < 6; ++i) {
    CuratedPost p;
    p.id = "post-" + std::to_string(i);
    p.title = titles[i];
    p.body = bodies[i];
    p.label = label_from_code(i);
    p.upvotes = 20 + i;
    p.token_count = static_cast<int>(tokenize(p.body).size());
    posts.push_back(std::move(p));
  }
  return posts;
}

}  // namespace mindgauge::testing
