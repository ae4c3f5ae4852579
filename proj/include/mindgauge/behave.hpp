// Behavioral testing: label-preserving synonym replacement plus three
// root-word masking perturbations (remove, replace with a generic token,
// replace with another class's root), applied to seeded stratified fractions
// of the test set and scored against the clean baseline.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mindgauge/classifier.hpp"
#include "mindgauge/common.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/eval.hpp"
#include "mindgauge/label.hpp"
#include "mindgauge/model.hpp"
#include "mindgauge/rng.hpp"
#include "mindgauge/textproc.hpp"

namespace mindgauge {

enum class PerturbationMode {
  kSynonym,
  kRemoveLabel,
  kReplaceGeneric,
  kReplaceRandom,
};

inline const char* perturbation_mode_name(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::kSynonym: return "synonym";
    case PerturbationMode::kRemoveLabel: return "remove_label";
    case PerturbationMode::kReplaceGeneric: return "replace_generic";
    case PerturbationMode::kReplaceRandom: return "replace_random";
  }
  throw Error("mode", "unknown perturbation mode");
}

inline PerturbationMode parse_perturbation_mode(const std::string& name) {
  if (name == "synonym") return PerturbationMode::kSynonym;
  if (name == "remove_label") return PerturbationMode::kRemoveLabel;
  if (name == "replace_generic") return PerturbationMode::kReplaceGeneric;
  if (name == "replace_random") return PerturbationMode::kReplaceRandom;
  throw Error("mode", "unknown perturbation mode: " + name);
}

struct PerturbationConfig {
  double token_fraction = 0.10;
  int post_clamp_min = 4;
  int post_clamp_max = 30;
  int title_clamp_min = 1;
  int title_clamp_max = 5;
  std::string generic_token = "illness";
  std::uint64_t seed = 42;

  void validate() const {
    if (token_fraction <= 0.0 || token_fraction > 1.0) {
      throw Error("config", "token_fraction must be in (0, 1]");
    }
    if (post_clamp_min > post_clamp_max || title_clamp_min > title_clamp_max) {
      throw Error("config", "clamp min must not exceed clamp max");
    }
    if (post_clamp_min < 0 || title_clamp_min < 0) {
      throw Error("config", "clamps must be non-negative");
    }
    if (generic_token.empty()) throw Error("config", "generic token is empty");
  }
};

inline long round_half_away(double x) {
  return x >= 0.0 ? static_cast<long>(std::floor(x + 0.5))
                  : static_cast<long>(std::ceil(x - 0.5));
}

// Replaces a clamped 10% of the eligible tokens with seeded synonyms.
// Eligible means: not a stop word, contains no root of any class, and has at
// least one synonym. The truth label is unchanged by design; this is the
// invariance test.
inline std::vector<std::string> synonym_perturb(
    const std::vector<std::string>& tokens, double token_fraction,
    int clamp_min, int clamp_max, const SynonymLexicon& lexicon,
    const StopWordList& stopwords, const RootFormSet& roots, Rng& rng) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (stopwords.contains(tok)) continue;
    if (roots.contains_any_root(tok)) continue;
    if (lexicon.lookup(tok).empty()) continue;
    eligible.push_back(i);
  }
  long k = round_half_away(token_fraction * static_cast<double>(eligible.size()));
  k = std::clamp(k, static_cast<long>(clamp_min), static_cast<long>(clamp_max));
  k = std::min(k, static_cast<long>(eligible.size()));

  std::vector<std::string> out = tokens;
  if (k <= 0) return out;
  // Partial Fisher-Yates picks k positions without replacement.
  for (long i = 0; i < k; ++i) {
    const size_t j =
        static_cast<size_t>(i) +
        rng.uniform_index(eligible.size() - static_cast<size_t>(i));
    std::swap(eligible[static_cast<size_t>(i)], eligible[j]);
  }
  std::vector<size_t> chosen(eligible.begin(), eligible.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  for (size_t pos : chosen) {
    const auto& syns = lexicon.lookup(out[pos]);
    out[pos] = syns[rng.uniform_index(syns.size())];
  }
  return out;
}

// Deletes every token containing a root of the sample's own class. Tokens
// carrying other classes' roots stay put.
inline std::vector<std::string> mask_remove(const std::vector<std::string>& tokens,
                                            Label label,
                                            const RootFormSet& roots) {
  if (label == Label::kNone) {
    throw Error("no_roots", "the none class has no root forms to mask");
  }
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    if (!roots.contains_root(tok, label)) out.push_back(tok);
  }
  return out;
}

// Replaces every own-root token whole with the generic token.
inline std::vector<std::string> mask_generic(const std::vector<std::string>& tokens,
                                             Label label,
                                             const RootFormSet& roots,
                                             const std::string& generic = "illness") {
  if (label == Label::kNone) {
    throw Error("no_roots", "the none class has no root forms to mask");
  }
  std::vector<std::string> out = tokens;
  for (std::string& tok : out) {
    if (roots.contains_root(tok, label)) tok = generic;
  }
  return out;
}

// Replaces each own-root token with a root string drawn uniformly from the
// other illness classes' roots, never its own.
inline std::vector<std::string> mask_random(const std::vector<std::string>& tokens,
                                            Label label,
                                            const RootFormSet& roots, Rng& rng) {
  if (label == Label::kNone) {
    throw Error("no_roots", "the none class has no root forms to mask");
  }
  const std::vector<std::string> pool = roots.other_class_roots(label);
  std::vector<std::string> out = tokens;
  for (std::string& tok : out) {
    if (roots.contains_root(tok, label)) {
      tok = pool[rng.uniform_index(pool.size())];
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> perturb_tokens(
    const std::vector<std::string>& tokens, Label label, PerturbationMode mode,
    const PerturbationConfig& cfg, bool title_field,
    const SynonymLexicon& lexicon, const StopWordList& stopwords,
    const RootFormSet& roots, Rng& rng) {
  switch (mode) {
    case PerturbationMode::kSynonym: {
      const int cmin = title_field ? cfg.title_clamp_min : cfg.post_clamp_min;
      const int cmax = title_field ? cfg.title_clamp_max : cfg.post_clamp_max;
      return synonym_perturb(tokens, cfg.token_fraction, cmin, cmax, lexicon,
                             stopwords, roots, rng);
    }
    case PerturbationMode::kRemoveLabel:
      return mask_remove(tokens, label, roots);
    case PerturbationMode::kReplaceGeneric:
      return mask_generic(tokens, label, roots, cfg.generic_token);
    case PerturbationMode::kReplaceRandom:
      return mask_random(tokens, label, roots, rng);
  }
  throw Error("mode", "unknown perturbation mode");
}

}  // namespace detail

// Applies one perturbation mode to the fields the model reads. The per-post
// random stream depends only on (config seed, mode, post id), so perturbed
// text does not change with sampling order or set composition.
inline CuratedPost perturb_post(const CuratedPost& post, PerturbationMode mode,
                                InputKind input_kind,
                                const PerturbationConfig& cfg,
                                const SynonymLexicon& lexicon,
                                const StopWordList& stopwords,
                                const RootFormSet& roots) {
  Rng rng(derive_seed(cfg.seed,
                      std::string(perturbation_mode_name(mode)) + "|" + post.id));
  CuratedPost out = post;
  if (input_kind != InputKind::kPosts) {
    out.title = detokenize(detail::perturb_tokens(
        tokenize(post.title), post.label, mode, cfg, true, lexicon, stopwords,
        roots, rng));
  }
  if (input_kind != InputKind::kTitles) {
    out.body = detokenize(detail::perturb_tokens(
        tokenize(post.body), post.label, mode, cfg, false, lexicon, stopwords,
        roots, rng));
  }
  return out;
}

// Seeded stratified sample of post indices. Per class the order is a single
// seeded shuffle, and every fraction takes a prefix, so smaller fractions are
// subsets of larger ones.
inline std::vector<size_t> sample_fraction(const std::vector<CuratedPost>& posts,
                                           double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw Error("config", "testset_fraction must be in (0, 1]");
  }
  std::vector<size_t> selected;
  for (Label label : kAllLabels) {
    std::vector<size_t> members;
    for (size_t i = 0; i < posts.size(); ++i) {
      if (posts[i].label == label) members.push_back(i);
    }
    if (members.empty()) continue;
    std::sort(members.begin(), members.end(), [&](size_t a, size_t b) {
      return posts[a].id < posts[b].id;
    });
    Rng rng(derive_seed(seed, std::string("sample:") + label_name(label)));
    rng.shuffle(members);
    const auto take = static_cast<size_t>(std::llround(
        fraction * static_cast<double>(members.size())));
    members.resize(std::min(take, members.size()));
    selected.insert(selected.end(), members.begin(), members.end());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

struct BehaviorRow {
  std::string mode;  // "clean" for the baseline
  InputKind input_kind = InputKind::kPosts;
  double fraction = 0.0;
  std::int64_t perturbed = 0;
  double precision = 0.0;  // support-weighted
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

struct BehaviorReport {
  std::vector<BehaviorRow> rows;
};

namespace detail {

inline BehaviorRow score_row(const std::vector<CuratedPost>& posts,
                             const ModelConfig& model_cfg,
                             const ParameterSet& params,
                             const Vocabulary& vocab, InputKind input_kind) {
  std::vector<Label> truth;
  std::vector<EncodedSample> samples;
  truth.reserve(posts.size());
  samples.reserve(posts.size());
  for (const CuratedPost& p : posts) {
    truth.push_back(p.label);
    samples.push_back(encode_post(p, input_kind, model_cfg, vocab));
  }
  const ClassReport rep =
      class_report(build_confusion(truth, predict_all(samples, model_cfg, params)));
  BehaviorRow row;
  row.input_kind = input_kind;
  row.precision = rep.weighted.precision;
  row.recall = rep.weighted.recall;
  row.f1 = rep.weighted.f1;
  row.accuracy = rep.accuracy;
  return row;
}

}  // namespace detail

// Scores the model on the clean test set and on each (mode, fraction) cell.
// Each cell evaluates the FULL test set with the sampled fraction perturbed:
// masking modes touch only illness-class posts, synonym mode touches every
// class. Optionally hands each perturbed corpus to a sink for audit dumps.
using PerturbedSink = std::function<void(
    const std::string& mode, double fraction, const std::vector<CuratedPost>&)>;

inline BehaviorReport run_suite(const std::vector<CuratedPost>& test_posts,
                                const ModelConfig& model_cfg,
                                const ParameterSet& params,
                                const Vocabulary& vocab, InputKind input_kind,
                                const std::vector<PerturbationMode>& modes,
                                const std::vector<double>& fractions,
                                const PerturbationConfig& cfg,
                                const SynonymLexicon& lexicon,
                                const StopWordList& stopwords,
                                const RootFormSet& roots,
                                const PerturbedSink& sink = nullptr) {
  if (test_posts.empty()) throw Error("empty", "test split is empty");
  cfg.validate();
  model_cfg.validate();

  BehaviorReport report;
  BehaviorRow clean =
      detail::score_row(test_posts, model_cfg, params, vocab, input_kind);
  clean.mode = "clean";
  report.rows.push_back(clean);

  for (PerturbationMode mode : modes) {
    for (double fraction : fractions) {
      const std::vector<size_t> selected =
          sample_fraction(test_posts, fraction, cfg.seed);
      std::unordered_set<size_t> chosen(selected.begin(), selected.end());
      std::vector<CuratedPost> perturbed = test_posts;
      std::int64_t touched = 0;
      for (size_t i = 0; i < perturbed.size(); ++i) {
        if (!chosen.count(i)) continue;
        if (mode != PerturbationMode::kSynonym &&
            perturbed[i].label == Label::kNone) {
          continue;
        }
        perturbed[i] = perturb_post(perturbed[i], mode, input_kind, cfg,
                                    lexicon, stopwords, roots);
        ++touched;
      }
      if (sink) sink(perturbation_mode_name(mode), fraction, perturbed);
      BehaviorRow row =
          detail::score_row(perturbed, model_cfg, params, vocab, input_kind);
      row.mode = perturbation_mode_name(mode);
      row.fraction = fraction;
      row.perturbed = touched;
      report.rows.push_back(row);
    }
  }
  return report;
}

inline std::string behavior_report_to_csv(const BehaviorReport& report) {
  std::string out =
      "mode,input_kind,fraction,perturbed,precision,recall,f1,accuracy\n";
  char buf[192];
  for (const BehaviorRow& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.2f,%lld,%.4f,%.4f,%.4f,%.4f\n",
                  r.mode.c_str(), input_kind_name(r.input_kind), r.fraction,
                  static_cast<long long>(r.perturbed), r.precision, r.recall,
                  r.f1, r.accuracy);
    out += buf;
  }
  return out;
}

}  // namespace mindgauge
