// Dataset statistics and the two quality audits: class-term co-occurrence
// fractions and TF-IDF cosine similarity between posts.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "mindgauge/common.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/label.hpp"
#include "mindgauge/textproc.hpp"

namespace mindgauge {

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

struct LabelStats {
  std::int64_t posts = 0;
  double mean_body_tokens = 0.0;
  double mean_title_tokens = 0.0;
  double mean_upvotes = 0.0;
  std::int64_t max_upvotes = 0;
  std::int64_t min_upvotes = 0;
};

struct CorpusStats {
  std::array<LabelStats, kNumClasses> per_label{};
  std::int64_t total = 0;
};

inline CorpusStats corpus_stats(const std::vector<CuratedPost>& posts) {
  if (posts.empty()) throw Error("empty", "no posts");
  struct Acc {
    std::int64_t n = 0, body = 0, title = 0, ups = 0;
    std::int64_t max_ups = 0, min_ups = 0;
  };
  std::array<Acc, kNumClasses> acc{};
  for (const CuratedPost& p : posts) {
    Acc& a = acc[static_cast<size_t>(label_code(p.label))];
    const auto title_tokens = static_cast<std::int64_t>(tokenize(p.title).size());
    if (a.n == 0) {
      a.max_ups = a.min_ups = p.upvotes;
    } else {
      a.max_ups = std::max(a.max_ups, p.upvotes);
      a.min_ups = std::min(a.min_ups, p.upvotes);
    }
    ++a.n;
    a.body += p.token_count;
    a.title += title_tokens;
    a.ups += p.upvotes;
  }
  CorpusStats stats;
  stats.total = static_cast<std::int64_t>(posts.size());
  for (size_t c = 0; c < kNumClasses; ++c) {
    const Acc& a = acc[c];
    LabelStats& s = stats.per_label[c];
    s.posts = a.n;
    if (a.n > 0) {
      const auto n = static_cast<double>(a.n);
      s.mean_body_tokens = static_cast<double>(a.body) / n;
      s.mean_title_tokens = static_cast<double>(a.title) / n;
      s.mean_upvotes = static_cast<double>(a.ups) / n;
      s.max_upvotes = a.max_ups;
      s.min_upvotes = a.min_ups;
    }
  }
  return stats;
}

inline std::string stats_to_csv(const CorpusStats& stats) {
  std::string out =
      "label,posts,mean_post_tokens,mean_title_tokens,mean_upvotes,"
      "max_upvotes,min_upvotes\n";
  for (Label label : kAllLabels) {
    const LabelStats& s = stats.per_label[static_cast<size_t>(label_code(label))];
    out += label_name(label);
    out += ',' + std::to_string(s.posts);
    out += ',' + format_fixed(s.mean_body_tokens, 2);
    out += ',' + format_fixed(s.mean_title_tokens, 2);
    out += ',' + format_fixed(s.mean_upvotes, 2);
    out += ',' + std::to_string(s.max_upvotes);
    out += ',' + std::to_string(s.min_upvotes);
    out += '\n';
  }
  return out;
}

// Fraction of posts per label whose body mentions any root of each illness
// term group. Rows follow illness label order, columns full label order.
struct CooccurrenceTable {
  // cell [group][label]: fraction in [0,1]
  std::array<std::array<double, kNumClasses>, 5> fractions{};
};

inline CooccurrenceTable keyword_cooccurrence(
    const std::vector<CuratedPost>& posts, const RootFormSet& roots) {
  if (posts.empty()) throw Error("empty", "no posts");
  std::array<std::array<std::int64_t, kNumClasses>, 5> hits{};
  std::array<std::int64_t, kNumClasses> totals{};
  for (const CuratedPost& p : posts) {
    const size_t col = static_cast<size_t>(label_code(p.label));
    ++totals[col];
    const auto tokens = tokenize(p.body);
    for (size_t g = 0; g < 5; ++g) {
      const Label group = kAllLabels[g];
      bool found = false;
      for (const auto& token : tokens) {
        if (roots.contains_root(token, group)) {
          found = true;
          break;
        }
      }
      if (found) ++hits[g][col];
    }
  }
  CooccurrenceTable table;
  for (size_t g = 0; g < 5; ++g) {
    for (size_t c = 0; c < kNumClasses; ++c) {
      table.fractions[g][c] =
          totals[c] == 0 ? 0.0
                         : static_cast<double>(hits[g][c]) /
                               static_cast<double>(totals[c]);
    }
  }
  return table;
}

inline std::string cooccurrence_to_csv(const CooccurrenceTable& table) {
  std::string out = "term_group";
  for (Label label : kAllLabels) out += std::string(",") + label_name(label);
  out += '\n';
  for (size_t g = 0; g < 5; ++g) {
    out += label_name(kAllLabels[g]);
    for (size_t c = 0; c < kNumClasses; ++c) {
      out += ',' + format_fixed(table.fractions[g][c], 4);
    }
    out += '\n';
  }
  return out;
}

// ---- TF-IDF --------------------------------------------------------------

// Sparse token -> weight vector; weight = raw term frequency x ln(N / df).
using TfidfVector = std::map<std::string, double>;

struct TfidfModel {
  std::size_t num_docs = 0;
  std::map<std::string, std::int64_t> df;
};

inline TfidfModel fit_tfidf(const std::vector<std::vector<std::string>>& docs) {
  if (docs.empty()) throw Error("empty", "no documents");
  TfidfModel model;
  model.num_docs = docs.size();
  for (const auto& doc : docs) {
    std::map<std::string, bool> seen;
    for (const auto& token : doc) {
      if (!seen.emplace(token, true).second) continue;
      ++model.df[token];
    }
  }
  return model;
}

inline TfidfVector tfidf_vector(const std::vector<std::string>& doc,
                                const TfidfModel& model) {
  std::map<std::string, std::int64_t> tf;
  for (const auto& token : doc) ++tf[token];
  TfidfVector vec;
  for (const auto& [token, count] : tf) {
    auto it = model.df.find(token);
    if (it == model.df.end()) continue;  // unseen at fit time
    const double idf = std::log(static_cast<double>(model.num_docs) /
                                static_cast<double>(it->second));
    const double w = static_cast<double>(count) * idf;
    if (w > 0.0) vec[token] = w;
  }
  return vec;
}

inline double cosine_similarity(const TfidfVector& a, const TfidfVector& b) {
  double na = 0.0, nb = 0.0;
  for (const auto& [token, w] : a) na += w * w;
  for (const auto& [token, w] : b) nb += w * w;
  if (na == 0.0 && nb == 0.0) {
    throw Error("zero_vector", "both vectors are zero");
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  const TfidfVector& small = a.size() <= b.size() ? a : b;
  const TfidfVector& large = a.size() <= b.size() ? b : a;
  for (const auto& [token, w] : small) {
    auto it = large.find(token);
    if (it != large.end()) dot += w * it->second;
  }
  const double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(cosine, 0.0, 1.0);
}

}  // namespace mindgauge
