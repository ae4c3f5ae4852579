#include "mindgauge/analysis.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mindgauge/rng.hpp"

namespace mindgauge {
namespace {

CuratedPost make_post(std::string id, Label label, std::string body,
                      int token_count, std::int64_t ups = 20,
                      std::string title = "the title") {
  CuratedPost p;
  p.id = std::move(id);
  p.title = std::move(title);
  p.body = std::move(body);
  p.label = label;
  p.upvotes = ups;
  p.token_count = token_count;
  return p;
}

TEST(CorpusStats, MeanOfThreeBodies) {
  const std::vector<CuratedPost> posts = {
      make_post("a", Label::kAdhd, "x", 30),
      make_post("b", Label::kAdhd, "x", 40),
      make_post("c", Label::kAdhd, "x", 50)};
  const CorpusStats stats = corpus_stats(posts);
  const LabelStats& s = stats.per_label[static_cast<size_t>(label_code(Label::kAdhd))];
  EXPECT_EQ(s.posts, 3);
  EXPECT_DOUBLE_EQ(s.mean_body_tokens, 40.0);
  EXPECT_EQ(format_fixed(s.mean_body_tokens, 2), "40.00");
}

TEST(CorpusStats, EmptyDatasetIsAnError) {
  try {
    corpus_stats({});
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "empty");
  }
}

TEST(CorpusStats, CountsSumAndUpvoteBoundsHold) {
  std::vector<CuratedPost> posts;
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    posts.push_back(make_post(
        "p" + std::to_string(i),
        kAllLabels[rng.uniform_index(kAllLabels.size())], "body text here",
        30 + static_cast<int>(rng.uniform_index(100)),
        11 + static_cast<std::int64_t>(rng.uniform_index(500))));
  }
  const CorpusStats stats = corpus_stats(posts);
  std::int64_t total = 0;
  for (const LabelStats& s : stats.per_label) {
    total += s.posts;
    if (s.posts > 0) {
      EXPECT_LE(static_cast<double>(s.min_upvotes), s.mean_upvotes);
      EXPECT_LE(s.mean_upvotes, static_cast<double>(s.max_upvotes));
    }
  }
  EXPECT_EQ(total, stats.total);
  EXPECT_EQ(total, 300);
}

TEST(CorpusStats, CsvHasOneRowPerLabel) {
  const std::vector<CuratedPost> posts = {make_post("a", Label::kPtsd, "x", 30)};
  const std::string csv = stats_to_csv(corpus_stats(posts));
  size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 1u + kAllLabels.size());
  EXPECT_EQ(csv.rfind("label,posts,mean_post_tokens,mean_title_tokens,", 0), 0u);
}

TEST(Cooccurrence, CountsRootMentionsPerLabel) {
  const std::vector<CuratedPost> posts = {
      make_post("a", Label::kDepression, "i feel so depressed lately", 30),
      make_post("b", Label::kDepression, "nothing in particular today", 30),
      make_post("c", Label::kAnxiety, "my depression got worse", 30),
      make_post("d", Label::kNone, "a plain post about music", 30)};
  const CooccurrenceTable table =
      keyword_cooccurrence(posts, RootFormSet::standard());
  const size_t dep_group = static_cast<size_t>(label_code(Label::kDepression));
  EXPECT_DOUBLE_EQ(
      table.fractions[dep_group][static_cast<size_t>(label_code(Label::kDepression))],
      0.5);
  EXPECT_DOUBLE_EQ(
      table.fractions[dep_group][static_cast<size_t>(label_code(Label::kAnxiety))],
      1.0);
  EXPECT_DOUBLE_EQ(
      table.fractions[dep_group][static_cast<size_t>(label_code(Label::kNone))],
      0.0);
}

TEST(Cooccurrence, InvariantUnderPostOrderPermutation) {
  std::vector<CuratedPost> posts;
  Rng rng(6);
  const std::vector<std::string> bodies = {
      "depressed and tired", "anxious all day", "quiet evening walk",
      "bipolar swings", "ptsd flashbacks", "adhd focus trouble"};
  for (int i = 0; i < 120; ++i) {
    posts.push_back(make_post("p" + std::to_string(i),
                              kAllLabels[rng.uniform_index(kAllLabels.size())],
                              bodies[rng.uniform_index(bodies.size())], 30));
  }
  const auto before = keyword_cooccurrence(posts, RootFormSet::standard());
  auto shuffled = posts;
  rng.shuffle(shuffled);
  const auto after = keyword_cooccurrence(shuffled, RootFormSet::standard());
  for (size_t g = 0; g < 5; ++g) {
    for (size_t c = 0; c < kAllLabels.size(); ++c) {
      EXPECT_DOUBLE_EQ(before.fractions[g][c], after.fractions[g][c]);
    }
  }
}

TEST(Cooccurrence, NoMentionsMeansAllZero) {
  const std::vector<CuratedPost> posts = {
      make_post("a", Label::kAdhd, "plain words only", 30),
      make_post("b", Label::kNone, "more plain words", 30)};
  const auto table = keyword_cooccurrence(posts, RootFormSet::standard());
  for (size_t g = 0; g < 5; ++g) {
    for (size_t c = 0; c < kAllLabels.size(); ++c) {
      EXPECT_DOUBLE_EQ(table.fractions[g][c], 0.0);
    }
  }
}

// Dense brute-force TF-IDF for the oracle comparison: every token of the fit
// corpus gets a column, weights computed in plain loops.
std::map<std::string, double> dense_tfidf(const std::vector<std::string>& doc,
                                          const std::vector<std::vector<std::string>>& corpus) {
  std::map<std::string, int> df;
  for (const auto& d : corpus) {
    std::map<std::string, bool> seen;
    for (const auto& t : d) {
      if (seen.emplace(t, true).second) ++df[t];
    }
  }
  std::map<std::string, int> tf;
  for (const auto& t : doc) ++tf[t];
  std::map<std::string, double> out;
  for (const auto& [token, count] : df) {
    auto it = tf.find(token);
    if (it == tf.end()) continue;
    const double w =
        it->second * std::log(static_cast<double>(corpus.size()) / count);
    if (w > 0.0) out[token] = w;
  }
  return out;
}

TEST(Tfidf, MatchesDenseOracle) {
  const std::vector<std::vector<std::string>> corpus = {
      {"the", "cat", "sat", "on", "the", "mat"},
      {"the", "dog", "sat"},
      {"a", "cat", "and", "a", "dog"},
      {"grammar", "notes", "only"}};
  const TfidfModel model = fit_tfidf(corpus);
  for (const auto& doc : corpus) {
    const TfidfVector vec = tfidf_vector(doc, model);
    const auto oracle = dense_tfidf(doc, corpus);
    EXPECT_EQ(vec.size(), oracle.size());
    for (const auto& [token, w] : oracle) {
      auto it = vec.find(token);
      ASSERT_NE(it, vec.end()) << token;
      EXPECT_NEAR(it->second, w, 1e-12) << token;
    }
  }
}

TEST(Tfidf, UbiquitousTokensGetZeroWeight) {
  const std::vector<std::vector<std::string>> corpus = {{"the", "cat"},
                                                        {"the", "dog"}};
  const TfidfModel model = fit_tfidf(corpus);
  const TfidfVector vec = tfidf_vector({"the", "cat"}, model);
  EXPECT_EQ(vec.count("the"), 0u);  // idf = ln(2/2) = 0
  EXPECT_GT(vec.at("cat"), 0.0);
}

TEST(Tfidf, EmptyFitCorpusIsAnError) {
  EXPECT_THROW(fit_tfidf({}), Error);
}

std::vector<std::vector<std::string>> cosine_fit_corpus() {
  return {{"alpha", "beta", "gamma"},
          {"delta", "epsilon", "zeta"},
          {"eta", "theta", "iota"},
          {"alpha", "delta", "eta"}};
}

TEST(Cosine, IdenticalDocumentsScoreOne) {
  const TfidfModel model = fit_tfidf(cosine_fit_corpus());
  const auto v = tfidf_vector({"alpha", "beta", "beta", "gamma"}, model);
  ASSERT_FALSE(v.empty());
  EXPECT_NEAR(cosine_similarity(v, v), 1.0, 1e-9);
}

TEST(Cosine, DisjointVocabulariesScoreZero) {
  const TfidfModel model = fit_tfidf(cosine_fit_corpus());
  const auto a = tfidf_vector({"beta", "gamma"}, model);
  const auto b = tfidf_vector({"epsilon", "zeta"}, model);
  ASSERT_FALSE(a.empty());
  ASSERT_FALSE(b.empty());
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
}

TEST(Cosine, SymmetricAndMatchesDenseDotProduct) {
  const TfidfModel model = fit_tfidf(cosine_fit_corpus());
  const auto a = tfidf_vector({"alpha", "beta", "delta"}, model);
  const auto b = tfidf_vector({"alpha", "delta", "epsilon", "eta"}, model);
  const double ab = cosine_similarity(a, b);
  const double ba = cosine_similarity(b, a);
  EXPECT_DOUBLE_EQ(ab, ba);

  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  EXPECT_NEAR(ab, dot / (std::sqrt(na) * std::sqrt(nb)), 1e-12);
}

TEST(Cosine, RandomNonZeroVectorAgainstItselfIsOne) {
  Rng rng(8);
  const std::vector<std::string> words = {"one", "two", "three", "four",
                                          "five", "six"};
  std::vector<std::vector<std::string>> corpus;
  for (int d = 0; d < 6; ++d) {
    std::vector<std::string> doc;
    const size_t n = 2 + rng.uniform_index(6);
    for (size_t i = 0; i < n; ++i) {
      doc.push_back(words[rng.uniform_index(words.size())]);
    }
    corpus.push_back(std::move(doc));
  }
  const TfidfModel model = fit_tfidf(corpus);
  for (const auto& doc : corpus) {
    const auto v = tfidf_vector(doc, model);
    if (v.empty()) continue;
    EXPECT_NEAR(cosine_similarity(v, v), 1.0, 1e-9);
  }
}

TEST(Cosine, BothZeroVectorsAreAnError) {
  try {
    cosine_similarity({}, {});
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "zero_vector");
  }
}

TEST(Cosine, OneZeroVectorScoresZero) {
  const TfidfModel model = fit_tfidf(cosine_fit_corpus());
  const auto a = tfidf_vector({"alpha"}, model);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, {}), 0.0);
}

// The bundled raw fixture, once ingested, must show the class-term audit
// pattern: illness-class posts mention their roots, none-class posts do not.
TEST(Fixture, IllnessClassesCooccurMoreThanNone) {
  const auto raws = load_raw_jsonl(std::string(MINDGAUGE_SOURCE_DIR) +
                                   "/data/fixtures/raw_60.jsonl");
  const IngestResult result = ingest_posts(raws);
  ASSERT_FALSE(result.curated.empty());
  const auto table =
      keyword_cooccurrence(result.curated, RootFormSet::standard());
  const size_t none_col = static_cast<size_t>(label_code(Label::kNone));
  for (size_t c = 0; c < 5; ++c) {
    double illness_mean = 0.0, none_mean = 0.0;
    for (size_t g = 0; g < 5; ++g) {
      illness_mean += table.fractions[g][c];
      none_mean += table.fractions[g][none_col];
    }
    EXPECT_GT(illness_mean, none_mean) << "label column " << c;
  }
}

}  // namespace
}  // namespace mindgauge
