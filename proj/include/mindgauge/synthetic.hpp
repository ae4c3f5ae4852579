// Seeded synthetic corpus with planted class keywords. Each class gets a
// primary signal (root-bearing words for the illness classes, topic words
// for none), a weaker secondary signal of root-free keywords, and shared
// filler drawn from synonym groups. The layering is deliberate: removing
// root words degrades a trained model but leaves it above chance, replacing
// them with "illness" (a token planted only in none-class documents) pulls
// predictions toward none, and replacing them with other classes' roots is
// worst of all.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mindgauge/common.hpp"
#include "mindgauge/corpus.hpp"
#include "mindgauge/label.hpp"
#include "mindgauge/rng.hpp"

namespace mindgauge {

namespace synthdata {

// Mutually substitutable filler words; the lexicon below mirrors these rows.
inline const std::vector<std::vector<std::string>>& synonym_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"sad", "unhappy", "sorrowful"},
      {"happy", "glad", "cheerful"},
      {"big", "large", "huge"},
      {"small", "little", "tiny"},
      {"fast", "quick", "rapid"},
      {"slow", "sluggish", "gradual"},
      {"smart", "clever", "bright"},
      {"weird", "strange", "odd"},
      {"hard", "difficult", "tough"},
      {"easy", "simple", "effortless"},
      {"start", "begin", "commence"},
      {"end", "finish", "conclude"},
      {"talk", "speak", "chat"},
      {"walk", "stroll", "wander"},
      {"look", "glance", "gaze"},
      {"think", "ponder", "reflect"},
      {"make", "build", "create"},
      {"help", "assist", "aid"},
      {"ask", "question", "inquire"},
      {"answer", "reply", "respond"},
      {"good", "fine", "decent"},
      {"bad", "poor", "awful"},
      {"old", "ancient", "aged"},
      {"new", "recent", "fresh"},
      {"often", "frequently", "regularly"},
      {"rarely", "seldom", "scarcely"},
      {"maybe", "perhaps", "possibly"},
      {"really", "truly", "genuinely"},
      {"tired", "weary", "exhausted"},
      {"eat", "dine", "consume"},
  };
  return groups;
}

inline const std::vector<std::string>& glue_words() {
  static const std::vector<std::string> words = {
      "the", "a",   "an", "and", "or",   "of", "to", "in", "on", "for",
      "with", "it", "is", "was", "i",    "my", "me", "at", "this", "that"};
  return words;
}

// Surface forms that contain the class root.
inline const std::vector<std::string>& root_words(Label label) {
  static const std::vector<std::string> adhd = {"adhd"};
  static const std::vector<std::string> anxiety = {"anxiety", "anxious"};
  static const std::vector<std::string> bipolar = {"bipolar"};
  static const std::vector<std::string> depression = {"depression", "depressed",
                                                      "depressing"};
  static const std::vector<std::string> ptsd = {"ptsd"};
  static const std::vector<std::string> none = {};
  switch (label) {
    case Label::kAdhd: return adhd;
    case Label::kAnxiety: return anxiety;
    case Label::kBipolar: return bipolar;
    case Label::kDepression: return depression;
    case Label::kPtsd: return ptsd;
    case Label::kNone: return none;
  }
  throw Error("label", "unknown label");
}

// Root-free class keywords; these survive every masking mode.
inline const std::vector<std::string>& secondary_words(Label label) {
  static const std::vector<std::string> adhd = {"focus", "distracted",
                                                "hyperactive"};
  static const std::vector<std::string> anxiety = {"panic", "worry",
                                                   "overthinking"};
  static const std::vector<std::string> bipolar = {"manic", "mania", "swings"};
  static const std::vector<std::string> depression = {"hopeless", "worthless",
                                                      "numb"};
  static const std::vector<std::string> ptsd = {"flashbacks", "nightmares",
                                                "trauma"};
  static const std::vector<std::string> none = {"playlist", "flight",
                                                "election"};
  switch (label) {
    case Label::kAdhd: return adhd;
    case Label::kAnxiety: return anxiety;
    case Label::kBipolar: return bipolar;
    case Label::kDepression: return depression;
    case Label::kPtsd: return ptsd;
    case Label::kNone: return none;
  }
  throw Error("label", "unknown label");
}

// Primary signal for the none class, standing in for root words.
inline const std::vector<std::string>& none_topic_words() {
  static const std::vector<std::string> words = {"music",   "travel", "politics",
                                                 "science", "dataset", "grammar"};
  return words;
}

}  // namespace synthdata

struct SyntheticConfig {
  int docs_per_class = 100;
  std::uint64_t seed = 7;
  int body_min_tokens = 30;
  int body_max_tokens = 45;
  int title_min_tokens = 4;
  int title_max_tokens = 7;
};

namespace detail {

inline std::string pick(const std::vector<std::string>& words, Rng& rng) {
  return words[rng.uniform_index(words.size())];
}

inline std::string pick_filler(Rng& rng) {
  if (rng.uniform() < 0.3) return pick(synthdata::glue_words(), rng);
  const auto& groups = synthdata::synonym_groups();
  const auto& group = groups[rng.uniform_index(groups.size())];
  return group[rng.uniform_index(group.size())];
}

// Pads the keyword list with filler, shuffles, then pins one occurrence of
// `anchor` to the final position. A recurrent model that reads the last
// state sees a clean class signal there; attention models are indifferent
// to the placement.
inline std::vector<std::string> assemble(std::vector<std::string> keywords,
                                         const std::string& anchor,
                                         size_t target_len, Rng& rng) {
  while (keywords.size() < target_len) keywords.push_back(pick_filler(rng));
  rng.shuffle(keywords);
  if (!anchor.empty()) {
    for (size_t i = 0; i < keywords.size(); ++i) {
      if (keywords[i] == anchor) {
        std::swap(keywords[i], keywords.back());
        break;
      }
    }
  }
  return keywords;
}

}  // namespace detail

// Deterministic: the text of document i depends only on (seed, i).
inline std::vector<CuratedPost> generate_synthetic_corpus(
    const SyntheticConfig& cfg = {}) {
  if (cfg.docs_per_class < 1) throw Error("config", "docs_per_class must be >= 1");
  if (cfg.body_min_tokens > cfg.body_max_tokens ||
      cfg.title_min_tokens > cfg.title_max_tokens) {
    throw Error("config", "token range bounds are inverted");
  }
  std::vector<CuratedPost> posts;
  posts.reserve(static_cast<size_t>(cfg.docs_per_class) * kNumClasses);
  int index = 0;
  for (Label label : kAllLabels) {
    for (int d = 0; d < cfg.docs_per_class; ++d, ++index) {
      Rng rng(derive_seed(cfg.seed, "doc:" + std::to_string(index)));

      std::vector<std::string> body_keys;
      const auto& roots = synthdata::root_words(label);
      const auto& secondary = synthdata::secondary_words(label);
      if (label == Label::kNone) {
        const size_t n_topic = 2 + rng.uniform_index(3);
        for (size_t i = 0; i < n_topic; ++i) {
          body_keys.push_back(detail::pick(synthdata::none_topic_words(), rng));
        }
        // "illness" occurs casually in some none documents and nowhere
        // else. The association must stay mild: strong enough that swapping
        // a class root for "illness" drags predictions toward none, weak
        // enough that surviving class keywords often win the argument.
        if (rng.uniform() < 0.25) body_keys.push_back("illness");
      } else {
        const size_t n_root = 2 + rng.uniform_index(3);
        for (size_t i = 0; i < n_root; ++i) {
          body_keys.push_back(detail::pick(roots, rng));
        }
      }
      const std::string body_anchor = body_keys[0];
      const size_t n_sec = 2 + rng.uniform_index(2);
      for (size_t i = 0; i < n_sec; ++i) {
        body_keys.push_back(detail::pick(secondary, rng));
      }
      const size_t body_len =
          static_cast<size_t>(cfg.body_min_tokens) +
          rng.uniform_index(static_cast<size_t>(cfg.body_max_tokens -
                                                cfg.body_min_tokens + 1));
      const auto body_tokens =
          detail::assemble(std::move(body_keys), body_anchor, body_len, rng);

      std::vector<std::string> title_keys;
      if (rng.uniform() < 0.8) {
        title_keys.push_back(label == Label::kNone
                                 ? detail::pick(synthdata::none_topic_words(), rng)
                                 : detail::pick(roots, rng));
      } else {
        title_keys.push_back(detail::pick(secondary, rng));
      }
      const std::string title_anchor = title_keys[0];
      const size_t title_len =
          static_cast<size_t>(cfg.title_min_tokens) +
          rng.uniform_index(static_cast<size_t>(cfg.title_max_tokens -
                                                cfg.title_min_tokens + 1));
      const auto title_tokens =
          detail::assemble(std::move(title_keys), title_anchor, title_len, rng);

      CuratedPost post;
      char id[24];
      std::snprintf(id, sizeof(id), "syn-%06d", index);
      post.id = id;
      post.title = detokenize(title_tokens);
      post.body = detokenize(body_tokens);
      post.label = label;
      post.upvotes = 11 + static_cast<int>(rng.uniform_index(490));
      post.token_count = static_cast<int>(body_tokens.size());
      posts.push_back(std::move(post));
    }
  }
  return posts;
}

// The same corpus shaped as raw dump rows, for exercising the ingest path.
inline std::vector<RawPost> synthetic_raw_dump(const SyntheticConfig& cfg = {}) {
  static const std::vector<std::string> general = {
      "music", "travel", "india",       "politics",
      "english", "datasets", "mathematics", "science"};
  std::vector<RawPost> raws;
  int none_counter = 0;
  for (const CuratedPost& post : generate_synthetic_corpus(cfg)) {
    RawPost raw;
    raw.id = post.id;
    raw.subreddit = post.label == Label::kNone
                        ? general[static_cast<size_t>(none_counter++) % general.size()]
                        : label_name(post.label);
    raw.title = post.title;
    raw.body = post.body;
    raw.upvotes = post.upvotes;
    raws.push_back(std::move(raw));
  }
  return raws;
}

// Lexicon and stop-word content matching the generator's vocabulary, handy
// for in-memory setups that should behave like the bundled data files.
inline std::string synthetic_synonyms_tsv() {
  std::string out;
  for (const auto& group : synthdata::synonym_groups()) {
    for (size_t i = 0; i < group.size(); ++i) {
      out += group[i];
      out += '\t';
      bool first = true;
      for (size_t j = 0; j < group.size(); ++j) {
        if (j == i) continue;
        if (!first) out += ',';
        out += group[j];
        first = false;
      }
      out += '\n';
    }
  }
  return out;
}

inline std::string synthetic_stopwords_txt() {
  std::string out;
  for (const std::string& w : synthdata::glue_words()) {
    out += w;
    out += '\n';
  }
  return out;
}

}  // namespace mindgauge
