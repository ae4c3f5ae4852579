// Text processing: the tokenizer of record, vocabulary construction, sequence
// encoding, class root-form matching, stop words and the synonym lexicon.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindgauge/common.hpp"
#include "mindgauge/label.hpp"

namespace mindgauge {

inline bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace detail {

inline bool is_space_codepoint(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
    case 0x85: case 0xa0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

// Decodes one UTF-8 code point starting at i; on malformed input consumes a
// single byte and reports it as a non-space character.
inline std::uint32_t decode_utf8(std::string_view s, size_t& i) {
  const auto byte = [&](size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  size_t len = 1;
  std::uint32_t cp = b0;
  if (b0 >= 0xf0) {
    len = 4;
    cp = b0 & 0x07u;
  } else if (b0 >= 0xe0) {
    len = 3;
    cp = b0 & 0x0fu;
  } else if (b0 >= 0xc0) {
    len = 2;
    cp = b0 & 0x1fu;
  } else if (b0 >= 0x80) {
    ++i;
    return 0xfffd;
  }
  if (i + len > s.size()) {
    ++i;
    return b0 < 0x80 ? cp : 0xfffd;
  }
  for (size_t k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xc0u) != 0x80u) {
      ++i;
      return 0xfffd;
    }
    cp = (cp << 6) | (byte(i + k) & 0x3fu);
  }
  i += len;
  return cp;
}

}  // namespace detail

// Tokenizer of record. Lowercases, splits on Unicode whitespace, then
// detaches leading and trailing ASCII punctuation from each run as
// single-character tokens. Internal punctuation (apostrophes, hyphens,
// slashes, dots) stays attached: "i'm" and "co-op" survive whole,
// "depressed." becomes ["depressed", "."].
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const std::string lowered = to_lower(text);
  const std::string_view s = lowered;

  size_t i = 0;
  std::string run;
  const auto flush_run = [&]() {
    if (run.empty()) return;
    size_t lo = 0;
    size_t hi = run.size();
    while (lo < hi && is_ascii_punct(run[lo])) {
      tokens.emplace_back(1, run[lo]);
      ++lo;
    }
    size_t trailing_start = hi;
    while (trailing_start > lo && is_ascii_punct(run[trailing_start - 1])) {
      --trailing_start;
    }
    if (trailing_start > lo) {
      tokens.emplace_back(run.substr(lo, trailing_start - lo));
    }
    for (size_t k = trailing_start; k < hi; ++k) {
      tokens.emplace_back(1, run[k]);
    }
    run.clear();
  };

  while (i < s.size()) {
    const size_t start = i;
    const std::uint32_t cp = detail::decode_utf8(s, i);
    if (detail::is_space_codepoint(cp)) {
      flush_run();
    } else {
      run.append(s.substr(start, i - start));
    }
  }
  flush_run();
  return tokens;
}

inline std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Token -> id mapping. Id 0 is padding, id 1 is unknown; optional sequence
// markers follow, then corpus tokens ordered by descending frequency with
// lexicographic tie-break. Ids are dense.
class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";
  static constexpr const char* kBeginToken = "<begin>";
  static constexpr const char* kSepToken = "<sep>";

  Vocabulary() : min_frequency_(2) {
    add_token(kPadToken);
    add_token(kUnkToken);
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  int min_frequency() const { return min_frequency_; }

  int id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnkId : it->second;
  }

  bool has(const std::string& token) const { return ids_.count(token) != 0; }

  const std::string& token_of(int id) const {
    if (id < 0 || id >= size()) throw Error("vocab", "id out of range");
    return tokens_[static_cast<size_t>(id)];
  }

  bool has_markers() const { return begin_id_ >= 0; }

  int begin_id() const {
    if (begin_id_ < 0) throw Error("vocab", "vocabulary has no begin marker");
    return begin_id_;
  }

  int sep_id() const {
    if (sep_id_ < 0) throw Error("vocab", "vocabulary has no separator marker");
    return sep_id_;
  }

  nlohmann::json to_json() const {
    // std::map gives sorted keys, so the export is byte-stable.
    std::map<std::string, int> flat;
    for (int id = 0; id < size(); ++id) flat[tokens_[static_cast<size_t>(id)]] = id;
    return nlohmann::json(flat);
  }

  static Vocabulary from_json(const nlohmann::json& j) {
    Vocabulary v;
    v.tokens_.clear();
    v.ids_.clear();
    std::vector<std::string> by_id(j.size());
    for (auto it = j.begin(); it != j.end(); ++it) {
      const int id = it.value().get<int>();
      if (id < 0 || id >= static_cast<int>(j.size())) {
        throw Error("vocab", "ids are not dense");
      }
      by_id[static_cast<size_t>(id)] = it.key();
    }
    for (const auto& token : by_id) v.add_token(token);
    if (v.size() < 2 || v.tokens_[0] != kPadToken || v.tokens_[1] != kUnkToken) {
      throw Error("vocab", "reserved tokens missing or misplaced");
    }
    if (v.has(kBeginToken)) v.begin_id_ = v.ids_.at(kBeginToken);
    if (v.has(kSepToken)) v.sep_id_ = v.ids_.at(kSepToken);
    return v;
  }

  friend Vocabulary build_vocabulary(
      const std::vector<std::vector<std::string>>& corpus, int min_frequency,
      bool with_markers);

 private:
  void add_token(const std::string& token) {
    ids_[token] = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  int min_frequency_;
  int begin_id_ = -1;
  int sep_id_ = -1;
};

// Builds the vocabulary over tokenized documents. Tokens whose corpus
// frequency is below min_frequency are dropped (they encode to the unknown
// id). with_markers additionally reserves the begin/separator markers used
// for sequence-pair inputs.
inline Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& corpus, int min_frequency = 2,
    bool with_markers = false) {
  if (corpus.empty()) throw Error("empty_corpus", "no documents");
  Vocabulary vocab;
  vocab.min_frequency_ = min_frequency;
  if (with_markers) {
    vocab.add_token(Vocabulary::kBeginToken);
    vocab.begin_id_ = vocab.ids_.at(Vocabulary::kBeginToken);
    vocab.add_token(Vocabulary::kSepToken);
    vocab.sep_id_ = vocab.ids_.at(Vocabulary::kSepToken);
  }

  std::unordered_map<std::string, std::int64_t> freq;
  for (const auto& doc : corpus) {
    for (const auto& token : doc) ++freq[token];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(freq.size());
  for (const auto& [token, count] : freq) {
    if (count >= min_frequency && !vocab.has(token)) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [token, count] : kept) {
    (void)count;
    vocab.add_token(token);
  }
  return vocab;
}

// Fixed-length id encoding: unknown tokens map to the unknown id, overlong
// sequences are tail-truncated, short ones right-padded with the padding id.
inline std::vector<int> encode_sequence(const std::vector<std::string>& tokens,
                                        const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw Error("length", "max_len must be >= 1");
  std::vector<int> ids(static_cast<size_t>(max_len), Vocabulary::kPadId);
  const size_t n = std::min(tokens.size(), static_cast<size_t>(max_len));
  for (size_t i = 0; i < n; ++i) ids[i] = vocab.id_of(tokens[i]);
  return ids;
}

// The five class root-form groups. A token "contains" a root when the root
// string occurs as a substring of the token.
class RootFormSet {
 public:
  static RootFormSet standard() {
    RootFormSet r;
    r.roots_[label_code(Label::kAdhd)] = {"adhd"};
    r.roots_[label_code(Label::kAnxiety)] = {"anxiou", "anxiet"};
    r.roots_[label_code(Label::kBipolar)] = {"bipolar"};
    r.roots_[label_code(Label::kDepression)] = {"depress"};
    r.roots_[label_code(Label::kPtsd)] = {"ptsd"};
    return r;
  }

  const std::vector<std::string>& roots_for(Label label) const {
    return roots_[static_cast<size_t>(label_code(label))];
  }

  bool contains_root(const std::string& token, Label label) const {
    for (const auto& root : roots_for(label)) {
      if (token.find(root) != std::string::npos) return true;
    }
    return false;
  }

  bool contains_any_root(const std::string& token) const {
    for (Label label : kAllLabels) {
      if (contains_root(token, label)) return true;
    }
    return false;
  }

  // Root strings of every class except the given one, in stable class order.
  std::vector<std::string> other_class_roots(Label label) const {
    std::vector<std::string> pool;
    for (Label other : kAllLabels) {
      if (other == label || other == Label::kNone) continue;
      for (const auto& root : roots_for(other)) pool.push_back(root);
    }
    return pool;
  }

 private:
  std::array<std::vector<std::string>, kNumClasses> roots_;
};

inline bool contains_root(const std::string& token, const RootFormSet& roots,
                          Label label) {
  return roots.contains_root(token, label);
}

class StopWordList {
 public:
  static StopWordList from_lines(const std::vector<std::string>& lines) {
    StopWordList list;
    for (const auto& line : lines) {
      std::string word = to_lower(line);
      while (!word.empty() && (word.back() == ' ' || word.back() == '\t')) {
        word.pop_back();
      }
      if (!word.empty() && word[0] != '#') list.words_.insert(word);
    }
    if (list.words_.empty()) throw Error("stopwords", "stop-word list is empty");
    return list;
  }

  static StopWordList load(const std::filesystem::path& path) {
    return from_lines(split_lines(read_file(path)));
  }

  bool contains(const std::string& token) const {
    return words_.count(token) != 0;
  }

  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Bundled synonym table, one line per entry: "word<TAB>syn1,syn2,...".
// Entries never contain the headword itself; an entry whose synonym list
// collapses to nothing is a load-time error.
class SynonymLexicon {
 public:
  static SynonymLexicon from_lines(const std::vector<std::string>& lines) {
    SynonymLexicon lex;
    size_t lineno = 0;
    for (const auto& raw : lines) {
      ++lineno;
      if (raw.empty() || raw[0] == '#') continue;
      const size_t tab = raw.find('\t');
      if (tab == std::string::npos) {
        throw Error("lexicon", "line " + std::to_string(lineno) + ": missing tab");
      }
      const std::string word = to_lower(raw.substr(0, tab));
      std::vector<std::string> syns;
      for (auto& part : split_on(raw.substr(tab + 1), ',')) {
        std::string syn = to_lower(part);
        if (!syn.empty() && syn != word) syns.push_back(std::move(syn));
      }
      if (word.empty() || syns.empty()) {
        throw Error("lexicon", "line " + std::to_string(lineno) +
                                   ": entry for '" + word +
                                   "' has no usable synonyms");
      }
      lex.entries_[word] = std::move(syns);
    }
    return lex;
  }

  static SynonymLexicon load(const std::filesystem::path& path) {
    return from_lines(split_lines(read_file(path)));
  }

  const std::vector<std::string>& lookup(const std::string& token) const {
    static const std::vector<std::string> kEmpty;
    auto it = entries_.find(token);
    return it == entries_.end() ? kEmpty : it->second;
  }

  bool has(const std::string& token) const { return entries_.count(token) != 0; }
  size_t size() const { return entries_.size(); }

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

}  // namespace mindgauge
