// Dataset curation: raw dump ingestion, quality filters, scrubbing, label
// assignment and stratified train/validation/test splitting.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindgauge/common.hpp"
#include "mindgauge/label.hpp"
#include "mindgauge/rng.hpp"
#include "mindgauge/textproc.hpp"

namespace mindgauge {

struct RawPost {
  std::string id;
  std::string subreddit;
  std::string title;
  std::string body;
  std::int64_t upvotes = 0;
};

struct CuratedPost {
  std::string id;
  std::string title;
  std::string body;
  Label label = Label::kNone;
  std::int64_t upvotes = 0;
  int token_count = 0;  // body tokens, counted after scrubbing
};

inline constexpr std::int64_t kMinUpvotes = 10;  // accept requires strictly more
inline constexpr int kMinBodyTokens = 30;

namespace detail {

inline bool has_prefix_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    char a = s[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != prefix[i]) return false;
  }
  return true;
}

inline bool is_url_run(std::string_view run) {
  return has_prefix_ci(run, "http://") || has_prefix_ci(run, "https://") ||
         has_prefix_ci(run, "www.");
}

// "u/<name>" or "/u/<name>", whole run. Names may use letters, digits,
// underscore and hyphen.
inline bool is_username_run(std::string_view run) {
  size_t i = 0;
  if (i < run.size() && run[i] == '/') ++i;
  if (i + 1 >= run.size() || (run[i] != 'u' && run[i] != 'U') || run[i + 1] != '/') {
    return false;
  }
  i += 2;
  if (i >= run.size()) return false;
  for (; i < run.size(); ++i) {
    const char c = run[i];
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

// Deletes every whitespace-delimited run that is a URL (http://, https:// or
// www. prefix) or a username mention (u/<name>, /u/<name>). Everything else,
// including the surrounding whitespace, is preserved byte for byte, which
// makes the operation idempotent.
inline std::string scrub_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  size_t run_start = 0;
  bool in_run = false;
  const auto flush = [&](size_t end) {
    if (!in_run) return;
    const std::string_view run = text.substr(run_start, end - run_start);
    if (!detail::is_url_run(run) && !detail::is_username_run(run)) {
      out.append(run);
    }
    in_run = false;
  };
  while (i < text.size()) {
    const size_t start = i;
    const std::uint32_t cp = detail::decode_utf8(text, i);
    if (detail::is_space_codepoint(cp)) {
      flush(start);
      out.append(text.substr(start, i - start));
    } else if (!in_run) {
      in_run = true;
      run_start = start;
    }
  }
  flush(text.size());
  return out;
}

enum class RejectReason { kLowUpvotes, kTooShort, kUnknownSource };

inline const char* reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::kLowUpvotes: return "low_upvotes";
    case RejectReason::kTooShort: return "too_short";
    case RejectReason::kUnknownSource: return "unknown_source";
  }
  throw Error("reject", "invalid reason");
}

struct FilterDecision {
  bool accepted = false;
  RejectReason reason = RejectReason::kLowUpvotes;  // meaningful when rejected
  int token_count = 0;  // scrubbed-body tokens
};

// Quality filter: accept iff upvotes are strictly above min_upvotes and the
// scrubbed body tokenizes to at least min_tokens tokens. Total function.
inline FilterDecision filter_post(const RawPost& raw,
                                  std::int64_t min_upvotes = kMinUpvotes,
                                  int min_tokens = kMinBodyTokens) {
  FilterDecision d;
  d.token_count = static_cast<int>(tokenize(scrub_text(raw.body)).size());
  if (raw.upvotes <= min_upvotes) {
    d.reason = RejectReason::kLowUpvotes;
    return d;
  }
  if (d.token_count < min_tokens) {
    d.reason = RejectReason::kTooShort;
    return d;
  }
  d.accepted = true;
  return d;
}

struct Reject {
  std::string id;
  RejectReason reason;
};

struct IngestResult {
  std::vector<CuratedPost> curated;
  std::vector<Reject> rejects;
};

// Full record-at-a-time curation: label assignment, scrubbing of title and
// body, then the quality filter. Unknown source subreddits become recorded
// rejects rather than aborting the run; every drop is auditable.
inline IngestResult ingest_posts(const std::vector<RawPost>& raws,
                                 std::int64_t min_upvotes = kMinUpvotes,
                                 int min_tokens = kMinBodyTokens) {
  IngestResult result;
  for (const RawPost& raw : raws) {
    if (raw.id.empty()) throw Error("raw_post", "post with empty id");
    if (raw.upvotes < 0) {
      throw Error("raw_post", "post " + raw.id + " has negative upvotes");
    }
    Label label;
    try {
      label = assign_label(to_lower(raw.subreddit));
    } catch (const Error& e) {
      if (e.code() != "unknown_source") throw;
      result.rejects.push_back({raw.id, RejectReason::kUnknownSource});
      continue;
    }
    const FilterDecision d = filter_post(raw, min_upvotes, min_tokens);
    if (!d.accepted) {
      result.rejects.push_back({raw.id, d.reason});
      continue;
    }
    CuratedPost post;
    post.id = raw.id;
    post.title = scrub_text(raw.title);
    post.body = scrub_text(raw.body);
    post.label = label;
    post.upvotes = raw.upvotes;
    post.token_count = d.token_count;
    result.curated.push_back(std::move(post));
  }
  return result;
}

struct DatasetSplit {
  std::vector<CuratedPost> train;
  std::vector<CuratedPost> validation;
  std::vector<CuratedPost> test;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios = {0.8, 0.1, 0.1};
};

// Stratified, seeded split. Posts are canonically sorted by id before the
// per-label shuffle, so the assignment depends only on the id set and the
// seed, never on input file order. Per-label counts follow the largest
// remainder rule, which keeps every split within one post of its exact
// stratified target.
inline DatasetSplit split_dataset(const std::vector<CuratedPost>& posts,
                                  std::array<double, 3> ratios,
                                  std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw Error("ratios", "split ratios must be positive and sum to 1");
  }
  if (posts.empty()) throw Error("empty", "no posts to split");

  std::map<Label, std::vector<const CuratedPost*>> by_label;
  std::map<std::string_view, int> seen;
  for (const CuratedPost& post : posts) {
    if (++seen[post.id] > 1) {
      throw Error("duplicate_id", "post id '" + post.id + "' appears twice");
    }
    by_label[post.label].push_back(&post);
  }
  for (auto& [label, group] : by_label) {
    if (group.size() < 3) {
      throw Error("insufficient_class",
                  std::string("label '") + label_name(label) +
                      "' has fewer than 3 posts");
    }
    std::sort(group.begin(), group.end(),
              [](const CuratedPost* a, const CuratedPost* b) { return a->id < b->id; });
  }

  DatasetSplit split;
  split.seed = seed;
  split.ratios = ratios;
  for (auto& [label, group] : by_label) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(label_code(label))));
    rng.shuffle(group);

    const size_t n = group.size();
    std::array<size_t, 3> counts{};
    std::array<double, 3> frac{};
    size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
      const double target = ratios[static_cast<size_t>(k)] * static_cast<double>(n);
      counts[static_cast<size_t>(k)] = static_cast<size_t>(std::floor(target));
      frac[static_cast<size_t>(k)] = target - std::floor(target);
      assigned += counts[static_cast<size_t>(k)];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return frac[static_cast<size_t>(a)] > frac[static_cast<size_t>(b)];
    });
    for (size_t r = 0; r < n - assigned; ++r) {
      ++counts[static_cast<size_t>(order[r % 3])];
    }

    size_t i = 0;
    for (size_t k = 0; k < counts[0]; ++k) split.train.push_back(*group[i++]);
    for (size_t k = 0; k < counts[1]; ++k) split.validation.push_back(*group[i++]);
    for (size_t k = 0; k < counts[2]; ++k) split.test.push_back(*group[i++]);
  }
  return split;
}

// ---- JSONL / JSON persistence -------------------------------------------

inline std::vector<RawPost> parse_raw_jsonl(std::string_view content) {
  std::vector<RawPost> posts;
  size_t lineno = 0;
  for (const auto& line : split_lines(content)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("parse", "line " + std::to_string(lineno) + ": " + e.what());
    }
    RawPost p;
    p.id = j.at("id").get<std::string>();
    p.subreddit = to_lower(j.at("subreddit").get<std::string>());
    p.title = j.value("title", std::string());
    p.body = j.value("selftext", std::string());
    p.upvotes = j.at("ups").get<std::int64_t>();
    posts.push_back(std::move(p));
  }
  return posts;
}

inline std::vector<RawPost> load_raw_jsonl(const std::filesystem::path& path) {
  return parse_raw_jsonl(read_file(path));
}

inline std::string curated_to_jsonl(const std::vector<CuratedPost>& posts) {
  std::string out;
  for (const CuratedPost& p : posts) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["body"] = p.body;
    j["label"] = label_name(p.label);
    j["upvotes"] = p.upvotes;
    j["token_count"] = p.token_count;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<CuratedPost> parse_curated_jsonl(std::string_view content) {
  std::vector<CuratedPost> posts;
  size_t lineno = 0;
  for (const auto& line : split_lines(content)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("parse", "line " + std::to_string(lineno) + ": " + e.what());
    }
    CuratedPost p;
    p.id = j.at("id").get<std::string>();
    p.title = j.at("title").get<std::string>();
    p.body = j.at("body").get<std::string>();
    p.label = parse_label(j.at("label").get<std::string>());
    p.upvotes = j.at("upvotes").get<std::int64_t>();
    p.token_count = j.at("token_count").get<int>();
    posts.push_back(std::move(p));
  }
  return posts;
}

inline std::vector<CuratedPost> load_curated_jsonl(
    const std::filesystem::path& path) {
  return parse_curated_jsonl(read_file(path));
}

inline std::string rejects_to_jsonl(const std::vector<Reject>& rejects) {
  std::string out;
  for (const Reject& r : rejects) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["reason"] = reject_reason_name(r.reason);
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json split_to_json(const DatasetSplit& split) {
  const auto ids_of = [](const std::vector<CuratedPost>& posts) {
    std::vector<std::string> ids;
    ids.reserve(posts.size());
    for (const auto& p : posts) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  nlohmann::ordered_json j;
  j["seed"] = split.seed;
  j["ratios"] = split.ratios;
  j["train"] = ids_of(split.train);
  j["validation"] = ids_of(split.validation);
  j["test"] = ids_of(split.test);
  return j;
}

// Reassembles a split from its manifest and the curated corpus. Posts inside
// each split come back in manifest (sorted-id) order.
inline DatasetSplit split_from_json(const nlohmann::json& j,
                                    const std::vector<CuratedPost>& corpus) {
  std::map<std::string, const CuratedPost*> by_id;
  for (const CuratedPost& p : corpus) by_id[p.id] = &p;
  const auto take = [&](const char* key) {
    std::vector<CuratedPost> out;
    for (const auto& id : j.at(key)) {
      auto it = by_id.find(id.get<std::string>());
      if (it == by_id.end()) {
        throw Error("split", "id '" + id.get<std::string>() +
                                 "' in split manifest is not in the corpus");
      }
      out.push_back(*it->second);
    }
    return out;
  };
  DatasetSplit split;
  split.seed = j.at("seed").get<std::uint64_t>();
  const auto r = j.at("ratios");
  split.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
  split.train = take("train");
  split.validation = take("validation");
  split.test = take("test");
  return split;
}

}  // namespace mindgauge
