// The closed six-way class enumeration and the subreddit -> label mapping.
#pragma once

#include <array>
#include <string>
#include <string_view>

#include "mindgauge/common.hpp"

namespace mindgauge {

// Codes are stable and ordered; reports and confusion matrices use this order.
enum class Label : int {
  kAdhd = 0,
  kAnxiety = 1,
  kBipolar = 2,
  kDepression = 3,
  kPtsd = 4,
  kNone = 5,
};

inline constexpr int kNumClasses = 6;

inline constexpr std::array<Label, kNumClasses> kAllLabels = {
    Label::kAdhd,    Label::kAnxiety, Label::kBipolar,
    Label::kDepression, Label::kPtsd, Label::kNone};

inline const char* label_name(Label label) {
  switch (label) {
    case Label::kAdhd: return "adhd";
    case Label::kAnxiety: return "anxiety";
    case Label::kBipolar: return "bipolar";
    case Label::kDepression: return "depression";
    case Label::kPtsd: return "ptsd";
    case Label::kNone: return "none";
  }
  throw Error("label", "invalid label code");
}

inline Label parse_label(std::string_view name) {
  for (Label label : kAllLabels) {
    if (name == label_name(label)) return label;
  }
  throw Error("label", "unknown label name '" + std::string(name) + "'");
}

inline int label_code(Label label) { return static_cast<int>(label); }

inline Label label_from_code(int code) {
  if (code < 0 || code >= kNumClasses) throw Error("label", "code out of range");
  return static_cast<Label>(code);
}

// Subreddits that map directly to an illness class.
inline constexpr std::array<std::pair<std::string_view, Label>, 5>
    kIllnessSubreddits = {{{"bipolar", Label::kBipolar},
                           {"adhd", Label::kAdhd},
                           {"anxiety", Label::kAnxiety},
                           {"depression", Label::kDepression},
                           {"ptsd", Label::kPtsd}}};

// General-topic subreddits pooled into the none class.
inline constexpr std::array<std::string_view, 8> kGeneralSubreddits = {
    "music",    "travel",   "india",       "politics",
    "english",  "datasets", "mathematics", "science"};

// Closed mapping from source subreddit to class label. Unknown sources are an
// error, never a silent default.
inline Label assign_label(std::string_view subreddit) {
  for (const auto& [name, label] : kIllnessSubreddits) {
    if (subreddit == name) return label;
  }
  for (std::string_view name : kGeneralSubreddits) {
    if (subreddit == name) return Label::kNone;
  }
  throw Error("unknown_source",
              "subreddit '" + std::string(subreddit) + "' is not in the corpus");
}

}  // namespace mindgauge
