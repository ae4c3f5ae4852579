// Evaluation: confusion matrix over the six classes, precision / recall / F1
// per class, and macro plus support-weighted aggregates. The weighted recall
// equals plain accuracy by construction; tests pin that identity.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "mindgauge/analysis.hpp"  // format_fixed
#include "mindgauge/common.hpp"
#include "mindgauge/label.hpp"

#include <nlohmann/json.hpp>

namespace mindgauge {

// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> cells{};

  std::int64_t& at(Label truth, Label pred) {
    return cells[static_cast<size_t>(truth)][static_cast<size_t>(pred)];
  }
  std::int64_t at(Label truth, Label pred) const {
    return cells[static_cast<size_t>(truth)][static_cast<size_t>(pred)];
  }
  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& row : cells)
      for (std::int64_t c : row) n += c;
    return n;
  }
  std::int64_t diagonal() const {
    std::int64_t n = 0;
    for (size_t i = 0; i < kNumClasses; ++i) n += cells[i][i];
    return n;
  }
  std::int64_t row_sum(Label truth) const {
    std::int64_t n = 0;
    for (std::int64_t c : cells[static_cast<size_t>(truth)]) n += c;
    return n;
  }
  std::int64_t col_sum(Label pred) const {
    std::int64_t n = 0;
    for (size_t i = 0; i < kNumClasses; ++i)
      n += cells[i][static_cast<size_t>(pred)];
    return n;
  }
};

inline ConfusionMatrix build_confusion(const std::vector<Label>& truth,
                                       const std::vector<Label>& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error("shape", "truth and prediction lists differ in length");
  }
  ConfusionMatrix cm;
  for (size_t i = 0; i < truth.size(); ++i) ++cm.at(truth[i], predicted[i]);
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct ClassReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double accuracy = 0.0;
  ClassMetrics macro;     // unweighted mean over all six classes
  ClassMetrics weighted;  // support-weighted mean; the headline aggregate
  std::int64_t total = 0;
  std::vector<std::string> warnings;  // zero-denominator notes
};

// A zero denominator (no predictions, or no true members, of a class) yields
// a 0.0 metric plus a warning rather than NaN.
inline ClassReport class_report(const ConfusionMatrix& cm) {
  ClassReport rep;
  rep.total = cm.total();
  if (rep.total == 0) throw Error("empty", "confusion matrix has no samples");
  rep.accuracy =
      static_cast<double>(cm.diagonal()) / static_cast<double>(rep.total);

  for (Label label : kAllLabels) {
    const auto i = static_cast<size_t>(label);
    ClassMetrics& m = rep.per_class[i];
    const std::int64_t tp = cm.at(label, label);
    const std::int64_t pred = cm.col_sum(label);
    const std::int64_t truth = cm.row_sum(label);
    m.support = truth;
    if (pred > 0) {
      m.precision = static_cast<double>(tp) / static_cast<double>(pred);
    } else {
      rep.warnings.push_back(std::string("no predictions for class ") +
                             label_name(label) + "; precision set to 0");
    }
    if (truth > 0) {
      m.recall = static_cast<double>(tp) / static_cast<double>(truth);
    } else {
      rep.warnings.push_back(std::string("no true samples for class ") +
                             label_name(label) + "; recall set to 0");
    }
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }

    rep.macro.precision += m.precision / static_cast<double>(kNumClasses);
    rep.macro.recall += m.recall / static_cast<double>(kNumClasses);
    rep.macro.f1 += m.f1 / static_cast<double>(kNumClasses);
    const double w =
        static_cast<double>(truth) / static_cast<double>(rep.total);
    rep.weighted.precision += w * m.precision;
    rep.weighted.recall += w * m.recall;
    rep.weighted.f1 += w * m.f1;
  }
  rep.macro.support = rep.total;
  rep.weighted.support = rep.total;
  return rep;
}

inline nlohmann::ordered_json metrics_to_json(const ClassMetrics& m) {
  return nlohmann::ordered_json{{"precision", m.precision},
                                {"recall", m.recall},
                                {"f1", m.f1},
                                {"support", m.support}};
}

inline nlohmann::ordered_json report_to_json(const ClassReport& rep) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (Label label : kAllLabels) {
    per_class[label_name(label)] =
        metrics_to_json(rep.per_class[static_cast<size_t>(label)]);
  }
  nlohmann::ordered_json j;
  j["accuracy"] = rep.accuracy;
  j["total"] = rep.total;
  j["per_class"] = per_class;
  j["macro"] = metrics_to_json(rep.macro);
  j["weighted"] = metrics_to_json(rep.weighted);
  j["warnings"] = rep.warnings;
  return j;
}

inline ClassMetrics metrics_from_json(const nlohmann::json& j) {
  ClassMetrics m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.support = j.at("support").get<std::int64_t>();
  return m;
}

inline ClassReport report_from_json(const nlohmann::json& j) {
  ClassReport rep;
  rep.accuracy = j.at("accuracy").get<double>();
  rep.total = j.at("total").get<std::int64_t>();
  for (Label label : kAllLabels) {
    rep.per_class[static_cast<size_t>(label)] =
        metrics_from_json(j.at("per_class").at(label_name(label)));
  }
  rep.macro = metrics_from_json(j.at("macro"));
  rep.weighted = metrics_from_json(j.at("weighted"));
  rep.warnings = j.at("warnings").get<std::vector<std::string>>();
  return rep;
}

inline std::string confusion_to_csv(const ConfusionMatrix& cm) {
  std::string out = "truth";
  for (Label pred : kAllLabels) {
    out += ',';
    out += label_name(pred);
  }
  out += '\n';
  for (Label truth : kAllLabels) {
    out += label_name(truth);
    for (Label pred : kAllLabels) {
      out += ',';
      out += std::to_string(cm.at(truth, pred));
    }
    out += '\n';
  }
  return out;
}

// Plain-text table in the usual classification-report layout.
inline std::string report_summary(const ClassReport& rep) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %9s %9s %9s %9s\n", "", "precision",
                "recall", "f1", "support");
  out += buf;
  for (Label label : kAllLabels) {
    const ClassMetrics& m = rep.per_class[static_cast<size_t>(label)];
    std::snprintf(buf, sizeof(buf), "%-12s %9.4f %9.4f %9.4f %9lld\n",
                  label_name(label), m.precision, m.recall, m.f1,
                  static_cast<long long>(m.support));
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "\n%-12s %29.4f %9lld\n", "accuracy",
                rep.accuracy, static_cast<long long>(rep.total));
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %9.4f %9.4f %9.4f %9lld\n",
                "macro avg", rep.macro.precision, rep.macro.recall,
                rep.macro.f1, static_cast<long long>(rep.total));
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-12s %9.4f %9.4f %9.4f %9lld\n",
                "weighted avg", rep.weighted.precision, rep.weighted.recall,
                rep.weighted.f1, static_cast<long long>(rep.total));
  out += buf;
  for (const std::string& w : rep.warnings) {
    out += "warning: " + w + '\n';
  }
  return out;
}

// One evaluated (model, input-kind) cell for the comparison grid.
struct TaggedReport {
  std::string model;
  std::string input_kind;
  ClassReport report;
};

// Renders a models-by-input-kind grid; each cell shows weighted
// precision / recall / F1 and accuracy. Missing cells print a dash.
inline std::string aggregate_report(const std::vector<TaggedReport>& reports) {
  if (reports.empty()) throw Error("empty", "no reports to aggregate");
  static const char* kColumns[] = {"posts", "titles", "posts+titles"};
  std::vector<std::string> models;
  for (const TaggedReport& r : reports) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
  }
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14s %-23s %-23s %-23s\n", "model",
                kColumns[0], kColumns[1], kColumns[2]);
  out += buf;
  out += std::string("(each cell: precision/recall/f1/accuracy, weighted)\n");
  for (const std::string& model : models) {
    std::string row;
    std::snprintf(buf, sizeof(buf), "%-14s ", model.c_str());
    row += buf;
    for (const char* column : kColumns) {
      const TaggedReport* cell = nullptr;
      for (const TaggedReport& r : reports) {
        if (r.model == model && r.input_kind == column) {
          cell = &r;
          break;
        }
      }
      if (cell) {
        std::snprintf(buf, sizeof(buf), "%.2f/%.2f/%.2f/%.2f      ",
                      cell->report.weighted.precision,
                      cell->report.weighted.recall, cell->report.weighted.f1,
                      cell->report.accuracy);
      } else {
        std::snprintf(buf, sizeof(buf), "%-23s", "-");
      }
      row += buf;
    }
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += row + '\n';
  }
  return out;
}

}  // namespace mindgauge
