#pragma once

#include <optional>
#include <span>
#include <string>

namespace homograph {

/// Two-class confusion counts; tp2 doubles as tn of class 1,
/// so fp1 = fn2 and fp2 = fn1 always hold.
struct ConfusionCounts {
  long tp1 = 0, fp1 = 0, fn1 = 0;
  long tp2 = 0, fp2 = 0, fn2 = 0;

  long total() const { return tp1 + tp2 + fp1 + fp2; }
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> golds);

/// Precision/recall/F1 with UNDEFINED (nullopt) mirroring the dash entries
/// of degenerate predictors: precision is undefined when the class is never
/// predicted, recall when it never occurs, F1 when either is undefined or
/// both are zero.
struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  long support = 0;
};

ClassMetrics class_metrics(const ConfusionCounts& counts, int class_id);
/// Builds metrics from explicit precision/recall values (oracle entry point).
ClassMetrics class_metrics_from_pr(std::optional<double> precision,
                                   std::optional<double> recall, long support = 0);

/// Mean of the two F1 values; an UNDEFINED F1 counts as 0 when exactly one
/// is undefined, and the mean is UNDEFINED when both are.
std::optional<double> macro_f1(const ClassMetrics& m1, const ClassMetrics& m2);

struct EvalReport {
  ClassMetrics class1, class2;
  std::optional<double> macro_f1;
  double accuracy = 0.0;
};

EvalReport make_report(const ConfusionCounts& counts);

enum class ReportStyle { Table2, Table3 };

/// Table2: per-class "Prec Recall" percentages plus Avg-F1.
/// Table3: the compact Avg-F1 cell alone.
std::string render_report(const EvalReport& report, ReportStyle style);

/// "85.61" style percentage (2 decimals).
std::string format_percent(std::optional<double> value);
/// ".894" style macro-F1 (3 decimals, no leading zero), dash when undefined.
std::string format_f1(std::optional<double> value);

/// UNDEFINED marker used in rendered tables (en dash).
inline constexpr const char* kUndefinedMark = "–";

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace homograph
