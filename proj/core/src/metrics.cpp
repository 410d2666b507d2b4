#include "homograph/metrics.hpp"

#include "homograph/common.hpp"

#include <json.hpp>

#include <cstdio>

namespace homograph {

using json = nlohmann::ordered_json;

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp1 += other.tp1;
  fp1 += other.fp1;
  fn1 += other.fn1;
  tp2 += other.tp2;
  fp2 += other.fp2;
  fn2 += other.fn2;
  return *this;
}

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> golds) {
  if (preds.size() != golds.size())
    throw ValidationError("confusion: prediction/gold length mismatch");
  if (preds.empty()) throw ValidationError("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i], g = golds[i];
    if ((p != 1 && p != 2) || (g != 1 && g != 2))
      throw ValidationError("confusion: labels must be 1 or 2");
    if (p == 1 && g == 1) c.tp1++;
    if (p == 2 && g == 2) c.tp2++;
    if (p == 1 && g == 2) c.fp1++;
    if (p == 2 && g == 1) c.fp2++;
  }
  c.fn1 = c.fp2;
  c.fn2 = c.fp1;
  return c;
}

ClassMetrics class_metrics_from_pr(std::optional<double> precision,
                                   std::optional<double> recall, long support) {
  ClassMetrics m;
  m.precision = precision;
  m.recall = recall;
  m.support = support;
  if (precision && recall && (*precision > 0.0 || *recall > 0.0))
    m.f1 = 2.0 * *precision * *recall / (*precision + *recall);
  return m;
}

ClassMetrics class_metrics(const ConfusionCounts& counts, int class_id) {
  if (class_id != 1 && class_id != 2) throw ValidationError("class id must be 1 or 2");
  const long tp = class_id == 1 ? counts.tp1 : counts.tp2;
  const long fp = class_id == 1 ? counts.fp1 : counts.fp2;
  const long fn = class_id == 1 ? counts.fn1 : counts.fn2;
  std::optional<double> precision, recall;
  if (tp + fp > 0) precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return class_metrics_from_pr(precision, recall, tp + fn);
}

std::optional<double> macro_f1(const ClassMetrics& m1, const ClassMetrics& m2) {
  if (!m1.f1 && !m2.f1) return std::nullopt;
  return (m1.f1.value_or(0.0) + m2.f1.value_or(0.0)) / 2.0;
}

EvalReport make_report(const ConfusionCounts& counts) {
  EvalReport report;
  report.class1 = class_metrics(counts, 1);
  report.class2 = class_metrics(counts, 2);
  report.macro_f1 = macro_f1(report.class1, report.class2);
  report.accuracy =
      counts.total() > 0
          ? static_cast<double>(counts.tp1 + counts.tp2) / static_cast<double>(counts.total())
          : 0.0;
  return report;
}

std::string format_percent(std::optional<double> value) {
  if (!value) return kUndefinedMark;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *value * 100.0);
  return buf;
}

std::string format_f1(std::optional<double> value) {
  if (!value) return kUndefinedMark;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *value);
  std::string s = buf;
  if (s.size() > 1 && s[0] == '0' && s[1] == '.') s.erase(0, 1);
  return s;
}

std::string render_report(const EvalReport& report, ReportStyle style) {
  if (style == ReportStyle::Table3) return format_f1(report.macro_f1);
  std::string out;
  out += "Prec\tRecall\tPrec\tRecall\tAvg-F1\n";
  out += format_percent(report.class1.precision) + '\t' + format_percent(report.class1.recall) +
         '\t' + format_percent(report.class2.precision) + '\t' +
         format_percent(report.class2.recall) + '\t' + format_f1(report.macro_f1) + '\n';
  return out;
}

namespace {

json metrics_to_json(const ClassMetrics& m) {
  json j = json::object();
  j["precision"] = m.precision ? json(*m.precision) : json(nullptr);
  j["recall"] = m.recall ? json(*m.recall) : json(nullptr);
  j["f1"] = m.f1 ? json(*m.f1) : json(nullptr);
  j["support"] = m.support;
  return j;
}

ClassMetrics metrics_from_json(const json& j) {
  ClassMetrics m;
  if (!j.at("precision").is_null()) m.precision = j.at("precision").get<double>();
  if (!j.at("recall").is_null()) m.recall = j.at("recall").get<double>();
  if (!j.at("f1").is_null()) m.f1 = j.at("f1").get<double>();
  m.support = j.at("support").get<long>();
  return m;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json j = json::object();
  j["class1"] = metrics_to_json(report.class1);
  j["class2"] = metrics_to_json(report.class2);
  j["macro_f1"] = report.macro_f1 ? json(*report.macro_f1) : json(nullptr);
  j["accuracy"] = report.accuracy;
  return j.dump();
}

EvalReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  EvalReport report;
  report.class1 = metrics_from_json(j.at("class1"));
  report.class2 = metrics_from_json(j.at("class2"));
  if (!j.at("macro_f1").is_null()) report.macro_f1 = j.at("macro_f1").get<double>();
  report.accuracy = j.at("accuracy").get<double>();
  return report;
}

}  // namespace homograph
