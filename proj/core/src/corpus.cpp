#include "homograph/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace homograph {

using json = nlohmann::ordered_json;

namespace {

json morphology_to_json(const MorphAnalysis& a) {
  json m = json::object();
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto idx = a.value_index(static_cast<Feature>(f));
    if (idx == 0) continue;  // NA omitted, restored on load
    const auto& info = feature_info(static_cast<Feature>(f));
    m[std::string(info.name)] = std::string(info.values[idx]);
  }
  return m;
}

MorphAnalysis morphology_from_json(const json& m) {
  MorphAnalysis a;
  for (const auto& [key, value] : m.items()) {
    const Feature f = parse_feature(key);
    a.set_value_index(f, parse_value(f, value.get<std::string>()));
  }
  validate(a);
  return a;
}

json option_to_json(const AnalysisOption& opt) {
  json o = json::object();
  o["class_id"] = opt.class_id;
  o["diacritized_form"] = opt.diacritized_form;
  o["gloss"] = opt.gloss;
  o["morphology"] = morphology_to_json(opt.morphology);
  if (opt.frequency_per_million) o["frequency_per_million"] = *opt.frequency_per_million;
  return o;
}

AnalysisOption option_from_json(const json& o) {
  AnalysisOption opt;
  opt.class_id = o.at("class_id").get<int>();
  opt.diacritized_form = o.at("diacritized_form").get<std::string>();
  opt.gloss = o.value("gloss", std::string());
  if (o.contains("morphology")) opt.morphology = morphology_from_json(o.at("morphology"));
  if (o.contains("frequency_per_million"))
    opt.frequency_per_million = o.at("frequency_per_million").get<double>();
  return opt;
}

json header_to_json(const HomographSpec& spec) {
  json h = json::object();
  h["surface_form"] = spec.surface_form;
  h["options"] = json::array({option_to_json(spec.options[0]), option_to_json(spec.options[1])});
  return h;
}

HomographSpec header_from_json(const json& h) {
  HomographSpec spec;
  spec.surface_form = h.at("surface_form").get<std::string>();
  const auto& opts = h.at("options");
  if (!opts.is_array() || opts.size() != 2)
    throw ValidationError("homograph header must carry exactly two options");
  spec.options[0] = option_from_json(opts[0]);
  spec.options[1] = option_from_json(opts[1]);
  validate(spec);
  return spec;
}

json instance_to_json(const AnnotatedInstance& inst) {
  json r = json::object();
  r["tokens"] = inst.tokens;
  r["target_index"] = inst.target_index;
  r["label"] = inst.label;
  r["source_id"] = inst.source_id;
  return r;
}

[[noreturn]] void fail_line(int line_no, const std::string& what) {
  throw ValidationError("contrast set line " + std::to_string(line_no) + ": " + what);
}

AnnotatedInstance instance_from_json(const json& r, int line_no) {
  AnnotatedInstance inst;
  if (!r.contains("tokens") || !r.at("tokens").is_array())
    fail_line(line_no, "missing tokens array");
  for (const auto& t : r.at("tokens")) inst.tokens.push_back(t.get<std::string>());
  if (inst.tokens.empty()) fail_line(line_no, "tokens must be nonempty");
  inst.target_index = r.at("target_index").get<int>();
  inst.label = r.at("label").get<int>();
  inst.source_id = r.value("source_id", std::string());
  return inst;
}

ContrastSet load_impl(const std::filesystem::path& path,
                      const HomographSpec* expected, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open contrast set file: " + path.string());

  ContrastSet set;
  std::string line;
  int line_no = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(line_no, std::string("malformed record: ") + e.what());
    }
    if (!have_header) {
      try {
        set.spec = header_from_json(record);
      } catch (const json::exception& e) {
        fail_line(line_no, std::string("malformed header: ") + e.what());
      }
      if (expected && set.spec.surface_form != expected->surface_form)
        fail_line(line_no, "header surface form '" + set.spec.surface_form +
                               "' does not match expected '" + expected->surface_form + "'");
      if (expected) set.spec = *expected;
      have_header = true;
      continue;
    }
    AnnotatedInstance inst;
    try {
      inst = instance_from_json(record, line_no);
    } catch (const json::exception& e) {
      fail_line(line_no, std::string("malformed instance: ") + e.what());
    }
    if (inst.target_index < 0 || inst.target_index >= static_cast<int>(inst.tokens.size()))
      fail_line(line_no, "target index out of bounds (" + std::to_string(inst.target_index) +
                             " with " + std::to_string(inst.tokens.size()) + " tokens)");
    if (inst.label != 1 && inst.label != 2)
      fail_line(line_no, "label must be 1 or 2, got " + std::to_string(inst.label));
    const std::string& raw = inst.tokens[inst.target_index];
    const std::string normalized = options.normalize ? options.normalize(raw) : raw;
    if (normalized != set.spec.surface_form)
      fail_line(line_no, "token at target index ('" + raw + "') is not the homograph '" +
                             set.spec.surface_form + "'");
    set.instances.push_back(std::move(inst));
  }
  if (!have_header) throw ValidationError("contrast set file has no header record: " + path.string());
  return set;
}

}  // namespace

void validate(HomographSpec& spec) {
  if (spec.surface_form.empty()) throw ValidationError("homograph surface form is empty");
  const int a = spec.options[0].class_id;
  const int b = spec.options[1].class_id;
  if (!((a == 1 && b == 2) || (a == 2 && b == 1)))
    throw ValidationError("homograph options must carry class ids 1 and 2 exactly once");
  if (a == 2) std::swap(spec.options[0], spec.options[1]);
  validate(spec.options[0].morphology);
  validate(spec.options[1].morphology);
  for (const auto& opt : spec.options)
    if (opt.frequency_per_million && *opt.frequency_per_million < 0)
      throw ValidationError("frequency_per_million must be nonnegative");
}

ContrastSet load_contrast_set(const std::filesystem::path& path, const HomographSpec& spec,
                              const LoadOptions& options) {
  return load_impl(path, &spec, options);
}

ContrastSet load_contrast_set(const std::filesystem::path& path, const LoadOptions& options) {
  return load_impl(path, nullptr, options);
}

void write_contrast_set(std::ostream& out, const ContrastSet& set) {
  out << header_to_json(set.spec).dump() << '\n';
  for (const auto& inst : set.instances) out << instance_to_json(inst).dump() << '\n';
}

void write_contrast_set(const std::filesystem::path& path, const ContrastSet& set) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write contrast set file: " + path.string());
    write_contrast_set(out, set);
  }
  std::filesystem::rename(tmp, path);
}

std::string spec_to_json(const HomographSpec& spec) { return header_to_json(spec).dump(); }

HomographSpec spec_from_json(const std::string& text) {
  return header_from_json(json::parse(text));
}

std::vector<int> extract_instances(std::span<const std::string> tokens,
                                   std::string_view surface) {
  std::vector<int> indices;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == surface) indices.push_back(static_cast<int>(i));
  return indices;
}

std::vector<AnnotatedInstance> collocation_cap_filter(
    const std::vector<AnnotatedInstance>& instances, int cap, std::uint64_t seed) {
  if (cap < 1) throw ValidationError("collocation cap must be >= 1");

  // Keys live per class label; std::map keeps the subsampling order canonical.
  std::map<std::pair<int, std::string>, std::vector<int>> groups;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& toks = inst.tokens;
    const int t = inst.target_index;
    const std::string left = t > 0 ? toks[t - 1] : std::string(kBoundaryToken);
    const std::string right =
        t + 1 < static_cast<int>(toks.size()) ? toks[t + 1] : std::string(kBoundaryToken);
    groups[{inst.label, "L\t" + left}].push_back(static_cast<int>(i));
    groups[{inst.label, "R\t" + right}].push_back(static_cast<int>(i));
  }

  std::vector<bool> keep(instances.size(), true);
  Rng rng(seed);
  for (const auto& [key, members] : groups) {
    const int n = static_cast<int>(members.size());
    if (n <= cap) continue;
    const auto survivors = sample_indices(n, cap, rng);
    std::vector<bool> chosen(n, false);
    for (int s : survivors) chosen[s] = true;
    for (int m = 0; m < n; ++m)
      if (!chosen[m]) keep[members[m]] = false;
  }

  std::vector<AnnotatedInstance> out;
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (keep[i]) out.push_back(instances[i]);
  return out;
}

std::string compute_ratio(double count_a, double count_b) {
  if (count_a <= 0 || count_b <= 0)
    throw ValidationError("compute_ratio requires positive counts");
  const double r = std::max(count_a, count_b) / std::min(count_a, count_b);
  char buf[32];
  if (r >= 3.0) {
    std::snprintf(buf, sizeof buf, "%.0f:1", std::round(r));
  } else {
    const double half = std::round(r * 2.0) / 2.0;
    if (half == std::floor(half))
      std::snprintf(buf, sizeof buf, "%.0f:1", half);
    else
      std::snprintf(buf, sizeof buf, "%.1f:1", half);
  }
  return buf;
}

std::vector<FoldSplit> split_folds(const ContrastSet& set, int k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("fold count must be >= 1");
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < set.instances.size(); ++i)
    by_class[set.instances[i].label - 1].push_back(static_cast<int>(i));
  for (int c = 0; c < 2; ++c)
    if (static_cast<int>(by_class[c].size()) < k)
      throw ValidationError("class " + std::to_string(c + 1) + " has " +
                            std::to_string(by_class[c].size()) + " instances, fewer than k=" +
                            std::to_string(k));

  Rng rng(seed);
  std::vector<FoldSplit> folds(k);
  for (int c = 0; c < 2; ++c) {
    shuffle(by_class[c], rng);
    for (std::size_t j = 0; j < by_class[c].size(); ++j)
      folds[j % k].test_ids.push_back(by_class[c][j]);
  }
  for (auto& fold : folds) {
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
    std::set<int> test(fold.test_ids.begin(), fold.test_ids.end());
    for (std::size_t i = 0; i < set.instances.size(); ++i)
      if (!test.contains(static_cast<int>(i))) fold.train_ids.push_back(static_cast<int>(i));
  }
  return folds;
}

std::pair<int, int> class_counts(const ContrastSet& set) {
  int c1 = 0, c2 = 0;
  for (const auto& inst : set.instances) (inst.label == 1 ? c1 : c2)++;
  return {c1, c2};
}

}  // namespace homograph
