#pragma once

#include "homograph/common.hpp"
#include "homograph/morph.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace homograph {

/// One of a homograph's two readings.
struct AnalysisOption {
  int class_id = 0;  // 1 or 2
  std::string diacritized_form;
  std::string gloss;
  MorphAnalysis morphology;
  std::optional<double> frequency_per_million;
};

struct HomographSpec {
  std::string surface_form;
  std::array<AnalysisOption, 2> options;  // class_id 1 then 2 after validation
};

/// Throws ValidationError unless exactly two options carry class ids 1 and 2
/// (reordered so options[0] is class 1) and each morphology is valid.
void validate(HomographSpec& spec);

/// One labeled occurrence of the homograph inside a sentence.
struct AnnotatedInstance {
  std::vector<std::string> tokens;
  int target_index = 0;
  int label = 0;  // 1 or 2
  std::string source_id;

  bool operator==(const AnnotatedInstance&) const = default;
};

struct ContrastSet {
  HomographSpec spec;
  std::vector<AnnotatedInstance> instances;
};

struct FoldSplit {
  std::vector<int> train_ids;
  std::vector<int> test_ids;
};

struct LoadOptions {
  /// Token normalization applied before comparing against the surface form.
  std::function<std::string(const std::string&)> normalize;
};

// ---------------------------------------------------------------------------
// Contrast-set file format: UTF-8 JSON lines. The first record is a header
// carrying the HomographSpec; every following line is one instance with
// fields tokens, target_index, label, source_id (canonical field order).
// ---------------------------------------------------------------------------

ContrastSet load_contrast_set(const std::filesystem::path& path,
                              const HomographSpec& spec,
                              const LoadOptions& options = {});
/// Header record supplies the spec.
ContrastSet load_contrast_set(const std::filesystem::path& path,
                              const LoadOptions& options = {});

void write_contrast_set(std::ostream& out, const ContrastSet& set);
/// Atomic: writes to a temporary file, then renames into place.
void write_contrast_set(const std::filesystem::path& path, const ContrastSet& set);

std::string spec_to_json(const HomographSpec& spec);
HomographSpec spec_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Indices of all occurrences of `surface` in `tokens`, left to right;
/// a sentence with several occurrences yields one index per occurrence.
std::vector<int> extract_instances(std::span<const std::string> tokens,
                                   std::string_view surface);

/// Caps, per class label and per target-adjacent neighbor bigram (left key
/// (w_{i-1}, form) and right key (form, w_{i+1}), boundary neighbors encoded
/// as the reserved BOUNDARY token), the number of retained instances at
/// `cap`. Over-cap keys keep a seeded uniform subset; instances whose keys
/// are all within cap are always retained. Output preserves input order.
std::vector<AnnotatedInstance> collocation_cap_filter(
    const std::vector<AnnotatedInstance>& instances, int cap = 20,
    std::uint64_t seed = 0);

/// "X:1" with X = max/min rounded to the nearest integer when >= 3 and to
/// the nearest half otherwise; a trailing ".0" is stripped.
std::string compute_ratio(double count_a, double count_b);

/// Stratified k-fold partition: each class's instance ids are shuffled with
/// `seed` and dealt round-robin, so per-class fold sizes differ by at most 1.
std::vector<FoldSplit> split_folds(const ContrastSet& set, int k = 10,
                                   std::uint64_t seed = 0);

/// (#label-1 instances, #label-2 instances).
std::pair<int, int> class_counts(const ContrastSet& set);

}  // namespace homograph
