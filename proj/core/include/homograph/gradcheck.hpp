#pragma once

#include "homograph/model.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace homograph::gradcheck {

struct Options {
  int samples = 200;        // parameters sampled across all trainable tensors
  double epsilon = 1e-5;    // central-difference step
  double tolerance = 1e-4;  // max relative error allowed
  std::uint64_t seed = 0;
};

struct GroupResult {
  std::string group;  // tensor name, e.g. "mlp.W2"
  double max_rel_err = 0.0;
  int checked = 0;
};

struct Result {
  std::vector<GroupResult> groups;
  double max_rel_err = 0.0;
  bool passed = true;
  std::vector<std::string> failed_groups;
};

/// Test hook applied to the analytic gradients before comparison; lets test
/// fixtures inject a deliberate bug into one tensor.
using GradientTweak = std::function<void(const std::string& name, Mat& grad)>;

/// Central finite differences on the summed cross-entropy loss over
/// `instances` versus the model's analytic backward pass. Relative error is
/// |a-n| / (|a|+|n|), taken as 0 when both magnitudes are <= 1e-6.
Result check_model(Model& model, std::span<const AnnotatedInstance> instances,
                   const Options& options, const GradientTweak& tweak = {});

struct CombinationResult {
  EncoderKind encoder;
  std::string aggregator;
  Result result;
};

/// Runs check_model for every encoder x aggregator combination on a small
/// seeded fixture (random embeddings, random valid lexicon, random sentences
/// covering boundary positions).
std::vector<CombinationResult> run_standard_checks(const Options& options,
                                                   const GradientTweak& tweak = {});

}  // namespace homograph::gradcheck
