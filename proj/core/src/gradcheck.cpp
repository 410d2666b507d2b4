#include "homograph/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

namespace homograph::gradcheck {

namespace {

double total_loss(const Model& model, std::span<const AnnotatedInstance> instances) {
  double sum = 0.0;
  for (const auto& inst : instances) sum += model.loss(model.forward(inst), inst.label);
  return sum;
}

}  // namespace

Result check_model(Model& model, std::span<const AnnotatedInstance> instances,
                   const Options& options, const GradientTweak& tweak) {
  if (instances.empty()) throw ValidationError("gradcheck needs at least one instance");

  Gradients grads = model.make_gradients();
  for (const auto& inst : instances) {
    const auto trace = model.forward(inst);
    model.backward(trace, inst.label, grads);
  }
  auto grad_tensors = Model::gradient_tensors(grads);
  if (tweak)
    for (auto& [name, tensor] : grad_tensors) tweak(name, *tensor);

  auto params = model.trainable_tensors();
  std::vector<long> offsets;  // cumulative parameter counts per tensor
  long total = 0;
  for (const auto& [name, tensor] : params) {
    offsets.push_back(total);
    total += tensor->size();
  }

  Rng rng(mix_seed(options.seed, 0x9c));
  std::vector<long> picks;
  if (static_cast<long>(options.samples) >= total) {
    for (long i = 0; i < total; ++i) picks.push_back(i);
  } else {
    // every tensor group contributes at least one sampled parameter,
    // the rest are drawn uniformly across all parameters
    std::set<long> chosen;
    for (std::size_t t = 0; t < params.size(); ++t)
      chosen.insert(offsets[t] +
                    static_cast<long>(uniform_below(
                        rng, static_cast<std::uint64_t>(params[t].second->size()))));
    while (static_cast<int>(chosen.size()) < options.samples)
      chosen.insert(static_cast<long>(uniform_below(rng, static_cast<std::uint64_t>(total))));
    picks.assign(chosen.begin(), chosen.end());
  }

  std::map<std::string, GroupResult> by_group;
  Result result;
  for (long flat : picks) {
    std::size_t t = 0;
    while (t + 1 < params.size() && offsets[t + 1] <= flat) ++t;
    const long local = flat - offsets[t];
    Mat& tensor = *params[t].second;
    const Eigen::Index r = local / tensor.cols();
    const Eigen::Index c = local % tensor.cols();

    const double saved = tensor(r, c);
    tensor(r, c) = saved + options.epsilon;
    const double plus = total_loss(model, instances);
    tensor(r, c) = saved - options.epsilon;
    const double minus = total_loss(model, instances);
    tensor(r, c) = saved;

    const double numeric = (plus - minus) / (2.0 * options.epsilon);
    const double analytic = (*grad_tensors[t].second)(r, c);
    const double denom = std::abs(analytic) + std::abs(numeric);
    const double rel = denom <= 1e-6 ? 0.0 : std::abs(analytic - numeric) / denom;

    auto& group = by_group[params[t].first];
    group.group = params[t].first;
    group.max_rel_err = std::max(group.max_rel_err, rel);
    group.checked++;
  }

  for (auto& [name, group] : by_group) {
    result.max_rel_err = std::max(result.max_rel_err, group.max_rel_err);
    if (group.max_rel_err >= options.tolerance) {
      result.passed = false;
      result.failed_groups.push_back(name);
    }
    result.groups.push_back(group);
  }
  return result;
}

namespace {

MorphAnalysis random_analysis(Rng& rng) {
  MorphAnalysis a;
  a.pos = static_cast<Pos>(1 + uniform_below(rng, 14));
  a.gender = static_cast<Gender>(uniform_below(rng, 4));
  a.number = static_cast<Number>(uniform_below(rng, 3));
  a.person = static_cast<Person>(uniform_below(rng, 4));
  a.status = static_cast<Status>(uniform_below(rng, 4));
  if (a.pos == Pos::VERB || a.pos == Pos::PARTICIPLE) {
    a.binyan = static_cast<Binyan>(uniform_below(rng, 8));
    a.tense = static_cast<Tense>(uniform_below(rng, 5));
    a.valence = static_cast<Valence>(uniform_below(rng, 4));
  }
  a.suffix = static_cast<Marker>(uniform_below(rng, 3));
  if (a.suffix == Marker::PRESENT) {
    a.suf_gender = static_cast<Gender>(1 + uniform_below(rng, 3));
    a.suf_person = static_cast<Person>(1 + uniform_below(rng, 3));
    a.suf_number = static_cast<Number>(1 + uniform_below(rng, 2));
  }
  a.prefix = static_cast<Marker>(uniform_below(rng, 3));
  return a;
}

struct Fixture {
  std::shared_ptr<EmbeddingTable> table;
  std::shared_ptr<Lexicon> lexicon;
  std::vector<AnnotatedInstance> instances;
};

Fixture make_fixture(std::uint64_t seed) {
  Fixture fx;
  Rng rng(mix_seed(seed, 0xf1c));

  std::vector<std::string> vocab;
  for (int w = 0; w < 12; ++w) vocab.push_back("w" + std::to_string(w));
  fx.table = std::make_shared<EmbeddingTable>(random_embeddings(vocab, 6, seed));

  fx.lexicon = std::make_shared<Lexicon>();
  for (int w = 0; w < 10; ++w) {  // two vocabulary words stay out-of-lexicon
    std::vector<MorphAnalysis> analyses;
    const int count = 1 + static_cast<int>(uniform_below(rng, 3));
    for (int a = 0; a < count; ++a) analyses.push_back(random_analysis(rng));
    fx.lexicon->add(vocab[w], std::move(analyses));
  }

  for (int s = 0; s < 4; ++s) {
    AnnotatedInstance inst;
    const int len = 5 + static_cast<int>(uniform_below(rng, 4));
    for (int t = 0; t < len; ++t)
      inst.tokens.push_back(vocab[uniform_below(rng, vocab.size())]);
    // first sentence puts the target at the edge so boundary slots get used
    inst.target_index = s == 0 ? 0 : static_cast<int>(uniform_below(rng, len));
    inst.label = 1 + static_cast<int>(uniform_below(rng, 2));
    inst.source_id = "gradcheck-" + std::to_string(s);
    fx.instances.push_back(std::move(inst));
  }
  return fx;
}

}  // namespace

std::vector<CombinationResult> run_standard_checks(const Options& options,
                                                   const GradientTweak& tweak) {
  const Fixture fx = make_fixture(options.seed);

  LatticeConfig lattice;
  lattice.max_slots = 3;
  lattice.feature_dim = 3;

  std::vector<CombinationResult> results;
  for (const EncoderKind encoder :
       {EncoderKind::WordVec, EncoderKind::MorphLattice, EncoderKind::Composite}) {
    for (int agg = 0; agg < 2; ++agg) {
      ModelConfig config;
      config.encoder = encoder;
      config.lattice = lattice;
      config.mlp_hidden = 7;
      config.freeze_pretrained = false;  // exercise the pretrained-row gradients too
      if (agg == 0)
        config.aggregator = WindowConcatConfig{2, false};
      else
        config.aggregator = BiLstmConfig{2, 5};

      Model model(config, fx.table, fx.lexicon, mix_seed(options.seed, 100 + agg));
      auto result = check_model(model, fx.instances, options, tweak);
      results.push_back({encoder, std::string(aggregator_name(config.aggregator)),
                         std::move(result)});
    }
  }
  return results;
}

}  // namespace homograph::gradcheck
