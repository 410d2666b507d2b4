#include "support/synthetic.hpp"

#include <algorithm>
#include <cstdio>

namespace homograph::synth {

namespace {

constexpr const char* kTargetForm = "target";

MorphAnalysis filler_analysis(Rng& rng) {
  static constexpr Pos kNonVerbPos[] = {Pos::NOUN, Pos::ADJECTIVE, Pos::PREPOSITION,
                                        Pos::PRONOUN, Pos::CARDINAL};
  MorphAnalysis a;
  a.pos = kNonVerbPos[uniform_below(rng, 5)];
  a.gender = static_cast<Gender>(uniform_below(rng, 4));
  a.number = static_cast<Number>(uniform_below(rng, 3));
  a.person = static_cast<Person>(uniform_below(rng, 4));
  a.status = static_cast<Status>(uniform_below(rng, 4));
  a.suffix = static_cast<Marker>(uniform_below(rng, 3));
  if (a.suffix == Marker::PRESENT) {
    a.suf_gender = static_cast<Gender>(1 + uniform_below(rng, 3));
    a.suf_person = static_cast<Person>(1 + uniform_below(rng, 3));
    a.suf_number = static_cast<Number>(1 + uniform_below(rng, 2));
  }
  a.prefix = static_cast<Marker>(uniform_below(rng, 3));
  return a;
}

HomographSpec target_spec() {
  HomographSpec spec;
  spec.surface_form = kTargetForm;
  spec.options[0].class_id = 1;
  spec.options[0].diacritized_form = "target-a";
  spec.options[0].gloss = "first reading";
  spec.options[0].morphology.pos = Pos::NOUN;
  spec.options[0].morphology.gender = Gender::F;
  spec.options[0].morphology.number = Number::S;
  spec.options[1].class_id = 2;
  spec.options[1].diacritized_form = "target-b";
  spec.options[1].gloss = "second reading";
  spec.options[1].morphology.pos = Pos::VERB;
  spec.options[1].morphology.gender = Gender::M;
  spec.options[1].morphology.number = Number::S;
  spec.options[1].morphology.person = Person::P3;
  spec.options[1].morphology.tense = Tense::PAST;
  spec.options[1].morphology.valence = Valence::BOTH;
  validate(spec);
  return spec;
}

}  // namespace

SyntheticData make_separable(const SeparableSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0x5e9a));

  std::vector<std::string> fillers;
  for (int w = 0; w < spec.vocab; ++w) {
    char name[16];
    std::snprintf(name, sizeof name, "f%03d", w);
    fillers.emplace_back(name);
  }

  std::vector<std::string> markers1, markers2;
  for (int k = 0; k < spec.marker_pairs; ++k) {
    markers1.push_back("m1_" + std::to_string(k));
    markers2.push_back("m2_" + std::to_string(k));
  }

  SyntheticData data;
  for (const auto& f : fillers) data.lexicon.add(f, {filler_analysis(rng)});
  for (int k = 0; k < spec.marker_pairs; ++k) {
    if (spec.valence_only) {
      // Verb pairs identical except for valence: the supertag is the only
      // morphological signal separating the classes.
      MorphAnalysis base;
      base.pos = Pos::VERB;
      base.binyan = static_cast<Binyan>(1 + k % 7);
      base.tense = static_cast<Tense>(1 + k % 4);
      base.gender = static_cast<Gender>(1 + k % 3);
      base.number = static_cast<Number>(1 + k % 2);
      base.person = static_cast<Person>(1 + k % 3);
      MorphAnalysis transitive = base;
      transitive.valence = Valence::TRANSITIVE;
      MorphAnalysis intransitive = base;
      intransitive.valence = Valence::INTRANSITIVE;
      data.lexicon.add(markers1[k], {transitive});
      data.lexicon.add(markers2[k], {intransitive});
    } else {
      MorphAnalysis m1;
      m1.pos = Pos::INTERJECTION;
      MorphAnalysis m2;
      m2.pos = Pos::CONJUNCTION;
      data.lexicon.add(markers1[k], {m1});
      data.lexicon.add(markers2[k], {m2});
    }
  }

  data.set.spec = target_spec();

  const int n1 = spec.majority > 0 ? spec.majority : spec.per_class;
  const int n2 = spec.minority > 0 ? spec.minority : spec.per_class;
  int serial = 0;
  for (int label = 1; label <= 2; ++label) {
    const auto& markers = label == 1 ? markers1 : markers2;
    const int count = label == 1 ? n1 : n2;
    for (int s = 0; s < count; ++s) {
      const int len =
          spec.min_len + static_cast<int>(uniform_below(
                             rng, static_cast<std::uint64_t>(spec.max_len - spec.min_len + 1)));
      const int target = static_cast<int>(uniform_below(rng, len));
      std::vector<int> eligible;
      for (int p = std::max(0, target - 3); p <= std::min(len - 1, target + 3); ++p)
        if (p != target) eligible.push_back(p);
      const int marker_pos = eligible[uniform_below(rng, eligible.size())];

      AnnotatedInstance inst;
      inst.tokens.resize(len);
      for (int p = 0; p < len; ++p) inst.tokens[p] = fillers[uniform_below(rng, fillers.size())];
      inst.tokens[target] = kTargetForm;
      inst.tokens[marker_pos] = markers[uniform_below(rng, markers.size())];
      inst.target_index = target;
      inst.label = label;
      inst.source_id = "synth-" + std::to_string(serial++);
      data.set.instances.push_back(std::move(inst));
    }
  }
  shuffle(data.set.instances, rng);

  data.vocab = fillers;
  data.vocab.insert(data.vocab.end(), markers1.begin(), markers1.end());
  data.vocab.insert(data.vocab.end(), markers2.begin(), markers2.end());
  data.vocab.push_back(kTargetForm);
  std::sort(data.vocab.begin(), data.vocab.end());
  return data;
}

SyntheticFiles write_files(const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SyntheticFiles files;
  files.contrast = dir / "synthetic.contrast.jsonl";
  files.lexicon = dir / "synthetic.lexicon.txt";
  write_contrast_set(files.contrast, data.set);
  data.lexicon.save(files.lexicon);
  return files;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("homograph_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace homograph::synth
