#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "homograph/corpus.hpp"
#include "homograph/lexicon.hpp"
#include "support/synthetic.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace homograph;

namespace {

HomographSpec demo_spec() {
  HomographSpec spec;
  spec.surface_form = "X";
  spec.options[0].class_id = 1;
  spec.options[0].diacritized_form = "Xa";
  spec.options[0].gloss = "first";
  spec.options[0].morphology.pos = Pos::NOUN;
  spec.options[1].class_id = 2;
  spec.options[1].diacritized_form = "Xb";
  spec.options[1].gloss = "second";
  spec.options[1].morphology.pos = Pos::PREPOSITION;
  validate(spec);
  return spec;
}

AnnotatedInstance make_instance(std::vector<std::string> tokens, int target, int label,
                                std::string source) {
  return AnnotatedInstance{std::move(tokens), target, label, std::move(source)};
}

std::filesystem::path write_lines(const std::filesystem::path& dir, const std::string& name,
                                  const std::vector<std::string>& lines) {
  const auto path = dir / name;
  std::ofstream out(path);
  for (const auto& line : lines) out << line << '\n';
  return path;
}

const char* kHeader =
    R"({"surface_form":"X","options":[{"class_id":1,"diacritized_form":"Xa","gloss":"first","morphology":{"pos":"NOUN"}},{"class_id":2,"diacritized_form":"Xb","gloss":"second","morphology":{"pos":"PREPOSITION"}}]})";

}  // namespace

TEST_CASE("load_contrast_set: valid file round trips") {
  const auto dir = synth::scratch_dir("corpus_load");
  const auto path = write_lines(
      dir, "set.jsonl",
      {kHeader,
       R"({"tokens":["a","X","b"],"target_index":1,"label":1,"source_id":"s1"})",
       R"({"tokens":["X"],"target_index":0,"label":2,"source_id":"s2"})",
       R"({"tokens":["c","c","X"],"target_index":2,"label":1,"source_id":"s3"})"});

  const auto set = load_contrast_set(path, demo_spec());
  REQUIRE(set.instances.size() == 3);
  CHECK(set.instances[0].tokens == std::vector<std::string>{"a", "X", "b"});
  CHECK(set.instances[1].label == 2);
  CHECK(set.instances[2].source_id == "s3");

  // write(load(f)) reproduces the canonical file byte for byte
  std::ostringstream out;
  write_contrast_set(out, set);
  std::ifstream in(path);
  std::stringstream original;
  original << in.rdbuf();
  CHECK(out.str() == original.str());
}

TEST_CASE("load_contrast_set: target index out of bounds names the line") {
  const auto dir = synth::scratch_dir("corpus_oob");
  const auto path = write_lines(
      dir, "set.jsonl",
      {kHeader, R"({"tokens":["a","X"],"target_index":2,"label":1,"source_id":"s"})"});
  CHECK_THROWS_WITH_AS(static_cast<void>(load_contrast_set(path, demo_spec())),
                       doctest::Contains("line 2"), ValidationError);
  CHECK_THROWS_WITH_AS(static_cast<void>(load_contrast_set(path, demo_spec())),
                       doctest::Contains("target index out of bounds"), ValidationError);
}

TEST_CASE("load_contrast_set: bad label names the line") {
  const auto dir = synth::scratch_dir("corpus_label");
  const auto path = write_lines(
      dir, "set.jsonl",
      {kHeader,
       R"({"tokens":["a","X"],"target_index":1,"label":1,"source_id":"s"})",
       R"({"tokens":["X","b"],"target_index":0,"label":3,"source_id":"s"})"});
  CHECK_THROWS_WITH_AS(static_cast<void>(load_contrast_set(path, demo_spec())),
                       doctest::Contains("line 3"), ValidationError);
}

TEST_CASE("load_contrast_set: token at target index must equal the surface form") {
  const auto dir = synth::scratch_dir("corpus_surface");
  const auto path = write_lines(
      dir, "set.jsonl",
      {kHeader, R"({"tokens":["a","Y"],"target_index":1,"label":1,"source_id":"s"})"});
  CHECK_THROWS_WITH_AS(static_cast<void>(load_contrast_set(path, demo_spec())),
                       doctest::Contains("is not the homograph"), ValidationError);
}

TEST_CASE("load_contrast_set: configured normalization applies before the comparison") {
  const auto dir = synth::scratch_dir("corpus_norm");
  const auto path = write_lines(
      dir, "set.jsonl",
      {kHeader, R"({"tokens":["a","x"],"target_index":1,"label":1,"source_id":"s"})"});
  LoadOptions options;
  options.normalize = [](const std::string& tok) {
    std::string upper = tok;
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return upper;
  };
  CHECK(load_contrast_set(path, demo_spec(), options).instances.size() == 1);
}

TEST_CASE("extract_instances finds every occurrence in order") {
  const std::vector<std::string> tokens{"A", "X", "B", "X"};
  CHECK(extract_instances(tokens, "X") == std::vector<int>{1, 3});
  const std::vector<std::string> absent{"A", "B"};
  CHECK(extract_instances(absent, "X").empty());
  const std::vector<std::string> single{"X"};
  CHECK(extract_instances(single, "X") == std::vector<int>{0});
}

namespace {

// Independent brute-force oracle: counts every neighbor-bigram key per class.
std::map<std::pair<int, std::string>, int> count_keys(
    const std::vector<AnnotatedInstance>& instances) {
  std::map<std::pair<int, std::string>, int> counts;
  for (const auto& inst : instances) {
    const int t = inst.target_index;
    const std::string left =
        t > 0 ? inst.tokens[t - 1] : std::string(kBoundaryToken);
    const std::string right = t + 1 < static_cast<int>(inst.tokens.size())
                                  ? inst.tokens[t + 1]
                                  : std::string(kBoundaryToken);
    counts[{inst.label, "L " + left}]++;
    counts[{inst.label, "R " + right}]++;
  }
  return counts;
}

}  // namespace

TEST_CASE("collocation cap: 25 instances sharing a left neighbor keep exactly 20") {
  std::vector<AnnotatedInstance> instances;
  for (int i = 0; i < 25; ++i)
    instances.push_back(
        make_instance({"ay", "X", "r" + std::to_string(i)}, 1, 1, std::to_string(i)));
  const auto kept = collocation_cap_filter(instances, 20, 7);
  CHECK(kept.size() == 20);
  for (const auto& [key, count] : count_keys(kept)) CHECK(count <= 20);
}

TEST_CASE("collocation cap: distinct neighbors all survive") {
  std::vector<AnnotatedInstance> instances;
  for (int i = 0; i < 5; ++i)
    instances.push_back(make_instance({"l" + std::to_string(i), "X", "r" + std::to_string(i)}, 1,
                                      1, std::to_string(i)));
  CHECK(collocation_cap_filter(instances, 20, 7).size() == 5);
}

TEST_CASE("collocation cap: overlapping keys verified by brute-force counting") {
  // 30 instances share left key K1; 15 of those also share right key K2;
  // 10 more are unrelated.
  std::vector<AnnotatedInstance> instances;
  for (int i = 0; i < 30; ++i) {
    const std::string right = i < 15 ? "K2" : "r" + std::to_string(i);
    instances.push_back(make_instance({"K1", "X", right}, 1, 1, std::to_string(i)));
  }
  for (int i = 0; i < 10; ++i)
    instances.push_back(make_instance({"u" + std::to_string(i), "X", "v" + std::to_string(i)}, 1,
                                      1, "u" + std::to_string(i)));
  const auto kept = collocation_cap_filter(instances, 20, 99);
  for (const auto& [key, count] : count_keys(kept)) CHECK(count <= 20);
  CHECK(kept.size() >= 20);  // unrelated instances all survive
}

TEST_CASE("collocation cap: output is a subsequence and the filter is idempotent") {
  Rng rng(2024);
  for (int round = 0; round < 25; ++round) {
    std::vector<AnnotatedInstance> instances;
    const int n = 30 + static_cast<int>(uniform_below(rng, 40));
    for (int i = 0; i < n; ++i) {
      const std::string left = "l" + std::to_string(uniform_below(rng, 3));
      const std::string right = "r" + std::to_string(uniform_below(rng, 3));
      instances.push_back(
          make_instance({left, "X", right}, 1, 1 + static_cast<int>(uniform_below(rng, 2)),
                        std::to_string(i)));
    }
    const std::uint64_t seed = rng();
    const auto once = collocation_cap_filter(instances, 5, seed);

    // subsequence: source ids appear in input order
    std::size_t cursor = 0;
    for (const auto& inst : once) {
      while (cursor < instances.size() && instances[cursor].source_id != inst.source_id) ++cursor;
      REQUIRE(cursor < instances.size());
      ++cursor;
    }
    for (const auto& [key, count] : count_keys(once)) CHECK(count <= 5);

    const auto twice = collocation_cap_filter(once, 5, seed);
    CHECK(twice.size() == once.size());
    for (std::size_t i = 0; i < twice.size(); ++i)
      CHECK(twice[i].source_id == once[i].source_id);
  }
}

TEST_CASE("compute_ratio reproduces published ratios and strips .0") {
  CHECK(compute_ratio(18164, 275) == "66:1");
  CHECK(compute_ratio(35, 14) == "2.5:1");
  CHECK(compute_ratio(7, 7) == "1:1");
  CHECK(compute_ratio(324, 34) == "10:1");
  CHECK(compute_ratio(23, 12) == "2:1");
}

TEST_CASE("compute_ratio is symmetric and rejects non-positive counts") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double a = 0.25 + static_cast<double>(uniform_below(rng, 40000)) / 4.0;
    const double b = 0.25 + static_cast<double>(uniform_below(rng, 40000)) / 4.0;
    CHECK(compute_ratio(a, b) == compute_ratio(b, a));
  }
  CHECK_THROWS_AS(compute_ratio(0, 5), ValidationError);
  CHECK_THROWS_AS(compute_ratio(5, -1), ValidationError);
}

namespace {

ContrastSet labeled_set(int n1, int n2) {
  ContrastSet set;
  set.spec = demo_spec();
  for (int i = 0; i < n1 + n2; ++i)
    set.instances.push_back(make_instance({"X"}, 0, i < n1 ? 1 : 2, std::to_string(i)));
  return set;
}

}  // namespace

TEST_CASE("split_folds: balanced divisible case is exact") {
  const auto folds = split_folds(labeled_set(100, 100), 10, 3);
  REQUIRE(folds.size() == 10);
  for (const auto& fold : folds) {
    int c1 = 0, c2 = 0;
    for (int id : fold.test_ids) (id < 100 ? c1 : c2)++;
    CHECK(c1 == 10);
    CHECK(c2 == 10);
    CHECK(fold.train_ids.size() == 180);
  }
}

TEST_CASE("split_folds: unbalanced sizes match the ceil/floor counting oracle") {
  const auto folds = split_folds(labeled_set(43, 401), 10, 3);
  std::multiset<int> sizes1, sizes2;
  for (const auto& fold : folds) {
    int c1 = 0, c2 = 0;
    for (int id : fold.test_ids) (id < 43 ? c1 : c2)++;
    sizes1.insert(c1);
    sizes2.insert(c2);
  }
  // 43 = 3 folds of ceil(43/10) + 7 of floor(43/10); 401 = 1 of 41 + 9 of 40
  CHECK(sizes1 == std::multiset<int>{4, 4, 4, 4, 4, 4, 4, 5, 5, 5});
  CHECK(sizes2 == std::multiset<int>{40, 40, 40, 40, 40, 40, 40, 40, 40, 41});
}

TEST_CASE("split_folds: deterministic, disjoint, exhaustive") {
  const auto set = labeled_set(37, 53);
  for (int k : {2, 5, 10}) {
    const auto a = split_folds(set, k, 11);
    const auto b = split_folds(set, k, 11);
    std::set<int> seen;
    std::size_t total = 0;
    for (int f = 0; f < k; ++f) {
      CHECK(a[f].test_ids == b[f].test_ids);
      CHECK(a[f].train_ids == b[f].train_ids);
      for (int id : a[f].test_ids) CHECK(seen.insert(id).second);  // disjoint
      total += a[f].test_ids.size();
    }
    CHECK(total == set.instances.size());  // exhaustive
  }
}

TEST_CASE("split_folds rejects a class smaller than k") {
  CHECK_THROWS_AS(static_cast<void>(split_folds(labeled_set(5, 100), 10, 0)), ValidationError);
}

TEST_CASE("class_counts") {
  CHECK(class_counts(labeled_set(2, 1)) == std::pair<int, int>{2, 1});
  CHECK(class_counts(labeled_set(0, 0)) == std::pair<int, int>{0, 0});
  const auto [c1, c2] = class_counts(labeled_set(443, 2402));
  CHECK(c1 >= kMinClassSupport);
  CHECK(c2 >= kMinClassSupport);
}

TEST_CASE("homograph spec validation") {
  HomographSpec spec = demo_spec();
  spec.options[1].class_id = 1;
  CHECK_THROWS_AS(validate(spec), ValidationError);

  HomographSpec swapped = demo_spec();
  std::swap(swapped.options[0], swapped.options[1]);
  validate(swapped);  // reorders so class 1 comes first
  CHECK(swapped.options[0].class_id == 1);
}

TEST_CASE("lexicon: stable order, defaults, and errors") {
  const auto dir = synth::scratch_dir("lexicon");
  const auto path = write_lines(dir, "lex.txt",
                                {"word1", "\tpos=NOUN\tgender=F\tnumber=S", "\tpos=VERB\ttense=PAST",
                                 "word2", "\tpos=PREPOSITION"});
  const auto lex = Lexicon::load(path);
  REQUIRE(lex.size() == 2);
  const auto* w1 = lex.find("word1");
  REQUIRE(w1 != nullptr);
  REQUIRE(w1->size() == 2);
  CHECK((*w1)[0].pos == Pos::NOUN);
  CHECK((*w1)[0].gender == Gender::F);
  CHECK((*w1)[0].tense == Tense::NA);  // unlisted features default to NA
  CHECK((*w1)[1].tense == Tense::PAST);
  CHECK(lex.find("missing") == nullptr);

  // save/load round trip preserves entry order
  const auto saved = dir / "roundtrip.txt";
  lex.save(saved);
  const auto reloaded = Lexicon::load(saved);
  REQUIRE(reloaded.find("word1") != nullptr);
  CHECK(*reloaded.find("word1") == *w1);

  const auto bad = write_lines(dir, "bad.txt", {"word", "\tpos=WHAT"});
  CHECK_THROWS_AS(static_cast<void>(Lexicon::load(bad)), ValidationError);
  const auto orphan = write_lines(dir, "orphan.txt", {"\tpos=NOUN"});
  CHECK_THROWS_AS(static_cast<void>(Lexicon::load(orphan)), ValidationError);
}

TEST_CASE("morph analysis invariants") {
  MorphAnalysis a;
  a.pos = Pos::NOUN;
  a.valence = Valence::TRANSITIVE;
  CHECK_THROWS_AS(validate(a), ValidationError);  // valence needs a verb

  MorphAnalysis b;
  b.pos = Pos::NOUN;
  b.suffix = Marker::ABSENT;
  b.suf_gender = Gender::F;
  CHECK_THROWS_AS(validate(b), ValidationError);  // suf_* need suffix=PRESENT

  MorphAnalysis c;
  c.pos = Pos::VERB;
  c.binyan = Binyan::PAAL;
  c.valence = Valence::TRANSITIVE;
  c.suffix = Marker::PRESENT;
  c.suf_gender = Gender::F;
  c.suf_person = Person::P3;
  c.suf_number = Number::S;
  validate(c);
}
