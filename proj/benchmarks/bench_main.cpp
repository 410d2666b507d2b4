#include "homograph/training.hpp"
#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace homograph;

namespace {

struct BenchFixture {
  ContrastSet set;
  std::shared_ptr<EmbeddingTable> table;
  std::shared_ptr<Lexicon> lexicon;
};

const BenchFixture& fixture() {
  static const BenchFixture fx = [] {
    synth::SeparableSpec spec;
    spec.per_class = 200;
    spec.vocab = 200;
    spec.min_len = 8;
    spec.max_len = 12;
    spec.seed = 1;
    auto data = synth::make_separable(spec);
    BenchFixture out;
    out.set = std::move(data.set);
    out.table = std::make_shared<EmbeddingTable>(random_embeddings(data.vocab, 16, 1));
    out.lexicon = std::make_shared<Lexicon>(std::move(data.lexicon));
    return out;
  }();
  return fx;
}

Model make_model(EncoderKind encoder, bool bilstm) {
  ModelConfig config;
  config.encoder = encoder;
  config.lattice.max_slots = 4;
  config.lattice.feature_dim = 8;
  config.mlp_hidden = 128;
  config.freeze_pretrained = false;
  config.aggregator =
      bilstm ? AggregatorKind(BiLstmConfig{2, 64}) : AggregatorKind(WindowConcatConfig{3, false});
  return Model(config, fixture().table, fixture().lexicon, 7);
}

void BM_EncodeLattice(benchmark::State& state) {
  const auto model = make_model(EncoderKind::MorphLattice, false);
  const auto& tokens = fixture().set.instances.front().tokens;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.encode_token(tokens[i % tokens.size()]));
    ++i;
  }
}
BENCHMARK(BM_EncodeLattice);

void BM_ForwardWindowComposite(benchmark::State& state) {
  const auto model = make_model(EncoderKind::Composite, false);
  const auto& inst = fixture().set.instances.front();
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(inst));
}
BENCHMARK(BM_ForwardWindowComposite);

void BM_ForwardBilstmComposite(benchmark::State& state) {
  const auto model = make_model(EncoderKind::Composite, true);
  const auto& inst = fixture().set.instances.front();
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(inst));
}
BENCHMARK(BM_ForwardBilstmComposite);

void BM_ForwardBackwardBilstmComposite(benchmark::State& state) {
  auto model = make_model(EncoderKind::Composite, true);
  const auto& inst = fixture().set.instances.front();
  auto grads = model.make_gradients();
  for (auto _ : state) {
    const auto trace = model.forward(inst);
    grads.zero();
    model.backward(trace, inst.label, grads);
  }
}
BENCHMARK(BM_ForwardBackwardBilstmComposite);

void BM_TrainEpochWindowWordVec(benchmark::State& state) {
  for (auto _ : state) {
    TrainConfig tc;
    tc.encoder = EncoderKind::WordVec;
    tc.aggregator = WindowConcatConfig{3, false};
    tc.mlp_hidden = 64;
    tc.max_epochs = 1;
    tc.patience = 1;
    tc.seed = 5;
    tc.freeze_pretrained = false;
    benchmark::DoNotOptimize(train(fixture().set, tc, fixture().table, fixture().lexicon));
  }
}
BENCHMARK(BM_TrainEpochWindowWordVec)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
