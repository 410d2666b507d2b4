#pragma once

#include "homograph/corpus.hpp"
#include "homograph/metrics.hpp"
#include "homograph/model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace homograph {

struct TrainConfig {
  EncoderKind encoder = EncoderKind::WordVec;
  AggregatorKind aggregator = WindowConcatConfig{};
  LatticeConfig lattice{};
  int mlp_hidden = 128;
  double learning_rate = 1e-3;
  int max_epochs = 50;
  int patience = 5;
  double dev_fraction = 0.1;
  std::uint64_t seed = 0;
  bool freeze_pretrained = true;

  ModelConfig model_config() const {
    return ModelConfig{encoder, aggregator, lattice, mlp_hidden, freeze_pretrained};
  }
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainedClassifier {
  TrainConfig config;
  Model model;
  std::vector<EpochLog> log;
};

/// Per-instance Adam on cross-entropy with a stratified dev split carved from
/// the training instances; stops after `patience` epochs without dev-accuracy
/// improvement (or at max_epochs) and returns the best dev epoch's parameters.
TrainedClassifier train(const ContrastSet& set, const TrainConfig& config,
                        std::shared_ptr<const EmbeddingTable> table,
                        std::shared_ptr<const Lexicon> lexicon);

Prediction predict(const TrainedClassifier& classifier, const AnnotatedInstance& instance);

struct FoldResult {
  FoldSplit split;
  ConfusionCounts counts;
  EvalReport report;
  std::vector<EpochLog> log;
};

struct CrossValResult {
  std::vector<FoldResult> folds;
  ConfusionCounts pooled;  // elementwise sum of fold counts
  EvalReport aggregate;    // metrics over the pooled counts
};

/// Called as each fold finishes (possibly from a worker thread, at most one
/// call at a time); gives access to the fold's trained classifier, e.g. for
/// per-fold checkpointing.
using FoldCallback = std::function<void(int fold, const TrainedClassifier& classifier)>;

/// k-fold cross-validation per the split_folds protocol. Folds train
/// independently with fold-derived seeds (config.seed + fold index), so
/// running them on several workers is bit-identical to sequential execution.
CrossValResult cross_validate(const ContrastSet& set, const TrainConfig& config,
                              std::shared_ptr<const EmbeddingTable> table,
                              std::shared_ptr<const Lexicon> lexicon, int k = 10,
                              int workers = 1, const FoldCallback& on_fold = {});

/// Adam over a model's trainable tensors (decay 0.9/0.999, eps 1e-8).
class AdamOptimizer {
 public:
  AdamOptimizer(Model& model, double learning_rate);
  void step(Gradients& grads);

 private:
  Model& model_;
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long steps_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace homograph
