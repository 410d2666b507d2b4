#include "homograph/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace homograph {

AdamOptimizer::AdamOptimizer(Model& model, double learning_rate)
    : model_(model), lr_(learning_rate) {
  for (const auto& [name, tensor] : model_.trainable_tensors()) {
    m_.push_back(Mat::Zero(tensor->rows(), tensor->cols()));
    v_.push_back(Mat::Zero(tensor->rows(), tensor->cols()));
  }
}

void AdamOptimizer::step(Gradients& grads) {
  ++steps_;
  const auto params = model_.trainable_tensors();
  const auto gs = Model::gradient_tensors(grads);
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t t = 0; t < params.size(); ++t) {
    const Mat& g = *gs[t].second;
    m_[t] = beta1_ * m_[t] + (1.0 - beta1_) * g;
    v_[t] = beta2_ * v_[t] + (1.0 - beta2_) * g.cwiseProduct(g);
    params[t].second->array() -=
        lr_ * (m_[t].array() / bc1) / ((v_[t].array() / bc2).sqrt() + eps_);
  }
}

namespace {

struct DevSplit {
  std::vector<int> train_ids;  // indices into the instance vector
  std::vector<int> dev_ids;
};

DevSplit carve_dev_split(const std::vector<AnnotatedInstance>& instances, double dev_fraction,
                         Rng& rng) {
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i)
    by_class[instances[i].label - 1].push_back(static_cast<int>(i));
  if (by_class[0].empty() || by_class[1].empty())
    throw ValidationError("training requires instances of both classes");

  DevSplit split;
  for (int c = 0; c < 2; ++c) {
    auto& ids = by_class[c];
    shuffle(ids, rng);
    const int n_dev = static_cast<int>(std::floor(dev_fraction * static_cast<double>(ids.size())));
    if (n_dev < 1)
      throw ValidationError("dev split is empty for class " + std::to_string(c + 1) +
                            " (dev_fraction " + std::to_string(dev_fraction) + " of " +
                            std::to_string(ids.size()) + " instances)");
    split.dev_ids.insert(split.dev_ids.end(), ids.begin(), ids.begin() + n_dev);
    split.train_ids.insert(split.train_ids.end(), ids.begin() + n_dev, ids.end());
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.dev_ids.begin(), split.dev_ids.end());
  return split;
}

ContrastSet subset(const ContrastSet& set, const std::vector<int>& ids) {
  ContrastSet out;
  out.spec = set.spec;
  out.instances.reserve(ids.size());
  for (int id : ids) out.instances.push_back(set.instances[id]);
  return out;
}

}  // namespace

TrainedClassifier train(const ContrastSet& set, const TrainConfig& config,
                        std::shared_ptr<const EmbeddingTable> table,
                        std::shared_ptr<const Lexicon> lexicon) {
  if (config.learning_rate <= 0) throw ValidationError("learning rate must be positive");
  if (config.max_epochs < 1) throw ValidationError("max_epochs must be positive");
  if (config.patience < 1) throw ValidationError("patience must be positive");
  if (config.dev_fraction <= 0.0 || config.dev_fraction >= 1.0)
    throw ValidationError("dev_fraction must be in (0,1)");

  Rng data_rng(mix_seed(config.seed, 0xda7a));
  const DevSplit split = carve_dev_split(set.instances, config.dev_fraction, data_rng);

  Model model(config.model_config(), std::move(table), std::move(lexicon), config.seed);
  AdamOptimizer optimizer(model, config.learning_rate);
  Gradients grads = model.make_gradients();

  std::vector<EpochLog> log;
  Model best = model;
  double best_dev = -1.0;
  int epochs_since_best = 0;
  std::vector<int> order = split.train_ids;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(order, data_rng);
    double loss_sum = 0.0;
    for (int id : order) {
      const auto& inst = set.instances[id];
      const auto trace = model.forward(inst);
      loss_sum += model.loss(trace, inst.label);
      grads.zero();
      model.backward(trace, inst.label, grads);
      optimizer.step(grads);
    }

    int dev_correct = 0;
    for (int id : split.dev_ids)
      if (model.predict(set.instances[id]).chosen_class == set.instances[id].label) ++dev_correct;
    const double dev_acc = static_cast<double>(dev_correct) / split.dev_ids.size();

    log.push_back({epoch, loss_sum / static_cast<double>(order.size()), dev_acc});

    if (dev_acc > best_dev) {
      best_dev = dev_acc;
      best = model;
      epochs_since_best = 0;
    } else if (++epochs_since_best >= config.patience) {
      break;
    }
  }

  return TrainedClassifier{config, std::move(best), std::move(log)};
}

Prediction predict(const TrainedClassifier& classifier, const AnnotatedInstance& instance) {
  return classifier.model.predict(instance);
}

CrossValResult cross_validate(const ContrastSet& set, const TrainConfig& config,
                              std::shared_ptr<const EmbeddingTable> table,
                              std::shared_ptr<const Lexicon> lexicon, int k, int workers,
                              const FoldCallback& on_fold) {
  const auto splits = split_folds(set, k, config.seed);

  CrossValResult result;
  result.folds.resize(k);

  std::atomic<int> next{0};
  std::mutex callback_mutex;
  const auto run_fold = [&](int f) {
    TrainConfig fold_config = config;
    fold_config.seed = config.seed + static_cast<std::uint64_t>(f);
    const auto classifier = train(subset(set, splits[f].train_ids), fold_config, table, lexicon);

    std::vector<int> preds, golds;
    preds.reserve(splits[f].test_ids.size());
    for (int id : splits[f].test_ids) {
      preds.push_back(predict(classifier, set.instances[id]).chosen_class);
      golds.push_back(set.instances[id].label);
    }
    FoldResult& fold = result.folds[f];
    fold.split = splits[f];
    fold.counts = confusion(preds, golds);
    fold.report = make_report(fold.counts);
    fold.log = classifier.log;
    if (on_fold) {
      const std::lock_guard lock(callback_mutex);
      on_fold(f, classifier);
    }
  };

  const int thread_count = std::clamp(workers, 1, k);
  if (thread_count <= 1) {
    for (int f = 0; f < k; ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < thread_count; ++w)
      pool.emplace_back([&] {
        for (int f = next.fetch_add(1); f < k; f = next.fetch_add(1)) {
          try {
            run_fold(f);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto& fold : result.folds) result.pooled += fold.counts;
  result.aggregate = make_report(result.pooled);
  return result;
}

}  // namespace homograph
