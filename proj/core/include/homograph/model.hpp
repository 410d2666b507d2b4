#pragma once

#include "homograph/common.hpp"
#include "homograph/corpus.hpp"
#include "homograph/encoding.hpp"

#include <array>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace homograph {

// ---------------------------------------------------------------------------
// Context aggregation
// ---------------------------------------------------------------------------

struct WindowConcatConfig {
  int radius = 3;
  /// Keeps the target's own encoding as the leading slot (ablation switch;
  /// the default masks the target so only context drives the decision).
  bool include_target = false;

  int slots() const { return 2 * radius + (include_target ? 1 : 0); }
};

struct BiLstmConfig {
  int layers = 2;
  int hidden = 64;
};

using AggregatorKind = std::variant<WindowConcatConfig, BiLstmConfig>;

std::string_view aggregator_name(const AggregatorKind& kind);  // "window" / "bilstm"
int aggregator_output_dim(const AggregatorKind& kind, int input_dim);

struct LstmGate {
  Mat w_x;  // hidden x input
  Mat w_h;  // hidden x hidden
  Mat b;    // hidden x 1
};

struct LstmLayerParams {
  LstmGate in, forget, cell, out;

  int hidden() const { return static_cast<int>(in.b.rows()); }
  int input_dim() const { return static_cast<int>(in.w_x.cols()); }
};

struct LstmStack {
  std::vector<LstmLayerParams> layers;

  int hidden() const { return layers.empty() ? 0 : layers.back().hidden(); }
};

LstmStack make_lstm_stack(int layers, int input_dim, int hidden, Rng& rng);

struct MlpParams {
  Mat w1;  // h_mlp x d_ctx
  Mat b1;  // h_mlp x 1
  Mat w2;  // 2 x h_mlp
  Mat b2;  // 2 x 1
};

struct Prediction {
  std::array<double, 2> probabilities{};  // sums to 1
  int chosen_class = 1;                   // argmax, tie broken to class 1
};

// ---------------------------------------------------------------------------
// Stateless forward operations
// ---------------------------------------------------------------------------

/// Concatenates the encodings of positions i-radius..i-1 and i+1..i+radius
/// (target masked), substituting `boundary` for off-sentence positions.
/// With include_target, the target's own encoding leads.
Vec window_context(std::span<const Vec> encoded, int i, int radius, const Vec& boundary,
                   bool include_target = false);

/// One LSTM cell step: gates i,f,o = sigmoid, candidate g = tanh,
/// c = f*c_prev + i*g, h = o*tanh(c).
void lstm_cell(const LstmLayerParams& params, const Vec& x, const Vec& h_prev,
               const Vec& c_prev, Vec& h_out, Vec& c_out);

/// Forward stack over positions 0..i-1, backward stack over n-1..i+1; each
/// top-layer final hidden state (zero when its span is empty), concatenated.
Vec bilstm_context(std::span<const Vec> encoded, int i, const LstmStack& fwd,
                   const LstmStack& bwd);

Prediction mlp_forward(const Vec& h, const MlpParams& params);

// ---------------------------------------------------------------------------
// Trainable classifier model
// ---------------------------------------------------------------------------

struct ModelConfig {
  EncoderKind encoder = EncoderKind::WordVec;
  AggregatorKind aggregator = WindowConcatConfig{};
  LatticeConfig lattice{};
  int mlp_hidden = 128;
  /// Pretrained embedding rows stay fixed; OOV/BOUNDARY vectors always train.
  bool freeze_pretrained = true;

  bool uses_words() const { return encoder != EncoderKind::MorphLattice; }
  bool uses_lattice() const { return encoder != EncoderKind::WordVec; }
};

/// Row markers for the word channel of an encoded token.
inline constexpr int kRowOov = -1;
inline constexpr int kRowBoundary = -2;
inline constexpr int kRowNone = -3;

struct EncodedToken {
  Vec value;
  int word_row = kRowNone;        // vocabulary row, kRowOov, or kRowBoundary
  std::vector<SlotValues> slots;  // K slots when the lattice channel is active
};

struct LstmStepTrace {
  Vec x, h_prev, c_prev;
  Vec i, f, g, o, c, tanh_c, h;
};

struct LstmDirTrace {
  std::vector<std::vector<LstmStepTrace>> layers;  // [layer][step]
  Vec final_h;
};

struct ForwardTrace {
  std::vector<EncodedToken> window;           // window aggregator, slot order
  std::vector<EncodedToken> fwd_in, bwd_in;   // BiLSTM inputs, consumption order
  LstmDirTrace fwd_dir, bwd_dir;
  Vec ctx;  // aggregator output = MLP input
  Vec z1;
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
};

/// Parameter-shaped gradient buffers (allocated to match one Model).
struct Gradients {
  Mat rows;  // only when pretrained rows are trainable
  Mat oov, boundary;
  FeatureEmbeddingBank bank;
  LstmStack fwd, bwd;
  MlpParams mlp;

  void zero();
};

class Model {
 public:
  Model(ModelConfig config, std::shared_ptr<const EmbeddingTable> table,
        std::shared_ptr<const Lexicon> lexicon, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  int word_dim() const { return table_ ? table_->dim : 0; }
  int encoder_dim() const;  // d_in per context word
  int context_dim() const;  // MLP input width

  EncodedToken encode_token(std::string_view word) const;
  ForwardTrace forward(const AnnotatedInstance& instance) const;
  double loss(const ForwardTrace& trace, int gold_label) const;
  Prediction predict(const AnnotatedInstance& instance) const;

  Gradients make_gradients() const;
  /// Exact gradients of -log p(gold) for every trainable parameter,
  /// accumulated into `grads`.
  void backward(const ForwardTrace& trace, int gold_label, Gradients& grads) const;

  /// Named views over the trainable tensors, in a fixed order mirrored by
  /// gradient_tensors(); drives the optimizer, gradient checks, checkpoints.
  std::vector<std::pair<std::string, Mat*>> trainable_tensors();
  std::vector<std::pair<std::string, const Mat*>> trainable_tensors() const;
  static std::vector<std::pair<std::string, Mat*>> gradient_tensors(Gradients& grads);

  const EmbeddingTable* embedding_table() const { return table_.get(); }
  std::shared_ptr<const EmbeddingTable> embedding_table_ptr() const { return table_; }
  std::shared_ptr<const Lexicon> lexicon() const { return lexicon_; }
  const Mat& pretrained_rows() const;
  const FeatureEmbeddingBank& bank() const { return bank_; }
  const LstmStack& forward_stack() const { return fwd_; }
  const LstmStack& backward_stack() const { return bwd_; }
  const MlpParams& mlp() const { return mlp_; }
  MlpParams& mlp() { return mlp_; }

 private:
  void check_instance(const AnnotatedInstance& instance) const;
  void accumulate_token_grad(const EncodedToken& token, const Vec& d_value,
                             Gradients& grads) const;

  ModelConfig config_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::shared_ptr<const Lexicon> lexicon_;

  Mat tuned_rows_;  // copy of pretrained rows when freeze_pretrained=false
  Mat oov_, boundary_;
  FeatureEmbeddingBank bank_;
  LstmStack fwd_, bwd_;
  MlpParams mlp_;
};

/// LSTM engine shared by the stateless ops and the model: forward pass with
/// full trace, and backpropagation through time.
LstmDirTrace run_lstm(const LstmStack& stack, std::span<const Vec> inputs);
void lstm_backward(const LstmStack& stack, const LstmDirTrace& trace, const Vec& d_final,
                   LstmStack& grads, std::vector<Vec>& d_inputs);

}  // namespace homograph
