#include "homograph/model.hpp"

#include <algorithm>
#include <cmath>

namespace homograph {

namespace {

Mat glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform_real(rng, -bound, bound);
  return m;
}

LstmGate make_gate(int input_dim, int hidden, double bias, Rng& rng) {
  LstmGate g;
  g.w_x = glorot(hidden, input_dim, rng);
  g.w_h = glorot(hidden, hidden, rng);
  g.b = Mat::Constant(hidden, 1, bias);
  return g;
}

LstmGate zero_gate_like(const LstmGate& g) {
  LstmGate z;
  z.w_x = Mat::Zero(g.w_x.rows(), g.w_x.cols());
  z.w_h = Mat::Zero(g.w_h.rows(), g.w_h.cols());
  z.b = Mat::Zero(g.b.rows(), 1);
  return z;
}

LstmStack zero_stack_like(const LstmStack& s) {
  LstmStack z;
  for (const auto& layer : s.layers)
    z.layers.push_back({zero_gate_like(layer.in), zero_gate_like(layer.forget),
                        zero_gate_like(layer.cell), zero_gate_like(layer.out)});
  return z;
}

LstmStepTrace compute_step(const LstmLayerParams& p, const Vec& x, const Vec& h_prev,
                           const Vec& c_prev) {
  LstmStepTrace st;
  st.x = x;
  st.h_prev = h_prev;
  st.c_prev = c_prev;
  const auto affine = [&](const LstmGate& g) -> Vec {
    return g.w_x * x + g.w_h * h_prev + g.b.col(0);
  };
  const auto sigmoid = [](const Vec& v) -> Vec {
    return (1.0 / (1.0 + (-v.array()).exp())).matrix();
  };
  st.i = sigmoid(affine(p.in));
  st.f = sigmoid(affine(p.forget));
  st.g = affine(p.cell).array().tanh().matrix();
  st.o = sigmoid(affine(p.out));
  st.c = (st.f.array() * c_prev.array() + st.i.array() * st.g.array()).matrix();
  st.tanh_c = st.c.array().tanh().matrix();
  st.h = (st.o.array() * st.tanh_c.array()).matrix();
  return st;
}

const char* kGateNames[4] = {"in", "forget", "cell", "out"};

LstmGate* gate_by_index(LstmLayerParams& layer, int g) {
  switch (g) {
    case 0: return &layer.in;
    case 1: return &layer.forget;
    case 2: return &layer.cell;
    case 3: return &layer.out;
  }
  return nullptr;
}

}  // namespace

std::string_view aggregator_name(const AggregatorKind& kind) {
  return std::holds_alternative<WindowConcatConfig>(kind) ? "window" : "bilstm";
}

int aggregator_output_dim(const AggregatorKind& kind, int input_dim) {
  if (const auto* w = std::get_if<WindowConcatConfig>(&kind)) return w->slots() * input_dim;
  return 2 * std::get<BiLstmConfig>(kind).hidden;
}

LstmStack make_lstm_stack(int layers, int input_dim, int hidden, Rng& rng) {
  if (layers < 1 || hidden < 1 || input_dim < 1)
    throw ValidationError("lstm stack dimensions must be positive");
  LstmStack stack;
  for (int l = 0; l < layers; ++l) {
    const int d_in = l == 0 ? input_dim : hidden;
    // Forget-gate bias +1 aids gradient flow through time.
    stack.layers.push_back({make_gate(d_in, hidden, 0.0, rng), make_gate(d_in, hidden, 1.0, rng),
                            make_gate(d_in, hidden, 0.0, rng), make_gate(d_in, hidden, 0.0, rng)});
  }
  return stack;
}

Vec window_context(std::span<const Vec> encoded, int i, int radius, const Vec& boundary,
                   bool include_target) {
  const int n = static_cast<int>(encoded.size());
  if (i < 0 || i >= n) throw ValidationError("window_context: target index out of bounds");
  const Eigen::Index d = boundary.size();
  const int slots = 2 * radius + (include_target ? 1 : 0);
  Vec out(slots * d);
  Eigen::Index offset = 0;
  const auto push = [&](int p) {
    out.segment(offset, d) = (p >= 0 && p < n) ? encoded[p] : boundary;
    offset += d;
  };
  if (include_target) push(i);
  for (int p = i - radius; p < i; ++p) push(p);
  for (int p = i + 1; p <= i + radius; ++p) push(p);
  return out;
}

void lstm_cell(const LstmLayerParams& params, const Vec& x, const Vec& h_prev, const Vec& c_prev,
               Vec& h_out, Vec& c_out) {
  const int hidden = params.hidden();
  if (x.size() != params.input_dim() || h_prev.size() != hidden || c_prev.size() != hidden)
    throw ValidationError("lstm_cell: dimension mismatch");
  const auto st = compute_step(params, x, h_prev, c_prev);
  h_out = st.h;
  c_out = st.c;
}

LstmDirTrace run_lstm(const LstmStack& stack, std::span<const Vec> inputs) {
  LstmDirTrace trace;
  const int layer_count = static_cast<int>(stack.layers.size());
  trace.layers.resize(layer_count);
  const int hidden = stack.hidden();
  if (inputs.empty()) {
    trace.final_h = Vec::Zero(hidden);
    return trace;
  }
  std::vector<Vec> layer_in(inputs.begin(), inputs.end());
  for (int l = 0; l < layer_count; ++l) {
    const auto& params = stack.layers[l];
    Vec h = Vec::Zero(params.hidden());
    Vec c = Vec::Zero(params.hidden());
    trace.layers[l].reserve(layer_in.size());
    for (auto& x : layer_in) {
      auto st = compute_step(params, x, h, c);
      h = st.h;
      c = st.c;
      trace.layers[l].push_back(std::move(st));
    }
    for (std::size_t t = 0; t < layer_in.size(); ++t) layer_in[t] = trace.layers[l][t].h;
  }
  trace.final_h = trace.layers.back().back().h;
  return trace;
}

void lstm_backward(const LstmStack& stack, const LstmDirTrace& trace, const Vec& d_final,
                   LstmStack& grads, std::vector<Vec>& d_inputs) {
  const int layer_count = static_cast<int>(stack.layers.size());
  const std::size_t steps = trace.layers.empty() ? 0 : trace.layers[0].size();
  d_inputs.assign(steps, Vec());
  if (steps == 0) return;

  // Per-step gradient injected into the current layer's hidden outputs;
  // the top layer only receives d_final at the last step.
  std::vector<Vec> inject(steps, Vec::Zero(stack.hidden()));
  inject[steps - 1] = d_final;

  for (int l = layer_count - 1; l >= 0; --l) {
    const auto& params = stack.layers[l];
    auto& layer_grads = grads.layers[l];
    const int lower_dim = params.input_dim();
    std::vector<Vec> lower(steps, Vec::Zero(lower_dim));
    Vec dh_carry = Vec::Zero(params.hidden());
    Vec dc_carry = Vec::Zero(params.hidden());

    for (int t = static_cast<int>(steps) - 1; t >= 0; --t) {
      const auto& st = trace.layers[l][t];
      const Vec dh = inject[t] + dh_carry;
      const Vec dc =
          (dh.array() * st.o.array() * (1.0 - st.tanh_c.array().square())).matrix() + dc_carry;
      const Vec d_out_pre =
          (dh.array() * st.tanh_c.array() * st.o.array() * (1.0 - st.o.array())).matrix();
      const Vec d_forget_pre =
          (dc.array() * st.c_prev.array() * st.f.array() * (1.0 - st.f.array())).matrix();
      const Vec d_in_pre =
          (dc.array() * st.g.array() * st.i.array() * (1.0 - st.i.array())).matrix();
      const Vec d_cell_pre = (dc.array() * st.i.array() * (1.0 - st.g.array().square())).matrix();

      const auto accumulate = [&](LstmGate& g, const Vec& d_pre) {
        g.w_x += d_pre * st.x.transpose();
        g.w_h += d_pre * st.h_prev.transpose();
        g.b.col(0) += d_pre;
      };
      accumulate(layer_grads.in, d_in_pre);
      accumulate(layer_grads.forget, d_forget_pre);
      accumulate(layer_grads.cell, d_cell_pre);
      accumulate(layer_grads.out, d_out_pre);

      lower[t] = params.in.w_x.transpose() * d_in_pre +
                 params.forget.w_x.transpose() * d_forget_pre +
                 params.cell.w_x.transpose() * d_cell_pre +
                 params.out.w_x.transpose() * d_out_pre;
      dh_carry = params.in.w_h.transpose() * d_in_pre +
                 params.forget.w_h.transpose() * d_forget_pre +
                 params.cell.w_h.transpose() * d_cell_pre +
                 params.out.w_h.transpose() * d_out_pre;
      dc_carry = (dc.array() * st.f.array()).matrix();
    }
    inject = std::move(lower);
  }
  d_inputs = std::move(inject);
}

Vec bilstm_context(std::span<const Vec> encoded, int i, const LstmStack& fwd,
                   const LstmStack& bwd) {
  const int n = static_cast<int>(encoded.size());
  if (i < 0 || i >= n) throw ValidationError("bilstm_context: target index out of bounds");
  std::vector<Vec> prefix(encoded.begin(), encoded.begin() + i);
  std::vector<Vec> suffix;
  suffix.reserve(n - i - 1);
  for (int p = n - 1; p > i; --p) suffix.push_back(encoded[p]);

  const auto fwd_trace = run_lstm(fwd, prefix);
  const auto bwd_trace = run_lstm(bwd, suffix);
  Vec out(fwd.hidden() + bwd.hidden());
  out.head(fwd.hidden()) = fwd_trace.final_h;
  out.tail(bwd.hidden()) = bwd_trace.final_h;
  return out;
}

Prediction mlp_forward(const Vec& h, const MlpParams& params) {
  if (h.size() != params.w1.cols()) throw ValidationError("mlp_forward: dimension mismatch");
  const Vec z1 = (params.w1 * h + params.b1.col(0)).array().tanh().matrix();
  const Vec logits = params.w2 * z1 + params.b2.col(0);
  const double m = logits.maxCoeff();
  const double e1 = std::exp(logits(0) - m);
  const double e2 = std::exp(logits(1) - m);
  Prediction pred;
  pred.probabilities = {e1 / (e1 + e2), e2 / (e1 + e2)};
  pred.chosen_class = pred.probabilities[0] >= pred.probabilities[1] ? 1 : 2;
  return pred;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

Model::Model(ModelConfig config, std::shared_ptr<const EmbeddingTable> table,
             std::shared_ptr<const Lexicon> lexicon, std::uint64_t seed)
    : config_(std::move(config)), table_(std::move(table)), lexicon_(std::move(lexicon)) {
  if (config_.uses_words() && !table_)
    throw ValidationError("encoder " + std::string(to_string(config_.encoder)) +
                          " requires an embedding table");
  if (config_.uses_lattice() && !lexicon_)
    throw ValidationError("encoder " + std::string(to_string(config_.encoder)) +
                          " requires a lexicon");
  if (config_.mlp_hidden < 1) throw ValidationError("mlp_hidden must be positive");

  if (config_.uses_words()) {
    oov_ = table_->oov;
    boundary_ = table_->boundary;
    if (!config_.freeze_pretrained) tuned_rows_ = table_->rows;
  }
  if (config_.uses_lattice())
    bank_ = FeatureEmbeddingBank::init(config_.lattice.feature_dim, mix_seed(seed, 1));

  const int d_in = encoder_dim();
  if (const auto* bilstm = std::get_if<BiLstmConfig>(&config_.aggregator)) {
    Rng rng_fwd(mix_seed(seed, 2));
    Rng rng_bwd(mix_seed(seed, 3));
    fwd_ = make_lstm_stack(bilstm->layers, d_in, bilstm->hidden, rng_fwd);
    bwd_ = make_lstm_stack(bilstm->layers, d_in, bilstm->hidden, rng_bwd);
  } else {
    const auto& w = std::get<WindowConcatConfig>(config_.aggregator);
    if (w.radius < 1) throw ValidationError("window radius must be positive");
  }

  Rng rng_mlp(mix_seed(seed, 4));
  mlp_.w1 = glorot(config_.mlp_hidden, context_dim(), rng_mlp);
  mlp_.b1 = Mat::Zero(config_.mlp_hidden, 1);
  mlp_.w2 = glorot(2, config_.mlp_hidden, rng_mlp);
  mlp_.b2 = Mat::Zero(2, 1);
}

int Model::encoder_dim() const {
  return homograph::encoder_dim(config_.encoder, word_dim(), config_.lattice);
}

int Model::context_dim() const {
  return aggregator_output_dim(config_.aggregator, encoder_dim());
}

const Mat& Model::pretrained_rows() const {
  return config_.freeze_pretrained ? table_->rows : tuned_rows_;
}

EncodedToken Model::encode_token(std::string_view word) const {
  EncodedToken tok;
  tok.value.resize(encoder_dim());
  Eigen::Index offset = 0;
  if (config_.uses_words()) {
    const int d = table_->dim;
    if (word == kBoundaryToken) {
      tok.word_row = kRowBoundary;
      tok.value.head(d) = boundary_.col(0);
    } else {
      const auto it = table_->index.find(std::string(word));
      if (it == table_->index.end()) {
        tok.word_row = kRowOov;
        tok.value.head(d) = oov_.col(0);
      } else {
        tok.word_row = it->second;
        tok.value.head(d) = pretrained_rows().row(it->second).transpose();
      }
    }
    offset = d;
  }
  if (config_.uses_lattice()) {
    tok.slots = lattice_slot_values(*lexicon_, config_.lattice, word);
    const int slot_dim = config_.lattice.slot_dim();
    for (std::size_t s = 0; s < tok.slots.size(); ++s)
      tok.value.segment(offset + static_cast<Eigen::Index>(s) * slot_dim, slot_dim) =
          encode_slot_values(bank_, tok.slots[s], config_.lattice);
  }
  return tok;
}

void Model::check_instance(const AnnotatedInstance& instance) const {
  if (instance.tokens.empty()) throw ValidationError("instance has no tokens");
  if (instance.target_index < 0 ||
      instance.target_index >= static_cast<int>(instance.tokens.size()))
    throw ValidationError("target index out of bounds");
}

ForwardTrace Model::forward(const AnnotatedInstance& instance) const {
  check_instance(instance);
  ForwardTrace trace;
  const int i = instance.target_index;
  const int n = static_cast<int>(instance.tokens.size());

  if (const auto* w = std::get_if<WindowConcatConfig>(&config_.aggregator)) {
    const int d = encoder_dim();
    trace.ctx.resize(w->slots() * d);
    Eigen::Index offset = 0;
    const auto push = [&](int p) {
      trace.window.push_back(p >= 0 && p < n ? encode_token(instance.tokens[p])
                                             : encode_token(kBoundaryToken));
      trace.ctx.segment(offset, d) = trace.window.back().value;
      offset += d;
    };
    if (w->include_target) push(i);
    for (int p = i - w->radius; p < i; ++p) push(p);
    for (int p = i + 1; p <= i + w->radius; ++p) push(p);
  } else {
    const auto& cfg = std::get<BiLstmConfig>(config_.aggregator);
    std::vector<Vec> fwd_values, bwd_values;
    for (int p = 0; p < i; ++p) {
      trace.fwd_in.push_back(encode_token(instance.tokens[p]));
      fwd_values.push_back(trace.fwd_in.back().value);
    }
    for (int p = n - 1; p > i; --p) {
      trace.bwd_in.push_back(encode_token(instance.tokens[p]));
      bwd_values.push_back(trace.bwd_in.back().value);
    }
    trace.fwd_dir = run_lstm(fwd_, fwd_values);
    trace.bwd_dir = run_lstm(bwd_, bwd_values);
    trace.ctx.resize(2 * cfg.hidden);
    trace.ctx.head(cfg.hidden) = trace.fwd_dir.final_h;
    trace.ctx.tail(cfg.hidden) = trace.bwd_dir.final_h;
  }

  trace.z1 = (mlp_.w1 * trace.ctx + mlp_.b1.col(0)).array().tanh().matrix();
  const Vec logits = mlp_.w2 * trace.z1 + mlp_.b2.col(0);
  trace.logits = {logits(0), logits(1)};
  const double m = std::max(trace.logits[0], trace.logits[1]);
  const double e1 = std::exp(trace.logits[0] - m);
  const double e2 = std::exp(trace.logits[1] - m);
  trace.probs = {e1 / (e1 + e2), e2 / (e1 + e2)};
  return trace;
}

double Model::loss(const ForwardTrace& trace, int gold_label) const {
  if (gold_label != 1 && gold_label != 2) throw ValidationError("gold label must be 1 or 2");
  const double m = std::max(trace.logits[0], trace.logits[1]);
  const double lse = m + std::log(std::exp(trace.logits[0] - m) + std::exp(trace.logits[1] - m));
  return lse - trace.logits[gold_label - 1];
}

Prediction Model::predict(const AnnotatedInstance& instance) const {
  const auto trace = forward(instance);
  Prediction pred;
  pred.probabilities = trace.probs;
  pred.chosen_class = trace.probs[0] >= trace.probs[1] ? 1 : 2;
  return pred;
}

Gradients Model::make_gradients() const {
  Gradients g;
  if (config_.uses_words()) {
    if (!config_.freeze_pretrained) g.rows = Mat::Zero(tuned_rows_.rows(), tuned_rows_.cols());
    g.oov = Mat::Zero(oov_.rows(), 1);
    g.boundary = Mat::Zero(boundary_.rows(), 1);
  }
  if (config_.uses_lattice()) {
    g.bank.dim = bank_.dim;
    for (int f = 0; f < kFeatureCount; ++f)
      g.bank.tables[f] = Mat::Zero(bank_.tables[f].rows(), bank_.tables[f].cols());
  }
  g.fwd = zero_stack_like(fwd_);
  g.bwd = zero_stack_like(bwd_);
  g.mlp.w1 = Mat::Zero(mlp_.w1.rows(), mlp_.w1.cols());
  g.mlp.b1 = Mat::Zero(mlp_.b1.rows(), 1);
  g.mlp.w2 = Mat::Zero(mlp_.w2.rows(), mlp_.w2.cols());
  g.mlp.b2 = Mat::Zero(mlp_.b2.rows(), 1);
  return g;
}

void Gradients::zero() {
  const auto clear = [](Mat& m) {
    if (m.size() > 0) m.setZero();
  };
  clear(rows);
  clear(oov);
  clear(boundary);
  for (auto& t : bank.tables) clear(t);
  for (auto* stack : {&fwd, &bwd})
    for (auto& layer : stack->layers)
      for (int g = 0; g < 4; ++g) {
        auto* gate = gate_by_index(layer, g);
        clear(gate->w_x);
        clear(gate->w_h);
        clear(gate->b);
      }
  clear(mlp.w1);
  clear(mlp.b1);
  clear(mlp.w2);
  clear(mlp.b2);
}

void Model::accumulate_token_grad(const EncodedToken& token, const Vec& d_value,
                                  Gradients& grads) const {
  Eigen::Index offset = 0;
  if (config_.uses_words()) {
    const int d = table_->dim;
    const auto seg = d_value.head(d);
    if (token.word_row == kRowBoundary)
      grads.boundary.col(0) += seg;
    else if (token.word_row == kRowOov)
      grads.oov.col(0) += seg;
    else if (!config_.freeze_pretrained)
      grads.rows.row(token.word_row) += seg.transpose();
    offset = d;
  }
  if (config_.uses_lattice()) {
    const int d_f = bank_.dim;
    for (std::size_t s = 0; s < token.slots.size(); ++s) {
      const Eigen::Index base = offset + static_cast<Eigen::Index>(s) * config_.lattice.slot_dim();
      for (int f = 0; f < kFeatureCount; ++f)
        grads.bank.tables[f].row(token.slots[s][f]) +=
            d_value.segment(base + f * d_f, d_f).transpose();
    }
  }
}

void Model::backward(const ForwardTrace& trace, int gold_label, Gradients& grads) const {
  if (gold_label != 1 && gold_label != 2) throw ValidationError("gold label must be 1 or 2");
  if (trace.ctx.size() == 0) throw ValidationError("backward without a recorded forward pass");

  Vec d_logits(2);
  d_logits << trace.probs[0], trace.probs[1];
  d_logits(gold_label - 1) -= 1.0;

  grads.mlp.w2 += d_logits * trace.z1.transpose();
  grads.mlp.b2.col(0) += d_logits;
  const Vec d_z1 = mlp_.w2.transpose() * d_logits;
  const Vec d_pre1 = (d_z1.array() * (1.0 - trace.z1.array().square())).matrix();
  grads.mlp.w1 += d_pre1 * trace.ctx.transpose();
  grads.mlp.b1.col(0) += d_pre1;
  const Vec d_ctx = mlp_.w1.transpose() * d_pre1;

  if (std::holds_alternative<WindowConcatConfig>(config_.aggregator)) {
    const int d = encoder_dim();
    for (std::size_t s = 0; s < trace.window.size(); ++s)
      accumulate_token_grad(trace.window[s], d_ctx.segment(static_cast<Eigen::Index>(s) * d, d),
                            grads);
  } else {
    const auto& cfg = std::get<BiLstmConfig>(config_.aggregator);
    std::vector<Vec> d_inputs;
    lstm_backward(fwd_, trace.fwd_dir, d_ctx.head(cfg.hidden), grads.fwd, d_inputs);
    for (std::size_t t = 0; t < d_inputs.size(); ++t)
      accumulate_token_grad(trace.fwd_in[t], d_inputs[t], grads);
    lstm_backward(bwd_, trace.bwd_dir, d_ctx.tail(cfg.hidden), grads.bwd, d_inputs);
    for (std::size_t t = 0; t < d_inputs.size(); ++t)
      accumulate_token_grad(trace.bwd_in[t], d_inputs[t], grads);
  }
}

namespace {

template <typename MatT>
void append_stack(std::vector<std::pair<std::string, MatT*>>& out, const std::string& prefix,
                  auto& stack) {
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    auto& layer = stack.layers[l];
    const std::array gates{&layer.in, &layer.forget, &layer.cell, &layer.out};
    for (int g = 0; g < 4; ++g) {
      const std::string base = prefix + ".l" + std::to_string(l) + "." + kGateNames[g];
      out.emplace_back(base + ".Wx", &gates[g]->w_x);
      out.emplace_back(base + ".Wh", &gates[g]->w_h);
      out.emplace_back(base + ".b", &gates[g]->b);
    }
  }
}

template <typename MatT, typename RowsT, typename BankT, typename StackT, typename MlpT>
std::vector<std::pair<std::string, MatT*>> enumerate(RowsT& rows, MatT& oov, MatT& boundary,
                                                     BankT& bank, StackT& fwd, StackT& bwd,
                                                     MlpT& mlp) {
  std::vector<std::pair<std::string, MatT*>> out;
  if (rows.size() > 0) out.emplace_back("emb.rows", &rows);
  if (oov.size() > 0) out.emplace_back("emb.oov", &oov);
  if (boundary.size() > 0) out.emplace_back("emb.boundary", &boundary);
  for (int f = 0; f < kFeatureCount; ++f)
    if (bank.tables[f].size() > 0)
      out.emplace_back("bank." + std::string(feature_info(static_cast<Feature>(f)).name),
                       &bank.tables[f]);
  append_stack(out, "lstm.fwd", fwd);
  append_stack(out, "lstm.bwd", bwd);
  out.emplace_back("mlp.W1", &mlp.w1);
  out.emplace_back("mlp.b1", &mlp.b1);
  out.emplace_back("mlp.W2", &mlp.w2);
  out.emplace_back("mlp.b2", &mlp.b2);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Mat*>> Model::trainable_tensors() {
  return enumerate<Mat>(tuned_rows_, oov_, boundary_, bank_, fwd_, bwd_, mlp_);
}

std::vector<std::pair<std::string, const Mat*>> Model::trainable_tensors() const {
  return enumerate<const Mat>(tuned_rows_, oov_, boundary_, bank_, fwd_, bwd_, mlp_);
}

std::vector<std::pair<std::string, Mat*>> Model::gradient_tensors(Gradients& grads) {
  return enumerate<Mat>(grads.rows, grads.oov, grads.boundary, grads.bank, grads.fwd, grads.bwd,
                        grads.mlp);
}

}  // namespace homograph
