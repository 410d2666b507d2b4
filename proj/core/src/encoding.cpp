#include "homograph/encoding.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace homograph {

namespace {

Mat uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform_real(rng, -bound, bound);
  return m;
}

double parse_double(std::string_view text, int line_no) {
  double value = 0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ValidationError("embeddings line " + std::to_string(line_no) +
                          ": non-numeric component '" + std::string(text) + "'");
  return value;
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embeddings file: " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("embeddings file is empty: " + path.string());

  std::istringstream header(line);
  long long vocab = -1, dim = -1;
  if (!(header >> vocab >> dim) || vocab < 0 || dim <= 0)
    throw ValidationError("embeddings header must be 'V d', got '" + line + "'");

  EmbeddingTable table;
  table.dim = static_cast<int>(dim);
  table.words.reserve(vocab);
  table.rows.resize(vocab, dim);

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    if (word.empty())
      throw ValidationError("embeddings line " + std::to_string(line_no) + ": missing word");
    const int row = static_cast<int>(table.words.size());
    if (row >= vocab)
      throw ValidationError("embeddings file has more than the declared " +
                            std::to_string(vocab) + " rows");
    if (!table.index.emplace(word, row).second)
      throw ValidationError("embeddings line " + std::to_string(line_no) +
                            ": duplicate word '" + word + "'");
    table.words.push_back(word);
    std::string component;
    for (int c = 0; c < dim; ++c) {
      if (!(fields >> component))
        throw ValidationError("embeddings line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " components, got " + std::to_string(c));
      table.rows(row, c) = parse_double(component, line_no);
    }
    if (fields >> component)
      throw ValidationError("embeddings line " + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " components, got more");
  }
  if (static_cast<long long>(table.words.size()) != vocab)
    throw ValidationError("embeddings file declares " + std::to_string(vocab) + " rows but has " +
                          std::to_string(table.words.size()));

  Rng rng(mix_seed(seed, 0x0e0f));
  const double bound = 0.5 / static_cast<double>(dim);
  table.oov = uniform_matrix(dim, 1, bound, rng);
  table.boundary = uniform_matrix(dim, 1, bound, rng);
  return table;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write embeddings file: " + path.string());
  out.precision(17);
  out << table.words.size() << ' ' << table.dim << '\n';
  for (std::size_t r = 0; r < table.words.size(); ++r) {
    out << table.words[r];
    for (int c = 0; c < table.dim; ++c) out << ' ' << table.rows(static_cast<int>(r), c);
    out << '\n';
  }
}

EmbeddingTable random_embeddings(std::vector<std::string> vocab, int dim, std::uint64_t seed) {
  if (dim <= 0) throw ValidationError("embedding dimension must be positive");
  EmbeddingTable table;
  table.dim = dim;
  Rng rng(mix_seed(seed, 0x0e10));
  const double bound = 0.5 / static_cast<double>(dim);
  table.rows = uniform_matrix(static_cast<Eigen::Index>(vocab.size()), dim, bound, rng);
  table.oov = uniform_matrix(dim, 1, bound, rng);
  table.boundary = uniform_matrix(dim, 1, bound, rng);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (!table.index.emplace(vocab[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate word in embedding vocabulary: " + vocab[i]);
  }
  table.words = std::move(vocab);
  return table;
}

Vec embed_word(const EmbeddingTable& table, std::string_view word) {
  if (word == kBoundaryToken) return table.boundary.col(0);
  const auto it = table.index.find(std::string(word));
  if (it == table.index.end()) return table.oov.col(0);
  return table.rows.row(it->second).transpose();
}

FeatureEmbeddingBank FeatureEmbeddingBank::init(int feature_dim, std::uint64_t seed) {
  if (feature_dim <= 0) throw ValidationError("feature embedding dimension must be positive");
  FeatureEmbeddingBank bank;
  bank.dim = feature_dim;
  Rng rng(mix_seed(seed, 0x0ba5));
  const double bound = 0.5 / static_cast<double>(feature_dim);
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto values = feature_info(static_cast<Feature>(f)).values.size();
    bank.tables[f] = uniform_matrix(static_cast<Eigen::Index>(values), feature_dim, bound, rng);
  }
  return bank;
}

std::vector<SlotValues> lattice_slot_values(const Lexicon& lexicon, const LatticeConfig& config,
                                            std::string_view word) {
  SlotValues na{};
  std::vector<SlotValues> slots;
  slots.reserve(config.max_slots);

  const std::vector<MorphAnalysis>* analyses =
      word == kBoundaryToken ? nullptr : lexicon.find(word);
  if (analyses) {
    std::vector<std::array<std::uint8_t, kFeatureCount>> keys;
    keys.reserve(analyses->size());
    for (const auto& a : *analyses) keys.push_back(a.key());
    std::sort(keys.begin(), keys.end());
    for (const auto& key : keys) {
      if (static_cast<int>(slots.size()) >= config.max_slots) break;
      SlotValues v{};
      for (int f = 0; f < kFeatureCount; ++f) v[f] = config.active[f] ? key[f] : 0;
      slots.push_back(v);
    }
  } else if (word != kBoundaryToken) {
    slots.push_back(na);  // unknown word: one all-NA slot
  }
  while (static_cast<int>(slots.size()) < config.max_slots) slots.push_back(na);
  return slots;
}

Vec encode_slot_values(const FeatureEmbeddingBank& bank, const SlotValues& values,
                       const LatticeConfig& config) {
  Vec out(config.slot_dim());
  for (int f = 0; f < kFeatureCount; ++f)
    out.segment(f * bank.dim, bank.dim) = bank.tables[f].row(values[f]).transpose();
  return out;
}

Vec encode_analysis_slot(const FeatureEmbeddingBank& bank, const MorphAnalysis& analysis,
                         const LatticeConfig& config) {
  SlotValues v{};
  const auto key = analysis.key();
  for (int f = 0; f < kFeatureCount; ++f) v[f] = config.active[f] ? key[f] : 0;
  return encode_slot_values(bank, v, config);
}

Vec encode_word_lattice(const FeatureEmbeddingBank& bank, const Lexicon& lexicon,
                        const LatticeConfig& config, std::string_view word) {
  const auto slots = lattice_slot_values(lexicon, config, word);
  Vec out(config.encoded_dim());
  for (std::size_t s = 0; s < slots.size(); ++s)
    out.segment(static_cast<Eigen::Index>(s) * config.slot_dim(), config.slot_dim()) =
        encode_slot_values(bank, slots[s], config);
  return out;
}

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::WordVec: return "word_vec";
    case EncoderKind::MorphLattice: return "morph_lattice";
    case EncoderKind::Composite: return "composite";
  }
  throw std::logic_error("bad encoder kind");
}

EncoderKind encoder_kind_from_string(std::string_view text) {
  if (text == "word_vec") return EncoderKind::WordVec;
  if (text == "morph_lattice") return EncoderKind::MorphLattice;
  if (text == "composite") return EncoderKind::Composite;
  throw ValidationError("unknown encoder '" + std::string(text) +
                        "' (expected word_vec, morph_lattice, or composite)");
}

int encoder_dim(EncoderKind kind, int word_dim, const LatticeConfig& config) {
  switch (kind) {
    case EncoderKind::WordVec: return word_dim;
    case EncoderKind::MorphLattice: return config.encoded_dim();
    case EncoderKind::Composite: return word_dim + config.encoded_dim();
  }
  throw std::logic_error("bad encoder kind");
}

Vec encode_context_word(EncoderKind kind, const EmbeddingTable& table,
                        const FeatureEmbeddingBank& bank, const Lexicon& lexicon,
                        const LatticeConfig& config, std::string_view word) {
  switch (kind) {
    case EncoderKind::WordVec: return embed_word(table, word);
    case EncoderKind::MorphLattice: return encode_word_lattice(bank, lexicon, config, word);
    case EncoderKind::Composite: {
      Vec out(table.dim + config.encoded_dim());
      out.head(table.dim) = embed_word(table, word);
      out.tail(config.encoded_dim()) = encode_word_lattice(bank, lexicon, config, word);
      return out;
    }
  }
  throw std::logic_error("bad encoder kind");
}

}  // namespace homograph
