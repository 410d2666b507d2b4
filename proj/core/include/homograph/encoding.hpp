#pragma once

#include "homograph/common.hpp"
#include "homograph/lexicon.hpp"
#include "homograph/morph.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace homograph {

// ---------------------------------------------------------------------------
// Word-embedding channel
// ---------------------------------------------------------------------------

/// Fixed word-vector table. Lookup never fails: unknown words map to the
/// OOV vector and the reserved BOUNDARY token to the boundary vector.
struct EmbeddingTable {
  int dim = 0;                     // d_w
  std::vector<std::string> words;  // row index -> word
  std::unordered_map<std::string, int> index;
  Mat rows;      // |words| x d_w
  Mat oov;       // d_w x 1
  Mat boundary;  // d_w x 1
};

/// Text format: header "V d", then V lines "word x_1 ... x_d". OOV and
/// boundary vectors are drawn from a seeded uniform in [-0.5/d, +0.5/d].
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::uint64_t seed = 0);
void save_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

/// Random table over `vocab` (for runs without pretrained vectors).
EmbeddingTable random_embeddings(std::vector<std::string> vocab, int dim,
                                 std::uint64_t seed);

Vec embed_word(const EmbeddingTable& table, std::string_view word);

// ---------------------------------------------------------------------------
// Morphological-lattice channel
// ---------------------------------------------------------------------------

/// One trainable embedding matrix per feature, one row per value (NA is row 0).
struct FeatureEmbeddingBank {
  int dim = 0;  // d_f
  std::array<Mat, kFeatureCount> tables;

  static FeatureEmbeddingBank init(int feature_dim, std::uint64_t seed);
};

struct LatticeConfig {
  int max_slots = 8;   // K
  int feature_dim = 8; // d_f
  /// Inactive features are encoded with their NA row (dimension preserved);
  /// lets tense or the valence supertag be switched off.
  std::array<bool, kFeatureCount> active = [] {
    std::array<bool, kFeatureCount> a;
    a.fill(true);
    return a;
  }();

  int slot_dim() const { return kFeatureCount * feature_dim; }
  int encoded_dim() const { return max_slots * slot_dim(); }

  void set_active(Feature f, bool on) { active[static_cast<int>(f)] = on; }
  bool is_active(Feature f) const { return active[static_cast<int>(f)]; }
};

/// Effective per-feature value indices of one slot (masking applied).
using SlotValues = std::array<std::uint8_t, kFeatureCount>;

/// All K slots for `word`: the lexicon's analyses sorted by the canonical
/// slot order (pos enumeration order, then lexicographic on the remaining
/// field values), truncated to K and padded with all-NA slots. Unknown words
/// and BOUNDARY yield all-NA slots only.
std::vector<SlotValues> lattice_slot_values(const Lexicon& lexicon,
                                            const LatticeConfig& config,
                                            std::string_view word);

/// Concatenation of the 13 per-feature rows selected by `values`.
Vec encode_slot_values(const FeatureEmbeddingBank& bank, const SlotValues& values,
                       const LatticeConfig& config);

/// Concatenation of the 13 per-feature embedding rows in field order.
Vec encode_analysis_slot(const FeatureEmbeddingBank& bank, const MorphAnalysis& analysis,
                         const LatticeConfig& config = {});

Vec encode_word_lattice(const FeatureEmbeddingBank& bank, const Lexicon& lexicon,
                        const LatticeConfig& config, std::string_view word);

// ---------------------------------------------------------------------------
// Combined context-word encoder
// ---------------------------------------------------------------------------

enum class EncoderKind { WordVec, MorphLattice, Composite };

std::string_view to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(std::string_view text);

/// Output dimension of `kind` given the channel configs.
int encoder_dim(EncoderKind kind, int word_dim, const LatticeConfig& config);

/// Stateless dispatch over the three encoding schemes. For Composite, the
/// word-vector channel precedes the lattice channel.
Vec encode_context_word(EncoderKind kind, const EmbeddingTable& table,
                        const FeatureEmbeddingBank& bank, const Lexicon& lexicon,
                        const LatticeConfig& config, std::string_view word);

}  // namespace homograph
