#pragma once

#include "homograph/training.hpp"

#include <filesystem>
#include <memory>

namespace homograph {

/// Versioned binary container: 8-byte magic, u32 format version, the model
/// configuration and dimensions, the embedding vocabulary, and every
/// parameter tensor as a named row-major float64 record. Checkpoints are
/// self-contained apart from the lexicon, which is corpus data and must be
/// supplied again at load time for lattice encoders.
inline constexpr char kCheckpointMagic[8] = {'H', 'M', 'G', 'R', 'A', 'P', 'H', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const TrainedClassifier& classifier);

TrainedClassifier load_checkpoint(const std::filesystem::path& path,
                                  std::shared_ptr<const Lexicon> lexicon = nullptr);

}  // namespace homograph
