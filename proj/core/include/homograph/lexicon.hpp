#pragma once

#include "homograph/morph.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace homograph {

/// Surface form -> ordered set of possible analyses. Immutable after load;
/// lookup is deterministic and entry order is stable across loads.
class Lexicon {
 public:
  /// Analyses of `word`, or nullptr when the word is unlisted.
  const std::vector<MorphAnalysis>* find(std::string_view word) const;

  /// Registers an entry; analyses must be nonempty and individually valid.
  void add(std::string word, std::vector<MorphAnalysis> analyses);

  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Tab-separated text format: a surface-form line, then one continuation
  // line per analysis, each a tab-indented list of feature=value pairs
  // (unlisted features default to NA).
  static Lexicon load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::map<std::string, std::vector<MorphAnalysis>, std::less<>> entries_;
};

}  // namespace homograph
