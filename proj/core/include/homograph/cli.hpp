#pragma once

#include "homograph/corpus.hpp"

#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace homograph::cli {

/// Embedding hooks for corpus construction. The candidate filter mirrors the
/// external minority-candidate mining step: instances it rejects are dropped
/// before the collocation cap is applied.
struct BuildCorpusHooks {
  std::function<bool(const AnnotatedInstance&)> candidate_filter;
};

/// Runs one CLI invocation (args exclude the program name). Exit codes:
/// 0 success, 1 validation/config error, 2 runtime or training error,
/// 3 gradient-check failure.
int run(std::vector<std::string> args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr, const BuildCorpusHooks& hooks = {});

int run(int argc, const char* const* argv);

}  // namespace homograph::cli
