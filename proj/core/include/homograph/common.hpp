#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace homograph {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Reserved token standing in for positions beyond the sentence edge.
inline constexpr std::string_view kBoundaryToken = "<BOUNDARY>";

/// Minimum per-class attestation below which corpus tools warn.
inline constexpr int kMinClassSupport = 400;

/// Bad input data or configuration; maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Seeded randomness. All draws go through these helpers so that results are
// reproducible for a given seed regardless of the standard library
// (std::shuffle and std::uniform_*_distribution are not pinned by the
// standard; mt19937_64 output is).
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Derive an independent stream seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [lo, hi) from the top 53 bits of the engine.
inline double uniform_real(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

/// k distinct indices drawn uniformly from [0, n), in selection order.
inline std::vector<int> sample_indices(int n, int k, Rng& rng) {
  if (k > n) throw std::invalid_argument("sample_indices: k > n");
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> picked;
  picked.reserve(k);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, pool.size()));
    picked.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return picked;
}

}  // namespace homograph
