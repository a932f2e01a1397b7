#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace decoh {

/// Seeded pseudorandom stream. Every draw is derived from the raw 64-bit
/// output of mt19937_64 (whose sequence is fixed by the standard), so a seed
/// reproduces the same numbers on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Box–Muller transform; draws come in pairs.
  double normal();

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher–Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// One seed per independent random stream used to build an experiment.
struct RngSeeds {
  std::uint64_t couplings = 1;
  std::uint64_t state = 2;
  std::uint64_t swb_env = 3;
  std::uint64_t swb_se = 4;
  std::uint64_t random_bonds = 5;
};

}  // namespace decoh
