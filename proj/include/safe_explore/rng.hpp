#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace safe_explore {

/// SplitMix64 finalizer; used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t x);

/**
 * Seedable random stream. Every sampling call consumes exactly one 64-bit
 * engine output, and the conversions are written out here rather than taken
 * from <random> distributions, so traces are identical across standard
 * library implementations.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream for replication `index` of an experiment seeded with `base`:
  /// seed = splitmix64(splitmix64(base) ^ splitmix64(index + 0x9e3779b97f4a7c15)).
  /// Stream i depends only on (base, i), so adding runs never perturbs earlier ones.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);
  static Rng split(std::uint64_t base, std::uint64_t index) { return Rng(derive_seed(base, index)); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}; n must be positive.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace safe_explore
