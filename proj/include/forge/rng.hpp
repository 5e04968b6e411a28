#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace forge {

/// Seeded random source used everywhere in the pipeline.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so all derived draws go through the helpers below,
/// which only use integer arithmetic and IEEE double multiplication.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform_unit();

  bool bernoulli(double p) { return uniform_unit() < p; }

  /// Index drawn proportionally to weights (non-negative, positive sum).
  std::size_t categorical(std::span<const double> weights);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  /// SplitMix64 finalizer; also used to derive sub-seeds.
  static std::uint64_t mix(std::uint64_t x);

  /// Combine a base seed with stream identifiers into an independent seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace forge
