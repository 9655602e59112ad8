#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace covert {

/// Seeded random stream used by every stochastic component.
///
/// Variates are derived from the raw 64-bit engine output with explicit
/// formulas, so a seed reproduces the same stream on any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// Standard normal via Box-Muller (two uniforms per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Counter-based derivation of an independent stream seed from a master
/// seed. Stream i does not depend on how many other streams were drawn.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace covert
