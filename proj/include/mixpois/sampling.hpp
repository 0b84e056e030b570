#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mixpois/family.hpp"

namespace mixpois {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of Monte Carlo shard `shard` under master seed `seed`:
/// mix64(seed + 0x9E3779B97F4A7C15 * (shard + 1)).
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) noexcept;

/// Deterministic generator: mt19937_64 bits with fixed transforms, so the
/// stream is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential() { return -std::log(uniform_open()); }
  /// Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Exact sampler for the mixing law X.
class MixingSampler {
 public:
  explicit MixingSampler(const FamilySpec& spec);

  double operator()(Rng& rng) const;

 private:
  FamilySpec spec_;
  // Chambers-Mallows-Stuck constants for beta = 1.
  double cms_shift_ = 0.0;  // B = atan(tan(pi alpha / 2)) / alpha
  double cms_scale_ = 1.0;  // S = (1 + tan^2(pi alpha / 2))^(1 / (2 alpha))
};

/// `count` draws of X from a generator seeded with `seed`.
std::vector<double> sample_mixing(const FamilySpec& spec, std::uint64_t seed, std::size_t count);

}  // namespace mixpois
