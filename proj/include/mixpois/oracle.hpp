#pragma once

// Independent verification engines: sharded Monte Carlo over the exact
// mixing sampler, and adaptive quadrature against closed-form densities.
// Nothing here uses the closed-form PMFs or the coefficient recursion.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mixpois/family.hpp"

namespace mixpois::oracle {

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  /// Count index n for PMF estimates; -1 for other functionals.
  int n = -1;
};

/// Samples per Monte Carlo shard. Shard k draws from Rng(shard_seed(seed, k)),
/// so results depend on (seed, M) only, never on the thread count.
inline constexpr std::int64_t kShardSize = 1 << 16;
inline constexpr std::int64_t kMinSamples = 1000;

struct McOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Monte Carlo estimate of f(n) = E[X^n e^{-X}] / n!.
OracleEstimate mc_estimate(const FamilySpec& spec, int n, std::int64_t samples, std::uint64_t seed,
                           McOptions options = {});

/// Several count indices from one set of draws. Entry i equals
/// mc_estimate(spec, ns[i], samples, seed) bit for bit.
std::vector<OracleEstimate> mc_estimates(const FamilySpec& spec, std::span<const int> ns, std::int64_t samples,
                                         std::uint64_t seed, McOptions options = {});

/// Monte Carlo estimate of E[exp(-tX)].
OracleEstimate mc_laplace(const FamilySpec& spec, double t, std::int64_t samples, std::uint64_t seed,
                          McOptions options = {});

/// Monte Carlo estimate of Pr(X < 0).
OracleEstimate mc_negative_mass(const FamilySpec& spec, std::int64_t samples, std::uint64_t seed,
                                McOptions options = {});

/// Adaptive Gauss-Kronrod on a finite interval with relative tolerance `tol`.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol);

/// f(n) by quadrature of x^n e^{-x} / n! against the density (AsymLaplace,
/// GaussianMix).
double quad_estimate(const FamilySpec& spec, int n, double tol = 1e-10);

enum class Side { Neg, Pos };

/// E[A^n e^A] (Side::Neg) or E[B^n e^{-B}] (Side::Pos) by quadrature of the
/// sign-conditioned integrand, normalized by Pr(X<0) resp. Pr(X>=0).
/// GaussianMix and AsymLaplace.
double term_quad(const FamilySpec& spec, int n, Side side, double tol = 1e-10);

/// log of the unnormalized side integral: log E[A^n e^A; X<0] resp.
/// log E[B^n e^{-B}; X>=0]. Stays finite where term_quad overflows.
double log_side_integral(const FamilySpec& spec, int n, Side side, double tol = 1e-10);

}  // namespace mixpois::oracle
