#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mixpois/family.hpp"

namespace mixpois {

/// Negative PMF values down to this threshold count as rounding noise.
inline constexpr double kNegativityTol = 1e-12;
inline constexpr double kDefaultEpsilon = 1e-10;
inline constexpr int kDefaultCap = 100000;

/// Whether table/coefficient construction first runs check_family.
/// Skip exists to observe what an invalid law produces; a negative value
/// then raises NegativeProbability.
enum class Gate { Enforce, Skip };

/// f(n) for TwoPoint and AsymLaplace by direct evaluation; each signed
/// component is formed in log space and the two are subtracted once.
double pmf_closed(const FamilySpec& spec, int n, Gate gate = Gate::Enforce);

/// G(z) = E[exp(-(1-z) X)], z in [0, 1].
double pgf_eval(const FamilySpec& spec, double z);

/// r(z) = G'(z) / G(z) for GaussianMix and ExtremeStable, z in [0, 1).
double pgf_log_derivative(const FamilySpec& spec, double z);

/// Scaled derivatives: rho[j] = r^(j)(0) / j!, p[n] = G^(n)(0) / n!.
struct RecursionState {
  std::vector<double> rho;
  std::vector<double> p;
};

/// Taylor coefficients of r at 0, generated lazily.
class RhoSequence {
 public:
  explicit RhoSequence(const FamilySpec& spec);

  /// rho_0 .. rho_{k}; extends the cache as needed.
  double operator[](std::size_t k);
  /// Prefix rho_0..rho_{len-1} trimmed to the nonzero support.
  std::span<const double> prefix(std::size_t len);

 private:
  void extend(std::size_t len);

  std::vector<double> values_;
  double alpha_ = 0.0;
  double scale_ = 0.0;  // rho_1 for alpha != 1, sigma*2/pi for alpha = 1
  int kind_ = 0;        // 0 Hermite, 1 stable alpha != 1, 2 stable alpha = 1
  std::size_t support_ = SIZE_MAX;  // index of the first structural zero
};

/// p_0 = G(0) and p_{n+1} = (1/(n+1)) sum_{j=0..n} rho_j p_{n-j}, n < nMax.
/// O(nMax^2) multiply-adds through the SIMD reversed dot product.
RecursionState pgf_coeffs(const FamilySpec& spec, int nMax, Gate gate = Gate::Enforce);

enum class Truncation { MassReached, CapReached };

std::string_view to_string(Truncation t) noexcept;

struct PmfTable {
  std::vector<double> probs;       // f(0) .. f(N)
  std::vector<double> cumulative;  // compensated prefix sums
  double accumulated = 0.0;
  double tailGap = 1.0;
  FamilySpec family;
  Truncation reason = Truncation::CapReached;
  double epsilon = kDefaultEpsilon;
  int nCap = kDefaultCap;

  int last_index() const noexcept { return static_cast<int>(probs.size()) - 1; }
};

/// Fills f(0), f(1), ... until the accumulated mass reaches 1 - epsilon
/// (MassReached) or N = nCap (CapReached).
PmfTable pmf_table(const FamilySpec& spec, double epsilon = kDefaultEpsilon, int nCap = kDefaultCap,
                   Gate gate = Gate::Enforce);

/// Pr(Y <= n) within the table; n past the table returns `accumulated`.
double cdf(const PmfTable& table, long long n);

/// Least n with cdf(n) >= u, u in (0, 1). When u exceeds the table's mass a
/// MassReached table is rebuilt deeper; a capped table raises InsufficientMass.
int quantile(const PmfTable& table, double u);

/// Inversion sampling on uniforms from Rng(seed).
std::vector<int> sample_count(const PmfTable& table, std::uint64_t seed, std::size_t count);

}  // namespace mixpois
