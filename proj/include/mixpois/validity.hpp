#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mixpois/family.hpp"

namespace mixpois {

enum class Verdict { Valid, Invalid, VerifiedUpTo };

std::string_view to_string(Verdict v) noexcept;

/// Where an existence rule fails. For an odd-n inequality `n` is set and
/// `value` is the (negative) PMF value f(n); for a constraint without an
/// index, `n` is empty and `value` is the constraint residual (< 0).
struct Witness {
  std::optional<int> n;
  double value = 0.0;
  std::string constraint;
};

struct ValidityReport {
  Verdict verdict = Verdict::Invalid;
  /// Horizon of the numeric check; only meaningful for VerifiedUpTo.
  int verifiedUpTo = 0;
  std::string rule;
  std::optional<Witness> witness;
  std::optional<double> phi;
  /// Numeric check only: the positive/negative side ratio never decreased
  /// over the checked odd n. Corroboration, not proof.
  bool monotoneTrend = false;

  bool passes() const noexcept { return verdict != Verdict::Invalid; }
};

inline constexpr double kBoundaryTol = 1e-12;

/// Family-specific sufficient conditions:
///   two-point      b >= a and (b/a) e^{-a-b} >= phi
///   asym-laplace   lambda1 >= lambda2 + 2 and phi <= (lambda2/lambda1) ((lambda1-1)/(lambda2+1))^2
///   gaussian       mu >= sigma2 (the Hermite distribution)
///   extreme-stable delta >= -alpha sec(pi alpha/2) sigma^alpha (alpha != 1),
///                  delta >= 2 sigma / pi (alpha = 1)
/// A law without negative mass is always valid. Equality cases are valid.
ValidityReport check_family(const FamilySpec& spec, double tol = kBoundaryTol);

/// Finite-horizon check of the odd-moment inequality
///   E[A^n e^A] Pr(X<0) <= E[B^n e^{-B}] Pr(X>=0),  n = 1, 3, ..., oddMax
/// together with E[e^{2A}] < infinity. Terms come from the closed forms
/// (two-point, asym-laplace) or from quadrature (gaussian); extreme-stable
/// throws UnsupportedFamily. Never returns Valid.
ValidityReport check_sufficient_numeric(const FamilySpec& spec, int oddMax, double tol = kBoundaryTol);

enum class Condition { Pass, Fail, Vacuous };

std::string_view to_string(Condition c) noexcept;

struct NecessityReport {
  Condition cond1 = Condition::Pass;  // no negative mass, or some positive mass
  Condition cond2 = Condition::Pass;  // A subexponential with E[e^A] finite
  Condition cond3 = Condition::Pass;  // B q-subweibull implies A q-subweibull
  bool overall = true;
};

/// Screens a tail descriptor against conditions every valid mixing law meets.
NecessityReport check_necessary(const TailDescriptor& desc);

}  // namespace mixpois
