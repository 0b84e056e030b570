#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>

namespace mixpois {

/// Atom at -a with probability p, atom at b with probability 1-p.
struct TwoPoint {
  double a;
  double b;
  double p;
};

/// Exponential(lambda1) left tail with probability p, Exponential(lambda2)
/// right tail with probability 1-p.
struct AsymLaplace {
  double lambda1;
  double lambda2;
  double p;
};

struct GaussianMix {
  double mu;
  double sigma2;
};

/// Stable law S_alpha(sigma, beta=1, delta) in the parameterization with the
/// tan(pi*alpha/2) factor (no continuity fix at alpha = 1).
struct ExtremeStable {
  double alpha;
  double sigma;
  double delta;
};

enum class FamilyKind { TwoPoint, AsymLaplace, GaussianMix, ExtremeStable };

/// Alpha values within this distance of 1 use the alpha = 1 branch.
inline constexpr double kAlphaOneSnap = 1e-9;

class FamilySpec {
 public:
  using Params = std::variant<TwoPoint, AsymLaplace, GaussianMix, ExtremeStable>;

  /// Validates parameter domains; throws InvalidParameter.
  explicit FamilySpec(Params params);

  static FamilySpec two_point(double a, double b, double p) { return FamilySpec(TwoPoint{a, b, p}); }
  static FamilySpec asym_laplace(double lambda1, double lambda2, double p) {
    return FamilySpec(AsymLaplace{lambda1, lambda2, p});
  }
  static FamilySpec gaussian(double mu, double sigma2) { return FamilySpec(GaussianMix{mu, sigma2}); }
  static FamilySpec extreme_stable(double alpha, double sigma, double delta) {
    return FamilySpec(ExtremeStable{alpha, sigma, delta});
  }

  const Params& params() const noexcept { return params_; }
  FamilyKind kind() const noexcept { return static_cast<FamilyKind>(params_.index()); }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&params_);
  }

  /// Odds p/(1-p) of the negative component; empty for families without a
  /// p parameter.
  std::optional<double> odds() const noexcept;

  /// CLI family name ("two-point", "asym-laplace", "gaussian", "extreme-stable").
  std::string name() const;

  /// Human-readable summary, e.g. "two-point{a=2, b=2, p=0.009}".
  std::string describe() const;

 private:
  Params params_;
};

bool is_alpha_one(double alpha) noexcept;

/// sec(pi*alpha/2); alpha must not be on the alpha = 1 branch.
double stable_secant(double alpha);

/// Bilateral Laplace transform E[exp(-tX)], t >= 0.
double laplace(const FamilySpec& spec, double t);

// ---------------------------------------------------------------------------
// Sign-conditioned decomposition A = [-X | X < 0], B = [X | X >= 0].

struct Atom {
  double at;
};
struct Exponential {
  double rate;
};
/// Normal(mean, sd) conditioned on the half line; `negated` means the law of
/// -X given X < 0, otherwise X given X >= 0.
struct HalfGaussian {
  double mean;
  double sd;
  bool negated;
};
struct NoClosedForm {};

using PartLaw = std::variant<Atom, Exponential, HalfGaussian, NoClosedForm>;

struct Split {
  /// Pr(X < 0); empty when not available in closed form (estimate with
  /// oracle::mc_negative_mass).
  std::optional<double> pNeg;
  PartLaw negPart;
  PartLaw posPart;
};

Split split(const FamilySpec& spec);

/// E[exp(-s * Y)] for Y following `part`. s may be negative (moment
/// generating side); throws DomainError where the transform diverges and
/// UnsupportedFamily for NoClosedForm.
double part_laplace(const PartLaw& part, double s);

// ---------------------------------------------------------------------------
// Moment terms E[A^n e^A] and E[B^n e^{-B}] (closed forms for TwoPoint and
// AsymLaplace only). The log variants stay finite where the terms overflow.

double log_term_neg(const FamilySpec& spec, int n);
double log_term_pos(const FamilySpec& spec, int n);
double term_neg(const FamilySpec& spec, int n);
double term_pos(const FamilySpec& spec, int n);

/// Log density of X; AsymLaplace and GaussianMix only.
double log_density(const FamilySpec& spec, double x);

// ---------------------------------------------------------------------------

/// Subweibull index marker. `q` is +inf for "q-subweibull for every q", and
/// kHeavyTail (0) for "not q-subweibull for any q > 0".
inline constexpr double kHeavyTail = 0.0;
inline constexpr double kUnboundedIndex = std::numeric_limits<double>::infinity();

struct TailDescriptor {
  double qLeft = kUnboundedIndex;
  bool qLeftStrict = true;
  double qRight = kUnboundedIndex;
  bool qRightStrict = true;
  bool eAFinite = true;
  bool e2AFinite = true;
  /// Empty when the probability has no closed form; the support may still be
  /// known to charge the half line, see negativeSupport/positiveSupport.
  std::optional<double> pNeg;
  std::optional<double> pPos;
  bool negativeSupport = false;
  bool positiveSupport = true;

  bool has_negative_mass() const noexcept { return pNeg ? *pNeg > 0.0 : negativeSupport; }
  bool has_positive_mass() const noexcept { return pPos ? *pPos > 0.0 : positiveSupport; }
};

TailDescriptor tail_descriptor(const FamilySpec& spec);

}  // namespace mixpois
