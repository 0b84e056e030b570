#include "mixpois/family.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mixpois/errors.hpp"
#include "mixpois/numeric.hpp"

namespace mixpois {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

bool finite(double x) { return std::isfinite(x); }

void require_probability(double p) {
  require(finite(p) && p >= 0.0 && p < 1.0, "p must lie in [0, 1), got " + format_shortest(p));
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_neg_inf(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

FamilySpec::FamilySpec(Params params) : params_(params) {
  std::visit(Overloaded{
                 [](const TwoPoint& s) {
                   require(finite(s.a) && s.a > 0.0, "two-point: a must be positive");
                   require(finite(s.b) && s.b > 0.0, "two-point: b must be positive");
                   require_probability(s.p);
                 },
                 [](const AsymLaplace& s) {
                   require(finite(s.lambda1) && s.lambda1 > 0.0, "asym-laplace: lambda1 must be positive");
                   require(finite(s.lambda2) && s.lambda2 > 0.0, "asym-laplace: lambda2 must be positive");
                   require_probability(s.p);
                 },
                 [](const GaussianMix& s) {
                   require(finite(s.mu), "gaussian: mu must be finite");
                   require(finite(s.sigma2) && s.sigma2 > 0.0, "gaussian: sigma2 must be positive");
                 },
                 [](ExtremeStable& s) {
                   require(finite(s.alpha) && s.alpha > 0.0 && s.alpha <= 2.0,
                           "extreme-stable: alpha must lie in (0, 2]");
                   require(finite(s.delta), "extreme-stable: delta must be finite");
                   if (is_alpha_one(s.alpha)) {
                     s.alpha = 1.0;
                     require(finite(s.sigma) && s.sigma >= 0.0, "extreme-stable: sigma must be >= 0 when alpha = 1");
                   } else {
                     require(finite(s.sigma) && s.sigma > 0.0, "extreme-stable: sigma must be > 0 when alpha != 1");
                   }
                 },
             },
             params_);
}

std::optional<double> FamilySpec::odds() const noexcept {
  return std::visit(Overloaded{
                        [](const TwoPoint& s) -> std::optional<double> { return s.p / (1.0 - s.p); },
                        [](const AsymLaplace& s) -> std::optional<double> { return s.p / (1.0 - s.p); },
                        [](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    params_);
}

std::string FamilySpec::name() const {
  switch (kind()) {
    case FamilyKind::TwoPoint: return "two-point";
    case FamilyKind::AsymLaplace: return "asym-laplace";
    case FamilyKind::GaussianMix: return "gaussian";
    case FamilyKind::ExtremeStable: return "extreme-stable";
  }
  return "unknown";
}

std::string FamilySpec::describe() const {
  std::ostringstream os;
  auto f = [](double x) { return format_shortest(x); };
  os << name() << '{';
  std::visit(Overloaded{
                 [&](const TwoPoint& s) { os << "a=" << f(s.a) << ", b=" << f(s.b) << ", p=" << f(s.p); },
                 [&](const AsymLaplace& s) {
                   os << "lambda1=" << f(s.lambda1) << ", lambda2=" << f(s.lambda2) << ", p=" << f(s.p);
                 },
                 [&](const GaussianMix& s) { os << "mu=" << f(s.mu) << ", sigma2=" << f(s.sigma2); },
                 [&](const ExtremeStable& s) {
                   os << "alpha=" << f(s.alpha) << ", sigma=" << f(s.sigma) << ", delta=" << f(s.delta);
                 },
             },
             params_);
  os << '}';
  return os.str();
}

bool is_alpha_one(double alpha) noexcept { return std::fabs(alpha - 1.0) <= kAlphaOneSnap; }

double stable_secant(double alpha) {
  if (is_alpha_one(alpha)) throw DomainError("sec(pi*alpha/2) has a pole at alpha = 1");
  return 1.0 / std::cos(std::numbers::pi * alpha / 2.0);
}

double laplace(const FamilySpec& spec, double t) {
  if (!(t >= 0.0)) throw DomainError("laplace: t must be >= 0");
  if (t == 0.0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const TwoPoint& s) { return (1.0 - s.p) * std::exp(-t * s.b) + s.p * std::exp(t * s.a); },
          [&](const AsymLaplace& s) {
            if (t >= s.lambda1) throw DomainError("laplace: asym-laplace transform diverges for t >= lambda1");
            return (1.0 - s.p) * s.lambda2 / (s.lambda2 + t) + s.p * s.lambda1 / (s.lambda1 - t);
          },
          [&](const GaussianMix& s) { return std::exp(-t * s.mu + 0.5 * t * t * s.sigma2); },
          [&](const ExtremeStable& s) {
            if (s.alpha == 1.0) return std::exp(-t * s.delta + s.sigma * kTwoOverPi * t * std::log(t));
            return std::exp(-t * s.delta - stable_secant(s.alpha) * std::pow(s.sigma, s.alpha) * std::pow(t, s.alpha));
          },
      },
      spec.params());
}

Split split(const FamilySpec& spec) {
  return std::visit(
      Overloaded{
          [](const TwoPoint& s) { return Split{s.p, Atom{s.a}, Atom{s.b}}; },
          [](const AsymLaplace& s) { return Split{s.p, Exponential{s.lambda1}, Exponential{s.lambda2}}; },
          [](const GaussianMix& s) {
            const double sd = std::sqrt(s.sigma2);
            return Split{normal_cdf(-s.mu / sd), HalfGaussian{-s.mu, sd, true}, HalfGaussian{s.mu, sd, false}};
          },
          [](const ExtremeStable& s) {
            if (s.alpha == 2.0) {
              // N(delta, 2 sigma^2)
              const double sd = std::numbers::sqrt2 * s.sigma;
              return Split{normal_cdf(-s.delta / sd), HalfGaussian{-s.delta, sd, true},
                           HalfGaussian{s.delta, sd, false}};
            }
            if (s.sigma == 0.0) {
              // alpha = 1, point mass at delta
              return Split{s.delta < 0.0 ? 1.0 : 0.0, Atom{-s.delta}, Atom{s.delta}};
            }
            if (s.alpha < 1.0 && s.delta >= 0.0) {
              // support [delta, inf)
              return Split{0.0, NoClosedForm{}, NoClosedForm{}};
            }
            return Split{std::nullopt, NoClosedForm{}, NoClosedForm{}};
          },
      },
      spec.params());
}

double part_laplace(const PartLaw& part, double s) {
  return std::visit(Overloaded{
                        [&](const Atom& a) { return std::exp(-s * a.at); },
                        [&](const Exponential& e) {
                          if (!(s > -e.rate)) throw DomainError("part_laplace: exponential MGF diverges");
                          return e.rate / (e.rate + s);
                        },
                        [&](const HalfGaussian& g) {
                          // Y ~ N(m, v) | Y >= 0 with m = g.mean:
                          // E[e^{-sY}] = e^{-sm + s^2 v/2} Phi((m - s v)/sd) / Phi(m/sd)
                          const double v = g.sd * g.sd;
                          const double log_num = std::log(normal_cdf((g.mean - s * v) / g.sd));
                          const double log_den = std::log(normal_cdf(g.mean / g.sd));
                          return std::exp(-s * g.mean + 0.5 * s * s * v + log_num - log_den);
                        },
                        [](const NoClosedForm&) -> double {
                          throw UnsupportedFamily("part_laplace: no closed form for this component");
                        },
                    },
                    part);
}

double log_term_neg(const FamilySpec& spec, int n) {
  if (n < 0) throw DomainError("term_neg: n must be >= 0");
  return std::visit(Overloaded{
                        [&](const TwoPoint& s) { return n * std::log(s.a) + s.a; },
                        [&](const AsymLaplace& s) {
                          if (s.lambda1 <= 1.0) {
                            throw DomainError("term_neg: E[A^n e^A] is infinite for lambda1 <= 1");
                          }
                          return std::log(s.lambda1) + log_factorial(n) - (n + 1) * std::log(s.lambda1 - 1.0);
                        },
                        [](const auto&) -> double {
                          throw UnsupportedFamily("term_neg: no closed form for this family; use oracle::term_quad");
                        },
                    },
                    spec.params());
}

double log_term_pos(const FamilySpec& spec, int n) {
  if (n < 0) throw DomainError("term_pos: n must be >= 0");
  return std::visit(Overloaded{
                        [&](const TwoPoint& s) { return n * std::log(s.b) - s.b; },
                        [&](const AsymLaplace& s) {
                          return std::log(s.lambda2) + log_factorial(n) - (n + 1) * std::log(s.lambda2 + 1.0);
                        },
                        [](const auto&) -> double {
                          throw UnsupportedFamily("term_pos: no closed form for this family; use oracle::term_quad");
                        },
                    },
                    spec.params());
}

double term_neg(const FamilySpec& spec, int n) { return std::exp(log_term_neg(spec, n)); }
double term_pos(const FamilySpec& spec, int n) { return std::exp(log_term_pos(spec, n)); }

double log_density(const FamilySpec& spec, double x) {
  return std::visit(Overloaded{
                        [&](const AsymLaplace& s) {
                          if (x < 0.0) return log_or_neg_inf(s.p) + std::log(s.lambda1) + s.lambda1 * x;
                          return std::log1p(-s.p) + std::log(s.lambda2) - s.lambda2 * x;
                        },
                        [&](const GaussianMix& s) {
                          const double d = x - s.mu;
                          return -0.5 * d * d / s.sigma2 - 0.5 * std::log(2.0 * std::numbers::pi * s.sigma2);
                        },
                        [](const auto&) -> double {
                          throw UnsupportedFamily("log_density: family has no closed-form density");
                        },
                    },
                    spec.params());
}

TailDescriptor tail_descriptor(const FamilySpec& spec) {
  TailDescriptor d;
  std::visit(Overloaded{
                 [&](const TwoPoint& s) {
                   d.pNeg = s.p;
                   d.pPos = 1.0 - s.p;
                   d.negativeSupport = s.p > 0.0;
                 },
                 [&](const AsymLaplace& s) {
                   d.qLeft = d.qRight = 1.0;
                   d.qLeftStrict = d.qRightStrict = false;
                   d.eAFinite = s.lambda1 > 1.0;
                   d.e2AFinite = s.lambda1 > 2.0;
                   d.pNeg = s.p;
                   d.pPos = 1.0 - s.p;
                   d.negativeSupport = s.p > 0.0;
                   if (s.p == 0.0) {
                     d.qLeft = kUnboundedIndex;
                     d.qLeftStrict = true;
                     d.eAFinite = d.e2AFinite = true;
                   }
                 },
                 [&](const GaussianMix& s) {
                   d.qLeft = d.qRight = 2.0;
                   d.qLeftStrict = d.qRightStrict = true;
                   d.pNeg = normal_cdf(-s.mu / std::sqrt(s.sigma2));
                   d.pPos = 1.0 - *d.pNeg;
                   d.negativeSupport = true;
                 },
                 [&](const ExtremeStable& s) {
                   const Split parts = split(spec);
                   d.pNeg = parts.pNeg;
                   if (parts.pNeg) d.pPos = 1.0 - *parts.pNeg;
                   if (s.sigma == 0.0) {
                     // point mass
                     d.negativeSupport = s.delta < 0.0;
                     d.positiveSupport = s.delta > 0.0;
                     return;
                   }
                   d.positiveSupport = true;
                   if (s.alpha == 2.0) {
                     d.qLeft = d.qRight = 2.0;
                     d.qLeftStrict = d.qRightStrict = true;
                     d.negativeSupport = true;
                     return;
                   }
                   d.qRight = kHeavyTail;
                   d.qRightStrict = false;
                   if (s.alpha < 1.0) {
                     // support [delta, inf): A is bounded whenever it exists
                     d.negativeSupport = s.delta < 0.0;
                     d.qLeft = kUnboundedIndex;
                   } else if (s.alpha == 1.0) {
                     d.negativeSupport = true;
                     d.qLeft = kUnboundedIndex;
                   } else {
                     d.negativeSupport = true;
                     d.qLeft = s.alpha / (s.alpha - 1.0);
                   }
                   d.qLeftStrict = true;
                 },
             },
             spec.params());
  if (d.pNeg && *d.pNeg == 0.0) {
    d.qLeft = kUnboundedIndex;
    d.qLeftStrict = true;
  }
  return d;
}

}  // namespace mixpois
