#include "mixpois/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixpois/errors.hpp"
#include "mixpois/numeric.hpp"
#include "mixpois/sampling.hpp"
#include "mixpois/simd.hpp"
#include "mixpois/validity.hpp"

namespace mixpois {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void enforce_validity(const FamilySpec& spec) {
  const auto report = check_family(spec);
  if (report.passes()) return;
  std::string msg = spec.describe() + " fails " + report.rule;
  if (report.witness) {
    msg += " (" + report.witness->constraint;
    if (report.witness->n) msg += "; f(" + std::to_string(*report.witness->n) + ") = " +
                                  format_shortest(report.witness->value);
    msg += ")";
  }
  throw InvalidSpec(msg);
}

bool uses_recursion(const FamilySpec& spec) {
  return spec.kind() == FamilyKind::GaussianMix || spec.kind() == FamilyKind::ExtremeStable;
}

double signed_combination(double log_pos, double log_neg, int n) {
  if (n % 2 == 0) return std::exp(log_pos) + std::exp(log_neg);
  return exp_difference(log_pos, log_neg);
}

// Incremental p_n generator.
class CoefficientRecursion {
 public:
  explicit CoefficientRecursion(const FamilySpec& spec) : rho_(spec) { p_.push_back(laplace(spec, 1.0)); }

  const std::vector<double>& values() const noexcept { return p_; }

  double advance() {
    const std::size_t n = p_.size() - 1;
    const auto rho = rho_.prefix(n + 1);
    const std::size_t m = rho.size();
    const std::span<const double> tail(p_.data() + (n + 1 - m), m);
    const double next = simd::dot_reversed(rho, tail) / static_cast<double>(n + 1);
    p_.push_back(next);
    return next;
  }

  RhoSequence& rho() noexcept { return rho_; }

 private:
  RhoSequence rho_;
  std::vector<double> p_;
};

}  // namespace

std::string_view to_string(Truncation t) noexcept {
  return t == Truncation::MassReached ? "MassReached" : "CapReached";
}

double pmf_closed(const FamilySpec& spec, int n, Gate gate) {
  if (n < 0) throw DomainError("pmf_closed: n must be >= 0");
  if (uses_recursion(spec)) {
    throw UnsupportedFamily("pmf_closed: no closed form for " + spec.name() + "; use pgf_coeffs");
  }
  if (gate == Gate::Enforce) enforce_validity(spec);
  const double lf = log_factorial(n);
  if (const auto* s = spec.get_if<TwoPoint>()) {
    const double log_pos = std::log1p(-s->p) + n * std::log(s->b) - s->b - lf;
    const double log_neg = (s->p > 0.0 ? std::log(s->p) : kNegInf) + n * std::log(s->a) + s->a - lf;
    return signed_combination(log_pos, log_neg, n);
  }
  const auto& s = *spec.get_if<AsymLaplace>();
  if (s.lambda1 <= 1.0 && s.p > 0.0) throw DomainError("pmf_closed: f(n) is infinite for lambda1 <= 1");
  const double log_pos = std::log1p(-s.p) + std::log(s.lambda2) - (n + 1) * std::log1p(s.lambda2);
  const double log_neg =
      s.p > 0.0 ? std::log(s.p) + std::log(s.lambda1) - (n + 1) * std::log(s.lambda1 - 1.0) : kNegInf;
  return signed_combination(log_pos, log_neg, n);
}

double pgf_eval(const FamilySpec& spec, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("pgf_eval: z must lie in [0, 1]");
  return laplace(spec, 1.0 - z);
}

double pgf_log_derivative(const FamilySpec& spec, double z) {
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("pgf_log_derivative: z must lie in [0, 1)");
  if (const auto* g = spec.get_if<GaussianMix>()) return (g->mu - g->sigma2) + g->sigma2 * z;
  if (const auto* s = spec.get_if<ExtremeStable>()) {
    if (s->alpha == 1.0) return s->delta + s->sigma * kTwoOverPi * (-1.0 - std::log1p(-z));
    return s->delta +
           s->alpha * stable_secant(s->alpha) * std::pow(s->sigma, s->alpha) * std::pow(1.0 - z, s->alpha - 1.0);
  }
  throw UnsupportedFamily("pgf_log_derivative: only gaussian and extreme-stable");
}

RhoSequence::RhoSequence(const FamilySpec& spec) {
  if (const auto* g = spec.get_if<GaussianMix>()) {
    // Hermite: r(z) = a1 + 2 a2 z with a1 = mu - sigma2, a2 = sigma2 / 2
    values_ = {g->mu - g->sigma2, g->sigma2};
    support_ = 2;
    kind_ = 0;
    return;
  }
  const auto* s = spec.get_if<ExtremeStable>();
  if (!s) throw UnsupportedFamily("coefficient recursion: only gaussian and extreme-stable");
  alpha_ = s->alpha;
  if (s->alpha == 1.0) {
    kind_ = 2;
    scale_ = s->sigma * kTwoOverPi;
    values_ = {s->delta - scale_};
    if (s->sigma == 0.0) support_ = 1;
  } else {
    kind_ = 1;
    const double c = stable_secant(s->alpha) * std::pow(s->sigma, s->alpha);
    scale_ = c * s->alpha * (1.0 - s->alpha);
    values_ = {s->delta + s->alpha * c};
  }
}

void RhoSequence::extend(std::size_t len) {
  len = std::min(len, support_);
  while (values_.size() < len) {
    const std::size_t k = values_.size();
    double next;
    if (kind_ == 2) {
      next = scale_ / static_cast<double>(k);
    } else if (k == 1) {
      next = scale_;
    } else {
      // rho_k = rho_{k-1} (k - alpha) / k
      next = values_.back() * (static_cast<double>(k) - alpha_) / static_cast<double>(k);
    }
    if (next == 0.0) {
      support_ = k;
      break;
    }
    values_.push_back(next);
  }
}

double RhoSequence::operator[](std::size_t k) {
  extend(k + 1);
  return k < values_.size() ? values_[k] : 0.0;
}

std::span<const double> RhoSequence::prefix(std::size_t len) {
  extend(len);
  return {values_.data(), std::min(len, values_.size())};
}

RecursionState pgf_coeffs(const FamilySpec& spec, int nMax, Gate gate) {
  if (nMax < 0) throw DomainError("pgf_coeffs: nMax must be >= 0");
  if (!uses_recursion(spec)) {
    throw UnsupportedFamily("pgf_coeffs: " + spec.name() + " has a closed-form PMF; use pmf_closed");
  }
  if (gate == Gate::Enforce) enforce_validity(spec);
  CoefficientRecursion rec(spec);
  for (int n = 0; n < nMax; ++n) rec.advance();
  RecursionState state;
  state.p = rec.values();
  state.rho.resize(static_cast<std::size_t>(nMax) + 1);
  for (std::size_t k = 0; k < state.rho.size(); ++k) state.rho[k] = rec.rho()[k];
  return state;
}

PmfTable pmf_table(const FamilySpec& spec, double epsilon, int nCap, Gate gate) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("pmf_table: epsilon must lie in (0, 1)");
  if (nCap < 1) throw DomainError("pmf_table: nCap must be >= 1");
  if (gate == Gate::Enforce) enforce_validity(spec);

  PmfTable table{.probs = {}, .cumulative = {}, .family = spec, .epsilon = epsilon, .nCap = nCap};
  CompensatedSum mass;
  const bool recursive = uses_recursion(spec);
  std::optional<CoefficientRecursion> rec;
  if (recursive) rec.emplace(spec);

  for (int n = 0;; ++n) {
    double f;
    if (!recursive) {
      f = pmf_closed(spec, n, Gate::Skip);
    } else {
      f = n == 0 ? rec->values().front() : rec->advance();
    }
    if (f < -kNegativityTol) throw NegativeProbability(n, f);
    table.probs.push_back(f);
    mass.add(f);
    table.cumulative.push_back(mass.value());
    if (mass.value() >= 1.0 - epsilon) {
      table.reason = Truncation::MassReached;
      break;
    }
    if (n == nCap) {
      table.reason = Truncation::CapReached;
      break;
    }
  }
  table.accumulated = mass.value();
  table.tailGap = 1.0 - table.accumulated;
  return table;
}

double cdf(const PmfTable& table, long long n) {
  if (n < 0) return 0.0;
  if (n > table.last_index()) return table.accumulated;
  return table.cumulative[static_cast<std::size_t>(n)];
}

int quantile(const PmfTable& table, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0, 1)");
  if (u > table.accumulated) {
    if (table.reason == Truncation::CapReached) {
      throw InsufficientMass("quantile: u = " + format_shortest(u) + " exceeds the tabulated mass " +
                             format_shortest(table.accumulated) + " of a capped table");
    }
    const PmfTable deeper =
        pmf_table(table.family, std::min(table.epsilon, 0.5 * (1.0 - u)), table.nCap, Gate::Skip);
    if (u > deeper.accumulated) {
      throw InsufficientMass("quantile: u = " + format_shortest(u) + " exceeds the reachable mass " +
                             format_shortest(deeper.accumulated));
    }
    return quantile(deeper, u);
  }
  const auto it = std::lower_bound(table.cumulative.begin(), table.cumulative.end(), u);
  return static_cast<int>(it - table.cumulative.begin());
}

std::vector<int> sample_count(const PmfTable& table, std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<int> out(count);
  for (auto& y : out) y = quantile(table, rng.uniform_open());
  return out;
}

}  // namespace mixpois
