#include "mixpois/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mixpois/errors.hpp"
#include "mixpois/numeric.hpp"
#include "mixpois/sampling.hpp"

namespace mixpois::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Welford accumulator; `merge` is Chan's pairwise combination.
struct Moments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }

  double std_error() const noexcept {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
};

// Runs `fn(x, out)` for every draw, accumulating `width` functionals per
// shard; shards are merged in index order.
template <class Fn>
std::vector<Moments> run_sharded(const FamilySpec& spec, std::size_t width, std::int64_t samples,
                                 std::uint64_t seed, McOptions options, Fn fn) {
  if (samples < kMinSamples) {
    throw DomainError("Monte Carlo needs at least " + std::to_string(kMinSamples) + " samples");
  }
  const std::int64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<std::vector<Moments>> per_shard(static_cast<std::size_t>(shards), std::vector<Moments>(width));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(shards));
  const MixingSampler draw(spec);

  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    std::vector<double> values(width);
    for (std::int64_t k = next++; k < shards; k = next++) {
      const auto idx = static_cast<std::size_t>(k);
      try {
        Rng rng(shard_seed(seed, static_cast<std::uint64_t>(k)));
        const std::int64_t count = std::min(kShardSize, samples - k * kShardSize);
        auto& acc = per_shard[idx];
        for (std::int64_t i = 0; i < count; ++i) {
          fn(draw(rng), values.data());
          for (std::size_t w = 0; w < width; ++w) acc[w].add(values[w]);
        }
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, shards));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Moments> total(width);
  for (const auto& shard : per_shard) {
    for (std::size_t w = 0; w < width; ++w) total[w].merge(shard[w]);
  }
  return total;
}

OracleEstimate to_estimate(const Moments& m, std::uint64_t seed, int n) {
  return OracleEstimate{m.mean, m.std_error(), m.count, seed, n};
}

// Largest log-magnitude whose exp is finite.
const double kMaxLog = std::log(std::numeric_limits<double>::max());

// ---------------------------------------------------------------------------
// Quadrature helpers

// Integrand on y >= 0 for one side: y^n e^{-y} dF(y) (pos) or
// y^n e^{y} dF(-y) (neg), in log form.
struct SideIntegrand {
  const FamilySpec& spec;
  int n;
  Side side;

  double operator()(double y) const {
    const double x = side == Side::Pos ? y : -y;
    const double power = n == 0 ? 0.0 : (y > 0.0 ? n * std::log(y) : kNegInf);
    return power - x + log_density(spec, x);
  }
};

struct Window {
  double mode;
  double width;
};

// The side integrands are log-concave in y, so mode and width place the mass.
Window side_window(const FamilySpec& spec, int n, Side side) {
  if (const auto* g = spec.get_if<GaussianMix>()) {
    const double shift = side == Side::Pos ? g->mu - g->sigma2 : -g->mu + g->sigma2;
    const double mode =
        n == 0 ? std::max(0.0, shift) : 0.5 * (shift + std::sqrt(shift * shift + 4.0 * n * g->sigma2));
    return {mode, std::sqrt(g->sigma2)};
  }
  if (const auto* l = spec.get_if<AsymLaplace>()) {
    const double rate = side == Side::Pos ? 1.0 + l->lambda2 : l->lambda1 - 1.0;
    if (rate <= 0.0) throw DomainError("quadrature: left integrand diverges for lambda1 <= 1");
    return {n / rate, std::sqrt(n + 1.0) / rate};
  }
  throw UnsupportedFamily("quadrature requires a closed-form density (asym-laplace, gaussian); got " +
                          spec.name());
}

double log_integrate_half_line(const SideIntegrand& logf, Window w, double tol) {
  const double peak = logf(w.mode);
  if (peak == kNegInf) return kNegInf;
  const double cutoff = std::log(tol * 1e-3);
  double lo = std::max(0.0, w.mode - 40.0 * w.width);
  double hi = w.mode + 40.0 * w.width;
  while (lo > 0.0 && logf(lo) - peak > cutoff) lo = std::max(0.0, lo - 10.0 * w.width);
  while (logf(hi) - peak > cutoff) hi += 10.0 * w.width;

  auto scaled = [&](double y) { return std::exp(logf(y) - peak); };
  double total = 0.0;
  if (w.mode > lo) total += adaptive_integrate(scaled, lo, w.mode, tol);
  total += adaptive_integrate(scaled, w.mode, hi, tol);
  return peak + std::log(total);
}

double side_probability(const FamilySpec& spec, Side side) {
  const auto d = tail_descriptor(spec);
  return side == Side::Neg ? *d.pNeg : *d.pPos;
}

}  // namespace

std::vector<OracleEstimate> mc_estimates(const FamilySpec& spec, std::span<const int> ns, std::int64_t samples,
                                         std::uint64_t seed, McOptions options) {
  std::vector<double> log_fact(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 0) throw DomainError("mc_estimate: n must be >= 0");
    log_fact[i] = log_factorial(ns[i]);
  }
  const auto moments = run_sharded(spec, ns.size(), samples, seed, options, [&](double x, double* out) {
    const double log_abs = std::log(std::fabs(x));
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const int n = ns[i];
      if (x == 0.0) {
        out[i] = n == 0 ? 1.0 : 0.0;
        continue;
      }
      const double log_mag = n * log_abs - x - log_fact[i];
      if (log_mag > kMaxLog) {
        throw OverflowError("mc_estimate: sample contribution x^n e^-x / n! overflows at x = " +
                            format_shortest(x) + ", n = " + std::to_string(n) +
                            " (left tail too heavy for a mixed Poisson law)");
      }
      const double mag = std::exp(log_mag);
      out[i] = (x < 0.0 && n % 2 == 1) ? -mag : mag;
    }
  });
  std::vector<OracleEstimate> out;
  out.reserve(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) out.push_back(to_estimate(moments[i], seed, ns[i]));
  return out;
}

OracleEstimate mc_estimate(const FamilySpec& spec, int n, std::int64_t samples, std::uint64_t seed,
                           McOptions options) {
  const int ns[] = {n};
  return mc_estimates(spec, ns, samples, seed, options).front();
}

OracleEstimate mc_laplace(const FamilySpec& spec, double t, std::int64_t samples, std::uint64_t seed,
                          McOptions options) {
  if (!(t >= 0.0)) throw DomainError("mc_laplace: t must be >= 0");
  const auto m = run_sharded(spec, 1, samples, seed, options, [&](double x, double* out) {
    if (-t * x > kMaxLog) throw OverflowError("mc_laplace: exp(-t x) overflows");
    out[0] = std::exp(-t * x);
  });
  return to_estimate(m[0], seed, -1);
}

OracleEstimate mc_negative_mass(const FamilySpec& spec, std::int64_t samples, std::uint64_t seed,
                                McOptions options) {
  const auto m =
      run_sharded(spec, 1, samples, seed, options, [](double x, double* out) { out[0] = x < 0.0 ? 1.0 : 0.0; });
  return to_estimate(m[0], seed, -1);
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  return Rule::integrate(f, a, b, 20, std::max(tol, 1e-15), &error);
}

double log_side_integral(const FamilySpec& spec, int n, Side side, double tol) {
  if (n < 0) throw DomainError("quadrature: n must be >= 0");
  if (!(tol > 0.0)) throw DomainError("quadrature: tol must be > 0");
  if (const auto* l = spec.get_if<AsymLaplace>(); l && side == Side::Neg && l->p == 0.0) return kNegInf;
  const Window w = side_window(spec, n, side);
  return log_integrate_half_line(SideIntegrand{spec, n, side}, w, tol);
}

double term_quad(const FamilySpec& spec, int n, Side side, double tol) {
  const double log_integral = log_side_integral(spec, n, side, tol);
  const double prob = side_probability(spec, side);
  if (prob == 0.0) throw DomainError("term_quad: the conditioning event has probability zero");
  return std::exp(log_integral - std::log(prob));
}

double quad_estimate(const FamilySpec& spec, int n, double tol) {
  const double log_pos = log_side_integral(spec, n, Side::Pos, tol) - log_factorial(n);
  const double log_neg = log_side_integral(spec, n, Side::Neg, tol) - log_factorial(n);
  if (n % 2 == 0) return std::exp(log_pos) + std::exp(log_neg);
  return exp_difference(log_pos, log_neg);
}

}  // namespace mixpois::oracle
