#include "mixpois/sampling.hpp"

#include <cmath>
#include <numbers>

#include "mixpois/errors.hpp"
#include "mixpois/numeric.hpp"

namespace mixpois {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) noexcept {
  return mix64(seed + 0x9E3779B97F4A7C15ULL * (shard + 1));
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

MixingSampler::MixingSampler(const FamilySpec& spec) : spec_(spec) {
  if (const auto* s = spec_.get_if<ExtremeStable>(); s && s->alpha != 1.0) {
    const double tan_half = std::tan(std::numbers::pi * s->alpha / 2.0);
    cms_shift_ = std::atan(tan_half) / s->alpha;
    cms_scale_ = std::pow(1.0 + tan_half * tan_half, 1.0 / (2.0 * s->alpha));
  }
}

double MixingSampler::operator()(Rng& rng) const {
  switch (spec_.kind()) {
    case FamilyKind::TwoPoint: {
      const auto& s = *spec_.get_if<TwoPoint>();
      return rng.uniform() < s.p ? -s.a : s.b;
    }
    case FamilyKind::AsymLaplace: {
      const auto& s = *spec_.get_if<AsymLaplace>();
      const bool negative = rng.uniform() < s.p;
      const double e = rng.exponential();
      return negative ? -e / s.lambda1 : e / s.lambda2;
    }
    case FamilyKind::GaussianMix: {
      const auto& s = *spec_.get_if<GaussianMix>();
      return s.mu + std::sqrt(s.sigma2) * rng.normal();
    }
    case FamilyKind::ExtremeStable: {
      const auto& s = *spec_.get_if<ExtremeStable>();
      if (s.sigma == 0.0) return s.delta;
      constexpr double kHalfPi = std::numbers::pi / 2.0;
      const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
      const double w = rng.exponential();
      if (s.alpha == 1.0) {
        const double shifted = kHalfPi + v;
        const double x = kTwoOverPi * (shifted * std::tan(v) - std::log(kHalfPi * w * std::cos(v) / shifted));
        return s.sigma * x + kTwoOverPi * s.sigma * std::log(s.sigma) + s.delta;
      }
      const double arg = s.alpha * (v + cms_shift_);
      const double x = cms_scale_ * std::sin(arg) / std::pow(std::cos(v), 1.0 / s.alpha) *
                       std::pow(std::cos(v - arg) / w, (1.0 - s.alpha) / s.alpha);
      return s.sigma * x + s.delta;
    }
  }
  throw UnsupportedFamily("sampler: unknown family");
}

std::vector<double> sample_mixing(const FamilySpec& spec, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw DomainError("sample_mixing: count must be >= 1");
  Rng rng(seed);
  MixingSampler draw(spec);
  std::vector<double> out(count);
  for (auto& x : out) x = draw(rng);
  return out;
}

}  // namespace mixpois
