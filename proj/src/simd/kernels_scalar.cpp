#include <cmath>

#include "mixpois/simd.hpp"

namespace mixpois::simd::scalar {
namespace {

// Neumaier: `comp` collects the rounding error of every addition.
struct Neumaier {
  double s = 0.0;
  double comp = 0.0;

  void add(double x) noexcept {
    const double t = s + x;
    comp += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }

  double value() const noexcept { return s + comp; }
};

}  // namespace

double dot_reversed(const double* a, const double* b, std::size_t n) noexcept {
  Neumaier acc;
  for (std::size_t j = 0; j < n; ++j) acc.add(a[j] * b[n - 1 - j]);
  return acc.value();
}

double sum(const double* x, std::size_t n) noexcept {
  Neumaier acc;
  for (std::size_t j = 0; j < n; ++j) acc.add(x[j]);
  return acc.value();
}

double poly_eval(const double* c, std::size_t n, double z) noexcept {
  Neumaier acc;
  double power = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc.add(c[j] * power);
    power *= z;
  }
  return acc.value();
}

}  // namespace mixpois::simd::scalar
