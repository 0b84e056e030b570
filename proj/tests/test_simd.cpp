#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mixpois/simd.hpp"

using namespace mixpois;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, bool mixed_sign) {
  std::uniform_real_distribution<double> mag(-8.0, 2.0);
  std::bernoulli_distribution flip(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(10.0, mag(gen)) * (mixed_sign && flip(gen) ? -1.0 : 1.0);
  return v;
}

std::vector<simd::Isa> available() {
  std::vector<simd::Isa> out;
  for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
    if (simd::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatch") {
  CHECK(simd::isa_available(simd::Isa::Scalar));
  CHECK(simd::isa_available(simd::active_isa()));
  MESSAGE("active kernels: " << simd::isa_name(simd::active_isa()));
  for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
    if (!simd::isa_available(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), std::invalid_argument);
  }
  const std::vector<double> a(3, 1.0);
  const std::vector<double> b(4, 1.0);
  CHECK_THROWS_AS(simd::dot_reversed(a, b), std::invalid_argument);
}

TEST_CASE("every kernel variant agrees with the extended-precision reference") {
  std::mt19937_64 gen(17);
  std::vector<std::size_t> sizes;
  for (std::size_t n = 0; n <= 70; ++n) sizes.push_back(n);
  for (std::size_t n : {127, 128, 129, 1000, 4099, 100001}) sizes.push_back(n);

  for (bool mixed : {false, true}) {
    for (std::size_t n : sizes) {
      const auto a = random_vector(gen, n, mixed);
      const auto b = random_vector(gen, n, false);
      long double dot = 0.0L;
      long double dot_abs = 0.0L;
      long double sum = 0.0L;
      long double sum_abs = 0.0L;
      long double poly = 0.0L;
      long double poly_abs = 0.0L;
      const long double z = 0.73L;
      for (std::size_t j = n; j-- > 0;) {
        poly = poly * z + a[j];
        poly_abs = poly_abs * z + std::fabs(a[j]);
      }
      for (std::size_t j = 0; j < n; ++j) {
        const long double t = static_cast<long double>(a[j]) * b[n - 1 - j];
        dot += t;
        dot_abs += std::fabs(t);
        sum += a[j];
        sum_abs += std::fabs(a[j]);
      }
      for (auto isa : available()) {
        CAPTURE(simd::isa_name(isa));
        CAPTURE(n);
        CAPTURE(mixed);
        const auto& k = simd::kernels_for(isa);
        CHECK(std::fabs(k.dot_reversed(a.data(), b.data(), n) - static_cast<double>(dot)) <=
              4.0 * kEps * static_cast<double>(dot_abs) + 1e-300);
        CHECK(std::fabs(k.sum(a.data(), n) - static_cast<double>(sum)) <=
              4.0 * kEps * static_cast<double>(sum_abs) + 1e-300);
        CHECK(std::fabs(k.poly_eval(a.data(), n, 0.73) - static_cast<double>(poly)) <=
              8.0 * kEps * static_cast<double>(poly_abs) + 1e-300);
      }
    }
  }
}

TEST_CASE("active kernels match the scalar reference closely") {
  std::mt19937_64 gen(23);
  const auto& scalar = simd::kernels_for(simd::Isa::Scalar);
  const auto& active = simd::active_kernels();
  for (std::size_t n : {1, 5, 16, 33, 1000, 65536}) {
    const auto a = random_vector(gen, n, false);
    const auto b = random_vector(gen, n, false);
    const double x = scalar.dot_reversed(a.data(), b.data(), n);
    const double y = active.dot_reversed(a.data(), b.data(), n);
    CHECK(std::fabs(x - y) <= 2.0 * kEps * std::fabs(x));
  }
}

TEST_CASE("compensation recovers cancelled low-order terms") {
  const std::vector<double> x = {1e16, 1.0, -1e16, 1.0, 1e-3, 0.0, 0.0, 0.0, 3.0};
  for (auto isa : available()) {
    CAPTURE(simd::isa_name(isa));
    CHECK(simd::kernels_for(isa).sum(x.data(), x.size()) == doctest::Approx(5.001).epsilon(1e-15));
  }
}

}  // TEST_SUITE
