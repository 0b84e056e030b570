// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "mixpois/simd.hpp"

namespace mixpois::simd::avx2 {
namespace {

// Four independent Neumaier accumulators, one per lane.
struct Neumaier4 {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();

  void add(__m256d x) noexcept {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d t = _mm256_add_pd(s, x);
    const __m256d s_larger = _mm256_cmp_pd(_mm256_andnot_pd(sign, s), _mm256_andnot_pd(sign, x), _CMP_GE_OQ);
    const __m256d big = _mm256_blendv_pd(x, s, s_larger);
    const __m256d small = _mm256_blendv_pd(s, x, s_larger);
    c = _mm256_add_pd(c, _mm256_add_pd(_mm256_sub_pd(big, t), small));
    s = t;
  }
};

// Lanes of all accumulators plus a scalar tail, combined in a fixed order.
class Reducer {
 public:
  void absorb(const Neumaier4& acc) noexcept {
    alignas(32) double s[4];
    alignas(32) double c[4];
    _mm256_store_pd(s, acc.s);
    _mm256_store_pd(c, acc.c);
    for (int k = 0; k < 4; ++k) {
      add(s[k]);
      add(c[k]);
    }
  }

  void add(double x) noexcept {
    const double t = sum_ + x;
    comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline __m256d reverse(__m256d v) noexcept { return _mm256_permute4x64_pd(v, 0x1B); }

}  // namespace

double dot_reversed(const double* a, const double* b, std::size_t n) noexcept {
  Neumaier4 acc[4];
  std::size_t j = 0;
  // b block for a[j..j+3] is b[n-j-4 .. n-j-1], reversed.
  for (; j + 16 <= n; j += 16) {
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t off = j + 4 * k;
      acc[k].add(_mm256_mul_pd(_mm256_loadu_pd(a + off), reverse(_mm256_loadu_pd(b + n - off - 4))));
    }
  }
  for (; j + 4 <= n; j += 4) {
    acc[0].add(_mm256_mul_pd(_mm256_loadu_pd(a + j), reverse(_mm256_loadu_pd(b + n - j - 4))));
  }
  Reducer r;
  for (const auto& k : acc) r.absorb(k);
  for (; j < n; ++j) r.add(a[j] * b[n - 1 - j]);
  return r.value();
}

double sum(const double* x, std::size_t n) noexcept {
  Neumaier4 acc[4];
  std::size_t j = 0;
  for (; j + 16 <= n; j += 16) {
    for (std::size_t k = 0; k < 4; ++k) acc[k].add(_mm256_loadu_pd(x + j + 4 * k));
  }
  for (; j + 4 <= n; j += 4) acc[0].add(_mm256_loadu_pd(x + j));
  Reducer r;
  for (const auto& k : acc) r.absorb(k);
  for (; j < n; ++j) r.add(x[j]);
  return r.value();
}

double poly_eval(const double* c, std::size_t n, double z) noexcept {
  Neumaier4 acc;
  const double z2 = z * z;
  __m256d powers = _mm256_set_pd(z2 * z, z2, z, 1.0);
  const __m256d step = _mm256_set1_pd(z2 * z2);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    acc.add(_mm256_mul_pd(_mm256_loadu_pd(c + j), powers));
    powers = _mm256_mul_pd(powers, step);
  }
  alignas(32) double tail_powers[4];
  _mm256_store_pd(tail_powers, powers);
  Reducer r;
  r.absorb(acc);
  for (std::size_t k = 0; j < n; ++j, ++k) r.add(c[j] * tail_powers[k]);
  return r.value();
}

}  // namespace mixpois::simd::avx2
