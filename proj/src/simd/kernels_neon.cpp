#include <arm_neon.h>

#include <cmath>

#include "mixpois/simd.hpp"

namespace mixpois::simd::neon {
namespace {

struct Neumaier2 {
  float64x2_t s = vdupq_n_f64(0.0);
  float64x2_t c = vdupq_n_f64(0.0);

  void add(float64x2_t x) noexcept {
    const float64x2_t t = vaddq_f64(s, x);
    const uint64x2_t s_larger = vcgeq_f64(vabsq_f64(s), vabsq_f64(x));
    const float64x2_t big = vbslq_f64(s_larger, s, x);
    const float64x2_t small = vbslq_f64(s_larger, x, s);
    c = vaddq_f64(c, vaddq_f64(vsubq_f64(big, t), small));
    s = t;
  }
};

class Reducer {
 public:
  void absorb(const Neumaier2& acc) noexcept {
    add(vgetq_lane_f64(acc.s, 0));
    add(vgetq_lane_f64(acc.c, 0));
    add(vgetq_lane_f64(acc.s, 1));
    add(vgetq_lane_f64(acc.c, 1));
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

inline float64x2_t reverse(float64x2_t v) noexcept { return vextq_f64(v, v, 1); }

}  // namespace

double dot_reversed(const double* a, const double* b, std::size_t n) noexcept {
  Neumaier2 acc[4];
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t off = j + 2 * k;
      acc[k].add(vmulq_f64(vld1q_f64(a + off), reverse(vld1q_f64(b + n - off - 2))));
    }
  }
  for (; j + 2 <= n; j += 2) {
    acc[0].add(vmulq_f64(vld1q_f64(a + j), reverse(vld1q_f64(b + n - j - 2))));
  }
  Reducer r;
  for (const auto& k : acc) r.absorb(k);
  for (; j < n; ++j) r.add(a[j] * b[n - 1 - j]);
  return r.value();
}

double sum(const double* x, std::size_t n) noexcept {
  Neumaier2 acc[4];
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (std::size_t k = 0; k < 4; ++k) acc[k].add(vld1q_f64(x + j + 2 * k));
  }
  for (; j + 2 <= n; j += 2) acc[0].add(vld1q_f64(x + j));
  Reducer r;
  for (const auto& k : acc) r.absorb(k);
  for (; j < n; ++j) r.add(x[j]);
  return r.value();
}

double poly_eval(const double* c, std::size_t n, double z) noexcept {
  Neumaier2 acc;
  const double init[2] = {1.0, z};
  float64x2_t powers = vld1q_f64(init);
  const float64x2_t step = vdupq_n_f64(z * z);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    acc.add(vmulq_f64(vld1q_f64(c + j), powers));
    powers = vmulq_f64(powers, step);
  }
  Reducer r;
  r.absorb(acc);
  if (j < n) r.add(c[j] * vgetq_lane_f64(powers, 0));
  return r.value();
}

}  // namespace mixpois::simd::neon
