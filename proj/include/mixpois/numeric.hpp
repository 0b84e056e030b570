#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace mixpois {

inline constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

/// Running Neumaier-compensated sum. Order-dependent but exact to a couple of
/// ulps for sums of same-signed terms.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(n!) via a reentrant lgamma.
double log_factorial(int n) noexcept;

/// Standard normal CDF.
inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Signed a - b given log|a| and log|b| with a, b >= 0, evaluated as
/// exp(la) * (1 - exp(lb - la)) so the subtraction happens once.
double exp_difference(double log_a, double log_b) noexcept;

/// Shortest round-trip decimal form (at most 17 significant digits). With
/// `scientific`, always uses d.ddde[-]x notation with an unpadded exponent.
/// Non-finite values print as "nan", "inf", "-inf".
std::string format_shortest(double x, bool scientific = false);

}  // namespace mixpois
