#include "mixpois/numeric.hpp"

#include <limits>

#include "mixpois/errors.hpp"

namespace mixpois {

NegativeProbability::NegativeProbability(int n, double value)
    : std::runtime_error("negative probability f(" + std::to_string(n) + ") = " + std::to_string(value) +
                         "; the mixing law does not generate a valid PMF"),
      index_(n),
      value_(value) {}

double log_factorial(int n) noexcept {
  if (n < 2) return 0.0;
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(static_cast<double>(n) + 1.0, &sign);
#else
  return std::lgamma(static_cast<double>(n) + 1.0);
#endif
}

double exp_difference(double log_a, double log_b) noexcept {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (log_a == kNegInf && log_b == kNegInf) return 0.0;
  if (log_a >= log_b) return -std::exp(log_a) * std::expm1(log_b - log_a);
  return std::exp(log_b) * std::expm1(log_a - log_b);
}

}  // namespace mixpois

#include <charconv>
#include <system_error>

namespace mixpois {

std::string format_shortest(double x, bool scientific) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto fmt = scientific ? std::chars_format::scientific : std::chars_format::general;
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x, fmt);
  std::string out(buf, end);
  // to_chars pads exponents to two digits ("e-01"); drop the padding.
  const auto e = out.find('e');
  if (e != std::string::npos) {
    std::size_t digits = e + 1;
    if (digits < out.size() && (out[digits] == '-' || out[digits] == '+')) {
      if (out[digits] == '+') {
        out.erase(digits, 1);
      } else {
        ++digits;
      }
    }
    while (digits + 1 < out.size() && out[digits] == '0') out.erase(digits, 1);
  }
  return out;
}

}  // namespace mixpois
