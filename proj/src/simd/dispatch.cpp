#include <stdexcept>
#include <string>

#include "mixpois/simd.hpp"

namespace mixpois::simd {
namespace {

constexpr KernelTable kScalar{&scalar::dot_reversed, &scalar::sum, &scalar::poly_eval};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2{&avx2::dot_reversed, &avx2::sum, &avx2::poly_eval};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeon{&neon::dot_reversed, &neon::sum, &neon::poly_eval};
#endif

Isa detect() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#elif defined(__aarch64__)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return active_isa() == Isa::Avx2;
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

double dot_reversed(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot_reversed: size mismatch");
  return active_kernels().dot_reversed(a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) noexcept { return active_kernels().sum(x.data(), x.size()); }

double poly_eval(std::span<const double> coeffs, double z) noexcept {
  return active_kernels().poly_eval(coeffs.data(), coeffs.size(), z);
}

}  // namespace mixpois::simd
