#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, where the
// target supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The
// variant is chosen once at runtime from CPU features; all variants use
// Neumaier-compensated accumulation and agree with the scalar reference to a
// few ulps of the magnitude sum.

#include <cstddef>
#include <span>
#include <string_view>

namespace mixpois::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  // sum_{j<n} a[j] * b[n-1-j]
  double (*dot_reversed)(const double* a, const double* b, std::size_t n);
  // sum_{j<n} x[j]
  double (*sum)(const double* x, std::size_t n);
  // sum_{j<n} c[j] * z^j
  double (*poly_eval)(const double* c, std::size_t n, double z);
};

bool isa_available(Isa isa) noexcept;

/// Kernels of a specific ISA. Throws std::invalid_argument if the ISA is not
/// compiled in or not supported by this CPU.
const KernelTable& kernels_for(Isa isa);

/// Best ISA available on this machine.
Isa active_isa() noexcept;
const KernelTable& active_kernels() noexcept;

/// Reversed dot product: sum_j a[j] * b[b.size()-1-j]. Sizes must match.
double dot_reversed(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x) noexcept;
double poly_eval(std::span<const double> coeffs, double z) noexcept;

namespace scalar {
double dot_reversed(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double poly_eval(const double* c, std::size_t n, double z) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot_reversed(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double poly_eval(const double* c, std::size_t n, double z) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot_reversed(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double poly_eval(const double* c, std::size_t n, double z) noexcept;
}  // namespace neon
#endif

}  // namespace mixpois::simd
