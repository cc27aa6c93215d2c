#pragma once

#include <cstddef>
#include <string_view>

/// Data-parallel inner loops. Every kernel has a scalar reference
/// implementation and, on x86-64, an AVX2+FMA variant picked at runtime. The
/// variants agree to rounding (tests/unit/test_simd.cpp checks them against
/// each other); bitwise equality across ISAs is not promised.
namespace mutdist::simd {

enum class Isa { Scalar, Avx2 };

struct Moments3 {
  double sum_w = 0.0;    ///< sum of w
  double sum_wx = 0.0;   ///< sum of w (x - shift)
  double sum_wx2 = 0.0;  ///< sum of w (x - shift)^2
};

struct ComplexSum {
  double re = 0.0;
  double im = 0.0;
};

struct KernelTable {
  /// Weighted moments about `shift`. `w == nullptr` means unit weights.
  Moments3 (*shifted_moments)(const double* x, const double* w, std::size_t n, double shift);

  /// sum |a_i - b_i|
  double (*l1_distance)(const double* a, const double* b, std::size_t n);

  /// sum_j w_j exp(-decay x_j) (exp(-i zeta e^{x_j}) - 1).
  /// Requires |x_j| <= 700, decay * |x_j| <= 700 and zeta e^{x_j} <= 1e5.
  ComplexSum (*oscillatory_sum)(const double* x, const double* w, std::size_t n, double zeta,
                                double decay);

  /// Upwind face fluxes: flux[k] = max(v_k,0) f[k] + min(v_k,0) f[k+1], k < n_faces.
  void (*upwind_fluxes)(const double* f, const double* velocity, double* flux, std::size_t n_faces);
};

[[nodiscard]] bool isa_supported(Isa isa) noexcept;

/// Best supported ISA unless overridden by set_isa() or MUTDIST_SIMD=scalar|avx2.
[[nodiscard]] Isa active_isa() noexcept;

/// Forces an ISA for subsequent kernels() calls. Throws ValidationError if unsupported.
void set_isa(Isa isa);

[[nodiscard]] const KernelTable& kernels() noexcept;
[[nodiscard]] const KernelTable& kernels(Isa isa);

[[nodiscard]] std::string_view to_string(Isa isa) noexcept;

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(MUTDIST_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
}  // namespace detail

}  // namespace mutdist::simd
