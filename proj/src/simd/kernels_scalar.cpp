#include <algorithm>
#include <cmath>

#include "mutdist/simd/kernels.hpp"

namespace mutdist::simd::detail {
namespace {

Moments3 shifted_moments(const double* x, const double* w, std::size_t n, double shift) {
  Moments3 m;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? w[i] : 1.0;
    const double d = x[i] - shift;
    m.sum_w += wi;
    m.sum_wx += wi * d;
    m.sum_wx2 += wi * d * d;
  }
  return m;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

ComplexSum oscillatory_sum(const double* x, const double* w, std::size_t n, double zeta, double decay) {
  ComplexSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = w[i] * std::exp(-decay * x[i]);
    const double half = 0.5 * zeta * std::exp(x[i]);
    const double s = std::sin(half);
    const double c = std::cos(half);
    // cos(2h) - 1 = -2 sin^2 h keeps relative accuracy for small phases.
    acc.re += amp * (-2.0 * s * s);
    acc.im -= amp * (2.0 * s * c);
  }
  return acc;
}

void upwind_fluxes(const double* f, const double* v, double* flux, std::size_t n_faces) {
  for (std::size_t k = 0; k < n_faces; ++k) {
    flux[k] = std::max(v[k], 0.0) * f[k] + std::min(v[k], 0.0) * f[k + 1];
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{shifted_moments, l1_distance, oscillatory_sum, upwind_fluxes};
  return table;
}

}  // namespace mutdist::simd::detail
