// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "mutdist/simd/kernels.hpp"

namespace mutdist::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Integer value of an integral double with |v| < 2^51, as int64 lanes.
inline __m256i to_int64(__m256d v) {
  const __m256d magic = set1(0x1.8p52);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)), _mm256_castpd_si256(magic));
}

// exp(x) for |x| <= 700: Cody-Waite reduction by ln 2, degree-12 Taylor on |r| <= ln2/2.
inline __m256d exp_pd(__m256d x) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, set1(1.4426950408889634074)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, set1(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, set1(1.90821492927058770002e-10), r);

  __m256d p = set1(1.0 / 479001600.0);
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, set1(0.5));
  p = _mm256_fmadd_pd(p, r, set1(1.0));
  p = _mm256_fmadd_pd(p, r, set1(1.0));

  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(to_int64(n), _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

// sin and cos for |x| <= 1e5: three-part Cody-Waite reduction by pi/2 and the
// fdlibm minimax kernels on |r| <= pi/4.
inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d j = _mm256_round_pd(_mm256_mul_pd(x, set1(6.36619772367581382433e-01)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(j, set1(1.57079632673412561417e+00), x);
  r = _mm256_fnmadd_pd(j, set1(6.07710050630396597660e-11), r);
  r = _mm256_fnmadd_pd(j, set1(2.02226624871116645580e-21), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = set1(1.58969099521155010221e-10);
  ps = _mm256_fmadd_pd(ps, z, set1(-2.50507602534068634195e-08));
  ps = _mm256_fmadd_pd(ps, z, set1(2.75573137070700676789e-06));
  ps = _mm256_fmadd_pd(ps, z, set1(-1.98412698298579493134e-04));
  ps = _mm256_fmadd_pd(ps, z, set1(8.33333333332248946124e-03));
  ps = _mm256_fmadd_pd(ps, z, set1(-1.66666666666666324348e-01));
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(ps, z), r, r);

  __m256d pc = set1(-1.13596475577881948265e-11);
  pc = _mm256_fmadd_pd(pc, z, set1(2.08757232129817482790e-09));
  pc = _mm256_fmadd_pd(pc, z, set1(-2.75573143513906633035e-07));
  pc = _mm256_fmadd_pd(pc, z, set1(2.48015872894767294178e-05));
  pc = _mm256_fmadd_pd(pc, z, set1(-1.38888888888741095749e-03));
  pc = _mm256_fmadd_pd(pc, z, set1(4.16666666666666019037e-02));
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(pc, z), z, _mm256_fnmadd_pd(set1(0.5), z, set1(1.0)));

  const __m256i q = _mm256_and_si256(to_int64(j), _mm256_set1_epi64x(3));
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, _mm256_set1_epi64x(1)),
                                                              _mm256_set1_epi64x(1)));
  __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
  __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);
  const __m256i sin_sign = _mm256_slli_epi64(_mm256_and_si256(q, _mm256_set1_epi64x(2)), 62);
  const __m256i cos_sign =
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(q, _mm256_set1_epi64x(1)), _mm256_set1_epi64x(2)), 62);
  s_out = _mm256_xor_pd(s, _mm256_castsi256_pd(sin_sign));
  c_out = _mm256_xor_pd(c, _mm256_castsi256_pd(cos_sign));
}

Moments3 shifted_moments(const double* x, const double* w, std::size_t n, double shift) {
  __m256d sw = _mm256_setzero_pd();
  __m256d swx = _mm256_setzero_pd();
  __m256d swx2 = _mm256_setzero_pd();
  const __m256d sh = set1(shift);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d wi = w ? _mm256_loadu_pd(w + i) : set1(1.0);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), sh);
    const __m256d wd = _mm256_mul_pd(wi, d);
    sw = _mm256_add_pd(sw, wi);
    swx = _mm256_add_pd(swx, wd);
    swx2 = _mm256_fmadd_pd(wd, d, swx2);
  }
  Moments3 m{hsum(sw), hsum(swx), hsum(swx2)};
  for (; i < n; ++i) {
    const double wi = w ? w[i] : 1.0;
    const double d = x[i] - shift;
    m.sum_w += wi;
    m.sum_wx += wi * d;
    m.sum_wx2 += wi * d * d;
  }
  return m;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  const __m256d sign = set1(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

ComplexSum oscillatory_sum(const double* x, const double* w, std::size_t n, double zeta, double decay) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const __m256d half_zeta = set1(0.5 * zeta);
  const __m256d neg_decay = set1(-decay);

  auto step = [&](__m256d xv, __m256d wv) {
    const __m256d amp = _mm256_mul_pd(wv, exp_pd(_mm256_mul_pd(neg_decay, xv)));
    __m256d s, c;
    sincos_pd(_mm256_mul_pd(half_zeta, exp_pd(xv)), s, c);
    const __m256d two_amp = _mm256_add_pd(amp, amp);
    acc_re = _mm256_fnmadd_pd(_mm256_mul_pd(two_amp, s), s, acc_re);
    acc_im = _mm256_fnmadd_pd(_mm256_mul_pd(two_amp, s), c, acc_im);
  };

  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) step(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i));
  if (i < n) {
    std::array<double, kLanes> xs{};
    std::array<double, kLanes> ws{};
    std::copy(x + i, x + n, xs.begin());
    std::copy(w + i, w + n, ws.begin());
    step(_mm256_loadu_pd(xs.data()), _mm256_loadu_pd(ws.data()));
  }
  return {hsum(acc_re), hsum(acc_im)};
}

void upwind_fluxes(const double* f, const double* v, double* flux, std::size_t n_faces) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n_faces; k += kLanes) {
    const __m256d vk = _mm256_loadu_pd(v + k);
    const __m256d out = _mm256_fmadd_pd(_mm256_max_pd(vk, zero), _mm256_loadu_pd(f + k),
                                        _mm256_mul_pd(_mm256_min_pd(vk, zero), _mm256_loadu_pd(f + k + 1)));
    _mm256_storeu_pd(flux + k, out);
  }
  for (; k < n_faces; ++k) flux[k] = std::max(v[k], 0.0) * f[k] + std::min(v[k], 0.0) * f[k + 1];
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{shifted_moments, l1_distance, oscillatory_sum, upwind_fluxes};
  return table;
}

}  // namespace mutdist::simd::detail
