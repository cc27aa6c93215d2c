#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mutdist/errors.hpp"
#include "mutdist/simd/kernels.hpp"

using namespace mutdist;
using simd::Isa;

namespace {

std::vector<double> random_vec(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

// Relative agreement with an absolute floor for sums that cancel.
bool close(double a, double b, double rel, double floor) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b)}) + floor;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  CHECK(simd::isa_supported(Isa::Scalar));
  CHECK(simd::to_string(Isa::Scalar) == "scalar");
  CHECK(simd::to_string(Isa::Avx2) == "avx2");
  CHECK(simd::kernels(Isa::Scalar).l1_distance != nullptr);
}

TEST_CASE("set_isa switches the active table") {
  const Isa before = simd::active_isa();
  simd::set_isa(Isa::Scalar);
  CHECK(simd::active_isa() == Isa::Scalar);
  CHECK(&simd::kernels() == &simd::kernels(Isa::Scalar));
  if (simd::isa_supported(Isa::Avx2)) {
    simd::set_isa(Isa::Avx2);
    CHECK(simd::active_isa() == Isa::Avx2);
    CHECK(&simd::kernels() == &simd::kernels(Isa::Avx2));
  } else {
    CHECK_THROWS_AS(simd::set_isa(Isa::Avx2), ValidationError);
    CHECK_THROWS_AS((void)simd::kernels(Isa::Avx2), ValidationError);
  }
  simd::set_isa(before);
}

TEST_CASE("scalar kernel reference values") {
  const auto& k = simd::kernels(Isa::Scalar);
  const double x[] = {1.0, 2.0, 4.0};
  const double w[] = {0.5, 0.25, 0.25};
  const auto m = k.shifted_moments(x, w, 3, 2.0);
  CHECK(m.sum_w == 1.0);
  CHECK(m.sum_wx == doctest::Approx(0.0));
  CHECK(m.sum_wx2 == doctest::Approx(1.5));
  const auto mu = k.shifted_moments(x, nullptr, 3, 0.0);
  CHECK(mu.sum_w == 3.0);
  CHECK(mu.sum_wx == 7.0);
  CHECK(mu.sum_wx2 == 21.0);

  const double a[] = {1.0, -2.0, 3.0};
  const double b[] = {0.0, 2.0, 3.5};
  CHECK(k.l1_distance(a, b, 3) == 5.5);

  // One node: w e^{-d x} (e^{-i z e^x} - 1)
  const double xn[] = {0.3};
  const double wn[] = {2.0};
  const auto s = k.oscillatory_sum(xn, wn, 1, 1.7, 0.8);
  const double amp = 2.0 * std::exp(-0.8 * 0.3);
  const double ph = 1.7 * std::exp(0.3);
  CHECK(s.re == doctest::Approx(amp * (std::cos(ph) - 1.0)).epsilon(1e-14));
  CHECK(s.im == doctest::Approx(-amp * std::sin(ph)).epsilon(1e-14));

  const double f[] = {1.0, 2.0, 3.0};
  const double v[] = {0.5, -0.25};
  double flux[2];
  k.upwind_fluxes(f, v, flux, 2);
  CHECK(flux[0] == 0.5);
  CHECK(flux[1] == -0.75);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!simd::isa_supported(Isa::Avx2)) {
    MESSAGE("AVX2 not supported on this CPU; equivalence test skipped");
    return;
  }
  const auto& s = simd::kernels(Isa::Scalar);
  const auto& v = simd::kernels(Isa::Avx2);

  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u, 4099u}) {
    CAPTURE(n);
    const auto x = random_vec(n, -3.0, 50.0, 11 + n);
    const auto w = random_vec(n, 0.0, 1.0, 23 + n);
    const auto y = random_vec(n, -3.0, 50.0, 37 + n);

    for (const double* wp : {w.data(), static_cast<const double*>(nullptr)}) {
      const auto ms = s.shifted_moments(x.data(), wp, n, 7.5);
      const auto mv = v.shifted_moments(x.data(), wp, n, 7.5);
      CHECK(close(ms.sum_w, mv.sum_w, 1e-12, 0.0));
      CHECK(close(ms.sum_wx, mv.sum_wx, 1e-12, 1e-12 * n * 50));
      CHECK(close(ms.sum_wx2, mv.sum_wx2, 1e-12, 0.0));
    }

    CHECK(close(s.l1_distance(x.data(), y.data(), n), v.l1_distance(x.data(), y.data(), n), 1e-12, 0.0));

    std::vector<double> fs(n + 1), fv(n + 1);
    const auto f = random_vec(n + 1, 0.0, 1.0, 41 + n);
    const auto vel = random_vec(n, -1.0, 1.0, 43 + n);
    if (n > 0) {
      s.upwind_fluxes(f.data(), vel.data(), fs.data(), n);
      v.upwind_fluxes(f.data(), vel.data(), fv.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(fs[i], fv[i], 1e-15, 1e-300));
    }
  }
}

TEST_CASE("avx2 oscillatory_sum agrees with the scalar reference across phases") {
  if (!simd::isa_supported(Isa::Avx2)) return;
  const auto& s = simd::kernels(Isa::Scalar);
  const auto& v = simd::kernels(Isa::Avx2);
  for (double zeta : {1e-12, 1e-6, 0.01, 1.0, 3.14159, 100.0}) {
    for (double decay : {0.0, 0.5, 1.2, 6.0}) {
      const std::size_t n = 1003;
      // Keep zeta e^x <= 1e5 as the kernel contract requires.
      const double hi = std::min(20.0, std::log(1e5 / zeta));
      const auto x = random_vec(n, -20.0, hi, 5);
      const auto w = random_vec(n, 0.0, 1.0, 6);
      const auto a = s.oscillatory_sum(x.data(), w.data(), n, zeta, decay);
      const auto b = v.oscillatory_sum(x.data(), w.data(), n, zeta, decay);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += w[i] * std::exp(-decay * x[i]) * std::min(2.0, zeta * std::exp(x[i]));
      CAPTURE(zeta);
      CAPTURE(decay);
      CHECK(std::abs(a.re - b.re) <= 1e-13 * mag + 1e-300);
      CHECK(std::abs(a.im - b.im) <= 1e-13 * mag + 1e-300);
    }
  }
}

TEST_CASE("avx2 oscillatory_sum handles the partial last vector") {
  if (!simd::isa_supported(Isa::Avx2)) return;
  const auto& s = simd::kernels(Isa::Scalar);
  const auto& v = simd::kernels(Isa::Avx2);
  for (std::size_t n = 1; n <= 9; ++n) {
    const auto x = random_vec(n, -2.0, 2.0, 90 + n);
    const auto w = random_vec(n, 0.0, 1.0, 91 + n);
    const auto a = s.oscillatory_sum(x.data(), w.data(), n, 2.0, 1.0);
    const auto b = v.oscillatory_sum(x.data(), w.data(), n, 2.0, 1.0);
    CHECK(a.re == doctest::Approx(b.re).epsilon(1e-13));
    CHECK(a.im == doctest::Approx(b.im).epsilon(1e-13));
  }
}
