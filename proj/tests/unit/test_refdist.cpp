#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "mutdist/errors.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/refdist.hpp"
#include "oracles.hpp"

using namespace mutdist;
using cplx = std::complex<double>;

namespace {

const ScaledParams kPaper{2.5, 3.0, 1e-7, 0.01, 1.0, 0.0};
const ScaledParams kLight{0.5, 3.0, 0.25, 0.01, 1.0, 0.0};

// Brute-force exponent nu N0 int_0^tau (exp(-i xi e^{-gamma z}) - 1) e^{gamma1 z} dz.
cplx brute_ld_cf(const ScaledParams& s, double tau, double xi) {
  const auto f = [&](double z) {
    return (std::exp(cplx(0, -xi * std::exp(-s.gamma * z))) - 1.0) * std::exp(s.gamma1 * z);
  };
  return std::exp(s.nu * s.n0 * oracle::simpson<cplx>(f, 0.0, tau, 400000));
}

double pmf_mean(const LatticePmf& p) {
  double m = 0;
  for (std::size_t k = 0; k < p.probs.size(); ++k) m += static_cast<double>(k) * p.probs[k];
  return m;
}

}  // namespace

TEST_CASE("ld CF: normalization and modulus") {
  for (const auto& s : {kPaper, kLight}) {
    const double tau = s.gamma == 2.5 ? 6.7 : 2.0;
    const CharFn cf = ld_characteristic_function(s, tau);
    CHECK(cf(0.0) == cplx(1.0, 0.0));
    for (double xi = -40.0; xi <= 40.0; xi += 0.37) CHECK(std::abs(cf(xi)) <= 1.0 + 1e-12);
    // Hermitian symmetry
    CHECK(std::abs(cf(1.3) - std::conj(cf(-1.3))) < 1e-14);
  }
}

TEST_CASE("ld CF matches a brute-force Simpson evaluation") {
  for (const auto& [s, tau] : {std::pair{kPaper, 6.7}, std::pair{kLight, 2.0}}) {
    const CharFn cf = ld_characteristic_function(s, tau);
    for (double xi : {1e-4, 0.01, 0.3, 1.0, 5.0, 30.0}) {
      CAPTURE(xi);
      CHECK(std::abs(cf(xi) - brute_ld_cf(s, tau, xi)) < 1e-9);
    }
  }
}

TEST_CASE("ld CF derivative at zero gives the mean") {
  for (const auto& [s, tau] : {std::pair{kPaper, 6.7}, std::pair{kLight, 2.0}}) {
    const CharFn cf = ld_characteristic_function(s, tau);
    const double mean = mean_scaled(s, tau) / ld_unscale_value(s, tau);
    const double h = 1e-8 / mean;
    const double fd = -(cf(h) - cf(-h)).imag() / (2 * h);
    CHECK(fd == doctest::Approx(mean).epsilon(1e-6).scale(0));
  }
}

TEST_CASE("ld CF special cases") {
  ScaledParams s = kLight;
  s.nu = 0.0;
  CHECK(ld_characteristic_function(s, 2.0).point_mass_at_zero);
  CHECK(ld_characteristic_function(kLight, 0.0).point_mass_at_zero);

  // gamma = 0: Poisson with mean nu N0 (e^{gamma1 tau} - 1) / gamma1
  ScaledParams flat{0.0, 1.0, 0.5, 0.01, 1.0, 0.0};
  const CharFn cf = ld_characteristic_function(flat, 1.0);
  const double lam = 0.5 * std::expm1(1.0);
  for (double xi : {0.2, 1.0, 3.0}) CHECK(std::abs(cf(xi) - std::exp(lam * (std::exp(cplx(0, -xi)) - 1.0))) < 1e-14);
  // gamma = gamma1 = 1: the exponent has a closed form through E1, checked here against Simpson.
  const ScaledParams eq{1.0, 1.0, 1.0, 0.01, 1.0, 0.0};
  const CharFn ce = ld_characteristic_function(eq, 3.0);
  for (double xi : {0.1, 2.0, 15.0}) CHECK(std::abs(ce(xi) - brute_ld_cf(eq, 3.0, xi)) < 1e-9);
}

TEST_CASE("ld CF rejects bad inputs") {
  ScaledParams s = kLight;
  s.m0 = 1.0;
  CHECK_THROWS_AS((void)ld_characteristic_function(s, 1.0), ValidationError);
  CHECK_THROWS_AS((void)ld_characteristic_function(kLight, -1.0), ValidationError);
  CHECK_THROWS_AS((void)ld_characteristic_function(kLight, 1.0, 1e-3), ValidationError);
  CHECK_THROWS_AS((void)ld_characteristic_function(kLight, 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS((void)simplified_characteristic_function(s, 1.0), ValidationError);
}

TEST_CASE("Poisson CF inverts to the Poisson pmf") {
  for (double target : {0.5, 2.0, 20.0}) {
    const ScaledParams s{0.0, 1.0, target / std::expm1(1.0), 0.01, 1.0, 0.0};
    const CharFn cf = simplified_characteristic_function(s, 1.0);
    const LatticePmf p = pmf_from_cf(cf, 256, 512);
    CAPTURE(target);
    double worst = 0;
    for (std::size_t k = 0; k <= 256; ++k) worst = std::max(worst, std::abs(p.probs[k] - oracle::poisson_pmf(k, target)));
    CHECK(worst < 1e-8);
    CHECK(std::abs(p.residual) < 1e-10);
    CHECK(p.method == "cf");
    CHECK(p.warning.empty());
  }
}

TEST_CASE("pmf_from_cf: point mass and argument checks") {
  ScaledParams s = kLight;
  s.nu = 0.0;
  const LatticePmf p = pmf_from_cf(ld_characteristic_function(s, 2.0), 8, 16);
  CHECK(p.probs[0] == 1.0);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(p.probs[k] == 0.0);
  CHECK(p.residual == 0.0);

  const CharFn cf = ld_characteristic_function(kLight, 2.0);
  CHECK_THROWS_AS((void)pmf_from_cf(cf, 8, 24), ValidationError);
  CHECK_THROWS_AS((void)pmf_from_cf(cf, 16, 16), ValidationError);
  CHECK_THROWS_AS((void)pmf_from_cf(CharFn{}, 8, 16), ValidationError);
}

TEST_CASE("reference pmf of a light-tailed law") {
  const double tau = 2.0;
  const CharFn cf = ld_characteristic_function(kLight, tau);
  const LatticePmf p = reference_pmf(cf);
  CHECK(p.residual < 1e-4);
  CHECK(p.warning.empty());
  CHECK(p.probs.size() == p.k_max + 1);
  double total = 0;
  for (double q : p.probs) {
    CHECK(q >= 0.0);
    total += q;
  }
  CHECK(total + p.residual == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pmf_mean(p) == doctest::Approx(mean_scaled(kLight, tau)).epsilon(1e-3));
}

TEST_CASE("reference pmf of the heavy-tailed configuration") {
  const CharFn cf = ld_characteristic_function(kPaper, 6.7);
  const LatticePmf p = reference_pmf(cf);
  CHECK(p.residual < 1e-4);
  for (double q : p.probs) CHECK(q >= 0.0);
  // The law is not lattice-valued, so p_k is a sinc-smoothed mass rather than
  // a bin probability. Against binned oracle draws the TV is sampling noise,
  // about 0.0097 at this size and falling like n^{-1/2}.
  const EmpiricalDistribution e = clone_oracle(Setting::LuriaDelbruck, kPaper, 6.7, 800000, 5);
  const double tv = total_variation(e, p.probs, p.residual);
  CAPTURE(tv);
  CHECK(tv < 0.015);
}

TEST_CASE("clone oracle matches the CF and the limit moments") {
  const std::size_t n = 200000;
  for (Setting st : {Setting::LuriaDelbruck, Setting::LeaCoulson, Setting::Simplified}) {
    const auto v = clone_oracle_values(st, kLight, 2.0, n, 5);
    double m = 0;
    for (double x : v) m += x;
    m /= n;
    double var = 0, m4 = 0;
    for (double x : v) {
      var += (x - m) * (x - m);
      m4 += std::pow(x - m, 4);
    }
    var /= (n - 1);
    m4 /= n;
    CAPTURE(to_string(st));
    CHECK(std::abs(m - mean_scaled(kLight, 2.0)) < 4 * std::sqrt(var / n));
    CHECK(std::abs(var - variance_scaled(st, kLight, 2.0)) < 4 * std::sqrt((m4 - var * var) / n));
  }

  const auto v = clone_oracle_values(Setting::LuriaDelbruck, kLight, 2.0, n, 6);
  const CharFn cf = ld_characteristic_function(kLight, 2.0);
  for (double zeta : {0.05, 0.3, 1.0}) {
    cplx emp;
    for (double x : v) emp += std::exp(cplx(0, -zeta * x));
    emp /= static_cast<double>(n);
    CHECK(std::abs(emp - cf.count_cf(zeta)) < 5.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("clone oracle: determinism, stream separation and rejection") {
  const auto a = clone_oracle_values(Setting::LeaCoulson, kLight, 2.0, 1000, 3, 1);
  const auto b = clone_oracle_values(Setting::LeaCoulson, kLight, 2.0, 1000, 3, 7);
  CHECK(a == b);
  const auto e = clone_oracle(Setting::LeaCoulson, kLight, 2.0, 1000, 3);
  CHECK(e.n_samples == 1000);
  CHECK(e.seed == 3);
  for (auto k : e.bins) CHECK(k >= 0);
  ScaledParams s = kLight;
  s.m0 = 1.0;
  CHECK_THROWS_AS((void)clone_oracle(Setting::LeaCoulson, s, 2.0, 10, 1), ValidationError);
  ScaledParams huge = kLight;
  huge.gamma = 40.0;
  CHECK_THROWS_AS((void)clone_oracle_values(Setting::LuriaDelbruck, huge, 2.0, 10, 1), OverflowError);
}

TEST_CASE("Lea-Coulson recursion") {
  const LatticePmf p = lc_pmf_recursion_unchecked(1.0, 200);
  CHECK(p.probs[0] == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(p.probs[1] == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-14));
  CHECK(p.method == "recursion");
  double partial = 0;
  for (double q : p.probs) {
    CHECK(q >= 0.0);
    const double next = partial + q;
    CHECK(next >= partial);
    CHECK(next <= 1.0 + 1e-12);
    partial = next;
  }
  CHECK(p.residual == doctest::Approx(1.0 - partial).epsilon(1e-12));

  const LatticePmf z = lc_pmf_recursion_unchecked(0.0, 5);
  CHECK(z.probs[0] == 1.0);
  CHECK(z.probs[3] == 0.0);
}

TEST_CASE("Lea-Coulson recursion passes its clone-oracle gate") {
  const LatticePmf p = lc_pmf_recursion(1.0, 4096);
  CHECK(p.validation_tv <= 0.01);
  RecursionGate strict;
  strict.max_tv = 1e-9;
  strict.oracle_samples = 10000;
  CHECK_THROWS_AS((void)lc_pmf_recursion(1.0, 4096, strict), NumericalError);
  CHECK_THROWS_AS((void)lc_pmf_recursion(-1.0, 10), ValidationError);
}
