#include <doctest.h>

#include <cmath>
#include <limits>

#include "mutdist/core_model.hpp"
#include "mutdist/errors.hpp"
#include "oracles.hpp"

using namespace mutdist;

namespace {

bool within_ulps(double a, double b, int ulps) {
  double x = a;
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, b);
  return x == b;
}

}  // namespace

TEST_CASE("scale_params multiplies rates by epsilon") {
  ScaledParams s{2.5, 3.0, 1e-7, 1.0, 1.0, 0.0};
  ModelParams p = scale_params(s);
  CHECK(p.beta == 2.5);
  CHECK(p.mu == 1e-7);
  CHECK(p.net_growth() == doctest::Approx(3.0).epsilon(1e-15));

  s.epsilon = 0.1;
  p = scale_params(s);
  CHECK(p.beta == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.mu == doctest::Approx(1e-8).epsilon(1e-15));
  CHECK(p.net_growth() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("unscale_params inverts scale_params") {
  ModelParams p{0.3 + 1e-8, 0.25, 1e-8, 1.0, 0.0};
  const ScaledParams s = unscale_params(p, 0.1);
  CHECK(s.gamma == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(s.nu == doctest::Approx(1e-7).epsilon(1e-14));
  CHECK(s.gamma1 == doctest::Approx(3.0).epsilon(1e-12));

  const ScaledParams one = unscale_params(p, 1.0);
  CHECK(one.gamma == p.beta);
  CHECK(one.nu == p.mu);
  CHECK(one.gamma1 == p.alpha - p.mu);
}

TEST_CASE("scale/unscale round trip to a few ulps") {
  for (double eps : {1.0, 0.5, 0.1, 0.01, 1e-3}) {
    for (double g : {0.0, 0.7, 2.5, 2.8}) {
      const ScaledParams s{g, 3.0, 1e-7, eps, 2.0, 0.5};
      const ScaledParams back = unscale_params(scale_params(s), eps);
      CHECK(within_ulps(back.gamma, s.gamma, 4));
      CHECK(within_ulps(back.nu, s.nu, 4));
      CHECK(within_ulps(back.gamma1, s.gamma1, 4));
      CHECK(back.n0 == s.n0);
      CHECK(back.m0 == s.m0);

      const ModelParams p = scale_params(s);
      const ModelParams again = scale_params(unscale_params(p, eps));
      CHECK(within_ulps(again.beta, p.beta, 4));
      CHECK(within_ulps(again.mu, p.mu, 4));
      CHECK(within_ulps(again.alpha, p.alpha, 4));
    }
  }
}

TEST_CASE("epsilon must be positive") {
  ScaledParams s{2.5, 3.0, 1e-7, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS((void)scale_params(s), ValidationError);
  s.epsilon = -0.1;
  CHECK_THROWS_AS((void)scale_params(s), ValidationError);
  CHECK_THROWS_AS((void)unscale_params(ModelParams{1.0, 0.5, 0.1}, 0.0), ValidationError);
  CHECK_THROWS_AS((void)unscale_params(ModelParams{1.0, 0.5, 0.1}, -1.0), ValidationError);
}

TEST_CASE("parameter invariants are enforced") {
  CHECK_THROWS_AS(validate(ModelParams{0.0, 1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(ModelParams{1.0, -1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 0.1, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(ScaledParams{1.0, 0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(ScaledParams{1.0, 1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(validate(ScaledParams{1.0, 1.0, 1.0, 1.5}), ValidationError);
  CHECK_NOTHROW(validate(ScaledParams{0.0, 1.0, 0.0, 1.0}));
}

TEST_CASE("normal_population") {
  const ModelParams p{3.0 + 1e-7, 2.5, 1e-7, 1.0, 0.0};
  CHECK(normal_population(p, 0.0) == 1.0);

  const double rk4 = oracle::rk4<1>([&](double, auto y) { return std::array<double, 1>{p.net_growth() * y[0]}; },
                                    0.0, 1.0, {1.0}, 20000)[0];
  CHECK(rk4 == doctest::Approx(20.0855369231876).epsilon(1e-12));
  CHECK(normal_population(p, 1.0) == doctest::Approx(rk4).epsilon(1e-10));

  ModelParams flat{0.5, 0.1, 0.5, 2.0, 0.0};
  CHECK(normal_population(flat, 7.0) == 2.0);

  CHECK_THROWS_AS((void)normal_population(p, -1.0), ValidationError);
  CHECK_THROWS_AS((void)normal_population(p, 1e4), OverflowError);
}

TEST_CASE("normal_population is an increasing semigroup") {
  const ModelParams p{0.8, 0.3, 0.05, 1.7, 0.0};
  double prev = 0.0;
  for (double t = 0.0; t < 40.0; t += 0.37) {
    const double n = normal_population(p, t);
    CHECK(n > prev);
    prev = n;
  }
  for (double t1 : {0.1, 2.0, 13.0}) {
    for (double t2 : {0.0, 0.5, 7.5}) {
      const double lhs = normal_population(p, t1 + t2) * p.n0;
      const double rhs = normal_population(p, t1) * normal_population(p, t2);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("scaled normal population cancels epsilon") {
  for (double eps : {1.0, 0.1, 0.01}) {
    const ScaledParams s{2.5, 3.0, 1e-7, eps, 1.3, 0.0};
    for (double tau : {0.0, 1.0, 6.7}) {
      const double via_t = normal_population(scale_params(s), tau / eps);
      CHECK(via_t == doctest::Approx(1.3 * std::exp(3.0 * tau)).epsilon(1e-12));
      CHECK(normal_population_scaled(s, tau) == doctest::Approx(via_t).epsilon(1e-12));
    }
  }
}
