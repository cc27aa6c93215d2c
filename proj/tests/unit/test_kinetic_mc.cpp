#include <doctest.h>

#include <cmath>
#include <vector>

#include "mutdist/errors.hpp"
#include "mutdist/kinetic_mc.hpp"
#include "mutdist/moments.hpp"

using namespace mutdist;

namespace {

constexpr Setting kAll[] = {Setting::LuriaDelbruck, Setting::LeaCoulson, Setting::Simplified};

// Heavier growth of the normal cells than of the mutants keeps all moments finite.
const ScaledParams kLight{0.5, 3.0, 0.25, 0.1, 1.0, 0.0};

struct Stats {
  double mean, var, se_mean, se_var;
};

Stats stats(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0;
  for (double x : v) m += x;
  m /= n;
  double m2 = 0, m4 = 0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / (n - 1);
  m4 /= n;
  return {m, var, std::sqrt(var / n), std::sqrt(std::max(m4 - var * var, 0.0) / n)};
}

}  // namespace

TEST_CASE("jump_update: deterministic cases") {
  RngStream s(1, 0);
  const ModelParams no_source{1.5, 0.5, 0.0, 1.0, 0.0};
  const SampleState st{10.0, 3.0};
  CHECK(jump_update(Setting::LuriaDelbruck, st, no_source, 0.0, s).m == 15.0);
  CHECK(jump_update(Setting::LuriaDelbruck, st, no_source, 0.0, s).t == 3.0);
  CHECK(jump_update(Setting::Simplified, {4.0, 0.0}, ModelParams{1.0, 0.0, 0.0}, 7.0, s).m == 4.0);
  CHECK(jump_update(Setting::LeaCoulson, {0.0, 0.0}, no_source, 0.0, s).m == 0.0);
}

TEST_CASE("jump_update: increments have the right means") {
  const ModelParams p{1.0, 0.4, 0.2, 3.0, 0.0};
  const double t = 0.5;
  const double src = p.mu * normal_population(p, t);
  const int n = 200000;
  for (Setting st : kAll) {
    RngStream s(2, static_cast<int>(st));
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += jump_update(st, {5.0, t}, p, 6.0, s).m - 5.0;
    const double expected = src + p.beta * (st == Setting::Simplified ? 6.0 : 5.0);
    const double sd = std::sqrt(expected + (st == Setting::LuriaDelbruck ? -p.beta * 5.0 : 0.0));
    CAPTURE(to_string(st));
    CHECK(std::abs(acc / n - expected) < 4.5 * sd / std::sqrt(double(n)));
  }
}

TEST_CASE("no source and no initial mutants gives a point mass at zero") {
  ScaledParams s = kLight;
  s.nu = 0.0;
  for (Setting st : kAll) {
    const auto e = simulate_ensemble(st, s, 2.0, 1000, 7);
    CHECK(e.probability(0) == 1.0);
    CHECK(e.bins.size() == 1);
    CHECK(e.variance == 0.0);
  }
}

TEST_CASE("paths are monotone in time and mass") {
  const ModelParams p = scale_params(kLight);
  for (Setting st : kAll) {
    RngStream s(11, 0);
    std::vector<SampleState> trace;
    const double end = simulate_path(st, p, 20.0, s, &trace);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i].t > trace[i - 1].t);
      CHECK(trace[i].m >= trace[i - 1].m);
      CHECK(trace[i].t <= 20.0);
    }
    CHECK(end == trace.back().m);
  }
}

TEST_CASE("simulate_path with zero horizon returns m0") {
  ModelParams p = scale_params(kLight);
  p.m0 = 3.0;
  RngStream s(1, 1);
  CHECK(simulate_path(Setting::LeaCoulson, p, 0.0, s) == 3.0);
}

TEST_CASE("ensembles are normalized and independent of the worker count") {
  for (Setting st : kAll) {
    const auto a = simulate_values(st, kLight, 2.0, 3001, 99, 1);
    const auto b = simulate_values(st, kLight, 2.0, 3001, 99, 2);
    const auto c = simulate_values(st, kLight, 2.0, 3001, 99, 8);
    CHECK(a == b);
    CHECK(a == c);
    const auto e = simulate_ensemble(st, kLight, 2.0, 3001, 99, 3);
    double total = 0;
    for (double q : e.probabilities) total += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.n_samples == 3001);
    CHECK(e.seed == 99);
    for (auto k : e.bins) CHECK(k >= 0);
  }
  CHECK(simulate_values(Setting::LeaCoulson, kLight, 2.0, 100, 1) !=
        simulate_values(Setting::LeaCoulson, kLight, 2.0, 100, 2));
}

TEST_CASE("ensemble moments match the exact moment equations") {
  for (Setting st : kAll) {
    for (double eps : {1.0, 0.1}) {
      ScaledParams s = kLight;
      s.epsilon = eps;
      s.m0 = 2.0;
      const auto v = simulate_values(st, s, 2.0, 200000, 20240101);
      const Stats got = stats(v);
      const MomentCurve c = variance_ode_scaled(st, s, std::vector<double>{0.0, 2.0});
      CAPTURE(to_string(st));
      CAPTURE(eps);
      CHECK(std::abs(got.mean - c.mean.back()) < 4 * got.se_mean);
      CHECK(std::abs(got.var - c.variance.back()) < 4 * got.se_var);
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS((void)simulate_values(Setting::LeaCoulson, kLight, -1.0, 10, 1), ValidationError);
  ScaledParams bad = kLight;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS((void)simulate_values(Setting::LeaCoulson, bad, 1.0, 10, 1), ValidationError);
  CHECK_THROWS_AS((void)simulate_values(Setting::LeaCoulson, kLight, 1.0, 0, 1), ValidationError);
}
