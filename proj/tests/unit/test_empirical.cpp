#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mutdist/empirical.hpp"
#include "mutdist/errors.hpp"
#include "mutdist/simd/kernels.hpp"

using namespace mutdist;

TEST_CASE("bin_of rounds half up") {
  CHECK(bin_of(0.0) == 0);
  CHECK(bin_of(0.49) == 0);
  CHECK(bin_of(0.5) == 1);
  CHECK(bin_of(2.4999) == 2);
  CHECK(bin_of(-0.5) == 0);
  CHECK(bin_of(-0.51) == -1);
  CHECK_THROWS_AS((void)bin_of(1e19), OverflowError);
  CHECK_THROWS_AS((void)bin_of(std::nan("")), OverflowError);
}

TEST_CASE("summarize: small example") {
  const std::vector<double> v{0.0, 1.0, 1.2, 3.0};
  const auto e = summarize(v, 9);
  CHECK(e.seed == 9);
  CHECK(e.n_samples == 4);
  CHECK(e.bins == std::vector<std::int64_t>{0, 1, 3});
  CHECK(e.counts == std::vector<std::uint64_t>{1, 2, 1});
  CHECK(e.probability(1) == 0.5);
  CHECK(e.probability(2) == 0.0);
  CHECK(e.probability(-4) == 0.0);
  CHECK(e.mean == doctest::Approx(1.3));
  // unbiased: sum (x - 1.3)^2 / 3
  CHECK(e.variance == doctest::Approx((1.69 + 0.09 + 0.01 + 2.89) / 3));
  CHECK(e.mean_standard_error() == doctest::Approx(std::sqrt(e.variance / 4)));
  CHECK(e.dense(2) == std::vector<double>{0.25, 0.5, 0.0});
}

TEST_CASE("summarize: invariants") {
  std::mt19937_64 gen(4);
  std::geometric_distribution<int> geo(0.1);
  std::vector<double> v(5000);
  for (double& x : v) x = geo(gen);
  const auto e = summarize(v, 0);
  double total = 0;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < e.bins.size(); ++i) {
    CHECK(e.probabilities[i] >= 0.0);
    CHECK(e.probabilities[i] <= 1.0);
    if (i > 0) CHECK(e.bins[i] > e.bins[i - 1]);
    total += e.probabilities[i];
    count += e.counts[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(count == e.n_samples);
  CHECK(e.variance >= 0.0);
}

TEST_CASE("summarize: degenerate inputs") {
  const auto empty = summarize(std::vector<double>{}, 1);
  CHECK(empty.n_samples == 0);
  CHECK(empty.bins.empty());
  CHECK(empty.mean_standard_error() == 0.0);
  const auto one = summarize(std::vector<double>{5.0}, 1);
  CHECK(one.variance == 0.0);
  const auto same = summarize(std::vector<double>(100, 7.0), 1);
  CHECK(same.variance == 0.0);
  CHECK(same.mean == 7.0);
}

TEST_CASE("sample_moments is shift-stable and ISA independent") {
  std::vector<double> v;
  for (int i = 0; i < 1001; ++i) v.push_back(1e9 + (i % 7));
  const auto m = sample_moments(v);
  double mean = 0;
  for (int i = 0; i < 1001; ++i) mean += i % 7;
  mean /= 1001;
  double var = 0;
  for (int i = 0; i < 1001; ++i) var += (i % 7 - mean) * (i % 7 - mean);
  var /= 1000;
  CHECK(m.mean == doctest::Approx(1e9 + mean).epsilon(1e-15));
  CHECK(m.variance == doctest::Approx(var).epsilon(1e-9));

  const auto before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  const auto ms = sample_moments(v);
  simd::set_isa(before);
  CHECK(ms.mean == doctest::Approx(m.mean).epsilon(1e-15));
  CHECK(ms.variance == doctest::Approx(m.variance).epsilon(1e-9));
}

TEST_CASE("total_variation between histograms") {
  const auto a = summarize(std::vector<double>{0, 0, 1, 1}, 0);
  const auto b = summarize(std::vector<double>{0, 1, 1, 2}, 0);
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == doctest::Approx(0.25));
  CHECK(total_variation(b, a) == total_variation(a, b));
  const auto c = summarize(std::vector<double>{5, 6}, 0);
  CHECK(total_variation(a, c) == doctest::Approx(1.0));

  // triangle inequality
  CHECK(total_variation(a, c) <= total_variation(a, b) + total_variation(b, c) + 1e-15);
}

TEST_CASE("total_variation against a pmf with a lumped tail") {
  const auto e = summarize(std::vector<double>{0, 1, 1, 5}, 0);
  const std::vector<double> pmf{0.25, 0.5};
  CHECK(total_variation(e, pmf, 0.25) == doctest::Approx(0.0).scale(1.0));
  const std::vector<double> pmf2{0.5, 0.5};
  CHECK(total_variation(e, pmf2, 0.0) == doctest::Approx(0.25));
  const std::vector<double> exact{0.25, 0.5, 0.0, 0.0, 0.0, 0.25};
  CHECK(total_variation(e, exact, 0.0) == doctest::Approx(0.0).scale(1.0));
}
