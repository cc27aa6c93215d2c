#include "mutdist/poisson.hpp"

#include <cmath>
#include <string>

#include "mutdist/errors.hpp"

namespace mutdist {
namespace {

std::uint64_t poisson_inversion(RngStream& s, double lambda) {
  const double u = s.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  // The cap only matters when u sits within rounding of 1.
  while (u > cdf && k < 1000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// W. Hoermann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrs(RngStream& s, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = s.uniform() - 0.5;
    const double v = s.uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t sample_poisson(RngStream& stream, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    detail::fail_validation("lambda", "must be finite and >= 0, got " + std::to_string(lambda));
  }
  if (lambda > 0x1p52) throw OverflowError("sample_poisson: lambda " + std::to_string(lambda) + " too large");
  if (lambda == 0.0) return 0;
  if (lambda < kPoissonInversionCutoff) return poisson_inversion(stream, lambda);
  return poisson_ptrs(stream, lambda);
}

double poisson_log_pmf(std::uint64_t k, double lambda) {
  const double kd = static_cast<double>(k);
  if (lambda == 0.0) return k == 0 ? 0.0 : -INFINITY;
  return kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0);
}

}  // namespace mutdist
