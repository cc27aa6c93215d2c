#include "mutdist/core_model.hpp"

#include <cmath>
#include <string>

#include "mutdist/errors.hpp"

namespace mutdist {

using detail::require;

void validate(const ModelParams& p) {
  require(std::isfinite(p.alpha) && p.alpha > 0.0, "alpha", "must be > 0");
  require(std::isfinite(p.beta) && p.beta >= 0.0, "beta", "must be >= 0");
  require(std::isfinite(p.mu) && p.mu >= 0.0, "mu", "must be >= 0");
  require(p.mu < p.alpha, "mu", "must be < alpha");
  require(std::isfinite(p.n0) && p.n0 > 0.0, "n0", "must be > 0");
  require(std::isfinite(p.m0) && p.m0 >= 0.0, "m0", "must be >= 0");
}

void validate(const ScaledParams& s) {
  require(std::isfinite(s.gamma) && s.gamma >= 0.0, "gamma", "must be >= 0");
  require(std::isfinite(s.gamma1) && s.gamma1 > 0.0, "gamma1", "must be > 0");
  require(std::isfinite(s.nu) && s.nu >= 0.0, "nu", "must be >= 0");
  require(std::isfinite(s.epsilon) && s.epsilon > 0.0, "eps", "must be > 0");
  require(s.epsilon <= 1.0, "eps", "must be <= 1");
  require(std::isfinite(s.n0) && s.n0 > 0.0, "n0", "must be > 0");
  require(std::isfinite(s.m0) && s.m0 >= 0.0, "m0", "must be >= 0");
}

ModelParams scale_params(const ScaledParams& s) {
  validate(s);
  ModelParams p;
  p.beta = s.epsilon * s.gamma;
  p.mu = s.epsilon * s.nu;
  p.alpha = s.epsilon * s.gamma1 + p.mu;
  p.n0 = s.n0;
  p.m0 = s.m0;
  return p;
}

ScaledParams unscale_params(const ModelParams& p, double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0, "eps", "must be > 0");
  validate(p);
  ScaledParams s;
  s.epsilon = epsilon;
  s.gamma = p.beta / epsilon;
  s.nu = p.mu / epsilon;
  s.gamma1 = p.net_growth() / epsilon;
  s.n0 = p.n0;
  s.m0 = p.m0;
  return s;
}

double checked_exp(double x, const char* what) {
  const double r = std::exp(x);
  if (!std::isfinite(r)) {
    throw OverflowError(std::string(what) + ": exp(" + std::to_string(x) + ") overflows");
  }
  return r;
}

double normal_population(const ModelParams& p, double t) {
  require(std::isfinite(t) && t >= 0.0, "t", "must be >= 0");
  require(p.n0 > 0.0, "n0", "must be > 0");
  const double n = p.n0 * checked_exp(p.net_growth() * t, "normal_population");
  if (!std::isfinite(n)) throw OverflowError("normal_population: N(t) overflows");
  return n;
}

double normal_population_scaled(const ScaledParams& s, double tau) {
  require(std::isfinite(tau) && tau >= 0.0, "tau", "must be >= 0");
  const double n = s.n0 * checked_exp(s.gamma1 * tau, "normal_population");
  if (!std::isfinite(n)) throw OverflowError("normal_population: N(tau) overflows");
  return n;
}

}  // namespace mutdist
