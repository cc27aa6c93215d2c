#include "mutdist/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mutdist/errors.hpp"

namespace mutdist {

namespace {

using State = std::array<double, 3>;  // M, M2, V

// expm1(x) / x, continuous at 0.
double relative_expm1(double x) {
  if (std::abs(x) < 1e-300) return 1.0;
  return std::expm1(x) / x;
}

bool coincident(double r1, double r2) {
  return std::abs(r1 - r2) < kBranchSwitch * std::max({std::abs(r1), std::abs(r2), 1.0});
}

void check_time(double t, const char* name) {
  detail::require(std::isfinite(t) && t >= 0.0, name, "must be >= 0");
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw OverflowError(std::string(what) + ": result overflows");
  return v;
}

// Right-hand side of the kinetic moment system in unscaled time.
State kinetic_rhs(Setting setting, const ModelParams& p, double t, const State& y) {
  const double m = y[0];
  const double m2 = y[1];
  const double v = y[2];
  const double b = p.beta;
  const double src = p.mu * normal_population(p, t);  // mu N(t)
  switch (setting) {
    case Setting::LuriaDelbruck:
      return {b * m + src,
              b * (2 + b) * m2 + src * (1 + src) + 2 * (1 + b) * src * m,
              2 * b * v + b * b * m2 + src * (1 + 2 * b * m + src)};
    case Setting::LeaCoulson:
      return {b * m + src,
              b * (2 + b) * m2 + src * (1 + src) + 2 * (1 + b) * src * m + b * m,
              2 * b * v + b * b * m2 + b * m * (1 + 2 * src) + src * (1 + src)};
    case Setting::Simplified: {
      // Increment Poisson(beta M(t) + mu N(t)) is independent of m.
      const double lambda = b * m + src;
      return {lambda, 2 * m * lambda + lambda * (1 + lambda), lambda * (1 + lambda)};
    }
  }
  return {};
}

void check_grid(std::span<const double> grid) {
  detail::require(!grid.empty(), "t_grid", "must not be empty");
  detail::require(grid.front() == 0.0, "t_grid", "must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    detail::require(grid[i] > grid[i - 1], "t_grid", "must be strictly increasing");
  }
}

template <class Rhs>
MomentCurve integrate_curve(Rhs&& rhs, double m0, std::span<const double> grid,
                            const ode::Tolerance& tol) {
  check_grid(grid);
  MomentCurve curve;
  curve.times.assign(grid.begin(), grid.end());
  State y{m0, m0 * m0, 0.0};
  double hint = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) y = ode::integrate<3>(rhs, grid[i - 1], grid[i], y, tol, nullptr, &hint);
    curve.mean.push_back(y[0]);
    curve.second_moment.push_back(y[1]);
    curve.variance.push_back(y[2]);
  }
  return curve;
}

}  // namespace

double linear_growth_with_source(double rate, double source_rate, double amp, double y0, double t) {
  const double grow = std::exp(rate * t);
  double forced;
  if (coincident(source_rate, rate)) {
    forced = amp * t * grow;
  } else {
    // amp (e^{source t} - e^{rate t}) / (source - rate), written without cancellation.
    forced = amp * t * grow * relative_expm1((source_rate - rate) * t);
  }
  return finite_or_throw(forced + y0 * grow, "linear_growth_with_source");
}

double mean_closed(const ModelParams& p, double t) {
  check_time(t, "t");
  // Guards the exponent range before the closed form is evaluated.
  (void)normal_population(p, t);
  return linear_growth_with_source(p.beta, p.net_growth(), p.mu * p.n0, p.m0, t);
}

double mean_scaled(const ScaledParams& s, double tau) {
  check_time(tau, "tau");
  (void)normal_population_scaled(s, tau);
  return linear_growth_with_source(s.gamma, s.gamma1, s.nu * s.n0, s.m0, tau);
}

MomentCurve variance_ode(Setting setting, const ModelParams& params, std::span<const double> t_grid,
                         const ode::Tolerance& tol) {
  validate(params);
  auto rhs = [&](double t, const State& y) { return kinetic_rhs(setting, params, t, y); };
  return integrate_curve(rhs, params.m0, t_grid, tol);
}

MomentCurve variance_ode_scaled(Setting setting, const ScaledParams& scaled,
                                std::span<const double> tau_grid, const ode::Tolerance& tol) {
  const ModelParams params = scale_params(scaled);
  const double inv_eps = 1.0 / scaled.epsilon;
  auto rhs = [&](double tau, const State& y) {
    State d = kinetic_rhs(setting, params, tau * inv_eps, y);
    for (double& x : d) x *= inv_eps;
    return d;
  };
  return integrate_curve(rhs, params.m0, tau_grid, tol);
}

double variance_scaled(Setting setting, const ScaledParams& s, double tau) {
  check_time(tau, "tau");
  (void)normal_population_scaled(s, tau);
  const double g = s.gamma;
  const double g1 = s.gamma1;
  const double amp = s.nu * s.n0;

  switch (setting) {
    case Setting::LuriaDelbruck:
      // dV/dtau = 2 gamma V + nu N~(tau); the initial mass grows deterministically.
      return linear_growth_with_source(2 * g, g1, amp, 0.0, tau);

    case Setting::LeaCoulson: {
      double v;
      if (coincident(g1, g)) {
        const double e = std::exp(g * tau);
        v = 2 * amp / g * e * (e - 1) - amp * tau * e;
      } else if (coincident(g1, 2 * g)) {
        const double e = std::exp(g * tau);
        v = amp / g * e * (1 - e) + 2 * amp * tau * e * e;
      } else {
        const double e2 = std::exp(2 * g * tau);
        const double bracket = g1 * tau * relative_expm1((g1 - 2 * g) * tau) + std::expm1(-g * tau);
        v = amp / (g1 - g) * e2 * bracket;
      }
      // Yule growth of the m0 initial mutants.
      v += s.m0 * std::exp(g * tau) * std::expm1(g * tau);
      return finite_or_throw(v, "variance_scaled");
    }

    case Setting::Simplified:
      // Integral of gamma M~ + nu N~, which is M~(tau) - M0.
      return mean_scaled(s, tau) - s.m0;
  }
  return 0.0;
}

double concentration(const ModelParams& p, double t) {
  const double m = mean_closed(p, t);
  const double b = m + normal_population(p, t);
  return m / b;
}

double concentration_limit(const ModelParams& p) {
  validate(p);
  // Without a mutation source and without initial mutants there is nothing to grow.
  if (p.mu == 0.0 && p.m0 == 0.0) return 0.0;
  if (p.beta >= p.net_growth()) return 1.0;
  return p.mu / (p.alpha - p.beta);
}

MomentCurve limit_curve(Setting setting, const ScaledParams& scaled, std::span<const double> tau_grid) {
  validate(scaled);
  check_grid(tau_grid);
  MomentCurve curve;
  curve.times.assign(tau_grid.begin(), tau_grid.end());
  for (double tau : tau_grid) {
    const double m = mean_scaled(scaled, tau);
    const double v = variance_scaled(setting, scaled, tau);
    curve.mean.push_back(m);
    curve.variance.push_back(v);
    curve.second_moment.push_back(v + m * m);
  }
  return curve;
}

}  // namespace mutdist
