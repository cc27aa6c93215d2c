#pragma once

#include <span>
#include <vector>

#include "mutdist/core_model.hpp"
#include "mutdist/ode.hpp"
#include "mutdist/setting.hpp"

namespace mutdist {

/// Mean, variance and second moment sampled at increasing times.
struct MomentCurve {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> second_moment;
};

/// Relative width of the window in which the coincident-rate formulas replace
/// the generic ones: |r1 - r2| < kBranchSwitch * max(r1, r2, 1).
inline constexpr double kBranchSwitch = 1e-9;

/// Solution of y' = rate * y + amp * exp(source_rate * t), y(0) = y0.
[[nodiscard]] double linear_growth_with_source(double rate, double source_rate, double amp, double y0,
                                               double t);

/// Closed-form M(t). Identical for all three settings.
[[nodiscard]] double mean_closed(const ModelParams& params, double t);

/// Closed-form M~(tau) of the mean-field scaled mean equation.
[[nodiscard]] double mean_scaled(const ScaledParams& scaled, double tau);

/// Integrates {M, M2, V} of the kinetic equation on `t_grid` (must start at 0
/// and increase strictly). Adaptive RKF45 with abs 1e-10 / rel 1e-8.
[[nodiscard]] MomentCurve variance_ode(Setting setting, const ModelParams& params,
                                       std::span<const double> t_grid,
                                       const ode::Tolerance& tol = {});

/// The same epsilon-exact moments as variance_ode(scale_params(scaled)), but
/// integrated in scaled time tau = eps t. `tau_grid` holds scaled times.
[[nodiscard]] MomentCurve variance_ode_scaled(Setting setting, const ScaledParams& scaled,
                                              std::span<const double> tau_grid,
                                              const ode::Tolerance& tol = {});

/// Mean-field (eps -> 0) variance in closed form.
[[nodiscard]] double variance_scaled(Setting setting, const ScaledParams& scaled, double tau);

/// Mutant fraction rho(t) = M / (M + N).
[[nodiscard]] double concentration(const ModelParams& params, double t);

/// lim rho(t): 1 if beta >= alpha - mu, otherwise mu / (alpha - beta).
[[nodiscard]] double concentration_limit(const ModelParams& params);

/// Closed-form curve on a tau grid using mean_scaled / variance_scaled.
[[nodiscard]] MomentCurve limit_curve(Setting setting, const ScaledParams& scaled,
                                      std::span<const double> tau_grid);

}  // namespace mutdist
