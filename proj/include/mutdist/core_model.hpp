#pragma once

namespace mutdist {

/// Unscaled rates of the mutation model: normal cells replicate at `alpha`,
/// mutants at `beta`, and each normal cell mutates at `mu` per unit time.
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double n0 = 1.0;  ///< initial normal-cell count (real, > 0)
  double m0 = 0.0;  ///< initial mutant count (real, >= 0)

  /// Net growth rate of the normal population, alpha - mu.
  [[nodiscard]] double net_growth() const noexcept { return alpha - mu; }
};

/// Mean-field parameters: beta = eps*gamma, mu = eps*nu, alpha - mu = eps*gamma1.
struct ScaledParams {
  double gamma = 0.0;
  double gamma1 = 1.0;
  double nu = 0.0;
  double epsilon = 1.0;
  double n0 = 1.0;
  double m0 = 0.0;
};

/// Throws ValidationError unless alpha > 0, beta >= 0, 0 <= mu < alpha, n0 > 0, m0 >= 0.
void validate(const ModelParams& params);

/// Throws ValidationError unless gamma >= 0, gamma1 > 0, nu >= 0, 0 < epsilon <= 1, n0 > 0, m0 >= 0.
void validate(const ScaledParams& scaled);

/// Unscaled rates for a finite epsilon. The matching horizon in t-time is tau / epsilon.
[[nodiscard]] ModelParams scale_params(const ScaledParams& scaled);

/// Inverse of scale_params for the given epsilon.
[[nodiscard]] ScaledParams unscale_params(const ModelParams& params, double epsilon);

/// N(t) = N0 exp((alpha - mu) t). Throws OverflowError when the result is not finite.
///
/// Only n0 > 0 and t >= 0 are checked, so the degenerate alpha == mu case is usable.
[[nodiscard]] double normal_population(const ModelParams& params, double t);

/// N0 exp(gamma1 tau), the normal population in scaled time.
[[nodiscard]] double normal_population_scaled(const ScaledParams& scaled, double tau);

/// exp(x) that throws OverflowError instead of returning infinity.
[[nodiscard]] double checked_exp(double x, const char* what);

}  // namespace mutdist
