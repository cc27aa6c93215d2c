#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mutdist/core_model.hpp"
#include "mutdist/empirical.hpp"
#include "mutdist/setting.hpp"

namespace mutdist {

/// Probability mass on k = 0..k_max plus the mass that was not resolved.
struct LatticePmf {
  std::vector<double> probs;
  std::size_t k_max = 0;
  double residual = 0.0;  ///< 1 - sum(probs)
  std::string method;     ///< "cf" or "recursion"
  std::string warning;    ///< non-empty when residual > 0.01
  double validation_tv = std::numeric_limits<double>::quiet_NaN();  ///< TV to the clone oracle, if gated
};

/// Characteristic function E[exp(-i xi m~)] of a limit law. For the
/// Luria-Delbrueck law m~ = m exp(-gamma tau) is the rescaled mutant count;
/// the count itself has CF evaluator(zeta * lattice_scale).
struct CharFn {
  std::function<std::complex<double>(double)> evaluator;
  double tau = 0.0;
  ScaledParams scaled;
  double quad_tol = 1e-12;
  double lattice_scale = 1.0;
  /// True when the law is the point mass at 0 (no mutation source or tau = 0).
  bool point_mass_at_zero = false;

  [[nodiscard]] std::complex<double> operator()(double xi) const { return evaluator(xi); }
  /// CF of the integer-valued count at frequency zeta.
  [[nodiscard]] std::complex<double> count_cf(double zeta) const { return evaluator(zeta * lattice_scale); }
};

/// exp(gamma tau): the factor between the rescaled and the raw mutant count.
[[nodiscard]] double ld_unscale_value(const ScaledParams& scaled, double tau);

/// Mean-field Luria-Delbrueck CF,
///   g(xi) = exp(nu N0 int_0^tau (exp(-i xi e^{-gamma z}) - 1) e^{gamma1 z} dz).
/// Requires m0 = 0 and quad_tol in (0, 1e-6].
[[nodiscard]] CharFn ld_characteristic_function(const ScaledParams& scaled, double tau, double quad_tol = 1e-13);

/// Poisson law of the simplified model, g(xi) = exp((e^{-i xi} - 1) M~(tau)). Requires m0 = 0.
[[nodiscard]] CharFn simplified_characteristic_function(const ScaledParams& scaled, double tau);

/// Lattice inversion p_k = (1/2pi) int_{-pi}^{pi} count_cf(xi) e^{i k xi} dxi
/// by the trapezoid rule on n_nodes points (power of two, >= 2 k_max) and a
/// real inverse FFT. Throws NumericalError when some p_k < -1e-6; smaller
/// negative values are clamped to 0.
[[nodiscard]] LatticePmf pmf_from_cf(const CharFn& cf, std::size_t k_max, std::size_t n_nodes,
                                     unsigned n_workers = 0);

/// Doubles k_max from k_start (n_nodes = 2 k_max) until residual < residual_target
/// or k_max reaches k_cap.
[[nodiscard]] LatticePmf reference_pmf(const CharFn& cf, double residual_target = 1e-4,
                                       std::size_t k_start = 256, std::size_t k_cap = std::size_t{1} << 20,
                                       unsigned n_workers = 0);

/// Independent sampler of the limit laws. Mutation events arrive as a Poisson
/// process with intensity nu N0 e^{gamma1 z} on [0, tau]; a clone born at z
/// contributes e^{gamma (tau - z)} (ld) or a Geometric(e^{-gamma (tau - z)})
/// size on {1, 2, ...} (lc). The simplified law is Poisson(M~(tau)).
/// Sample i draws from RngStream(seed ^ kOracleStreamDomain, i). Requires m0 = 0.
[[nodiscard]] std::vector<double> clone_oracle_values(Setting setting, const ScaledParams& scaled, double tau,
                                                      std::size_t n_samples, std::uint64_t seed,
                                                      unsigned n_workers = 0);

[[nodiscard]] EmpiricalDistribution clone_oracle(Setting setting, const ScaledParams& scaled, double tau,
                                                 std::size_t n_samples, std::uint64_t seed,
                                                 unsigned n_workers = 0);

/// Keeps oracle streams disjoint from simulate_ensemble streams under the same seed.
inline constexpr std::uint64_t kOracleStreamDomain = 0x9E3779B97F4A7C15ull;

/// Lea-Coulson (gamma = gamma1) count law with theta expected mutation events:
/// p_0 = e^{-theta}, p_n = (theta / n) sum_{j<n} p_j / (n - j + 1)
/// (Ma-Sandri-Sarkar). No validation.
[[nodiscard]] LatticePmf lc_pmf_recursion_unchecked(double theta, std::size_t k_max);

struct RecursionGate {
  std::size_t oracle_samples = 1'000'000;
  double max_tv = 0.01;
  std::uint64_t seed = 20240101;
  unsigned n_workers = 0;
};

/// lc_pmf_recursion_unchecked, served only after its TV distance to a
/// clone_oracle run (gamma = gamma1 = 1, tau = 15) is at most gate.max_tv.
/// Throws NumericalError otherwise.
[[nodiscard]] LatticePmf lc_pmf_recursion(double theta, std::size_t k_max, const RecursionGate& gate = {});

}  // namespace mutdist
