#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mutdist/core_model.hpp"
#include "mutdist/setting.hpp"

namespace mutdist {

/// Coefficients of  f_t + ((a m + b) f)_m = ((c m + d) f)_mm.
struct FPCoefficients {
  std::function<double(double)> a;
  std::function<double(double)> b;
  std::function<double(double)> c;
  std::function<double(double)> d;
  /// Set by build_coefficients; enables the closed-form change of variables.
  std::optional<Setting> setting;
  ScaledParams params;
};

/// The three second-order truncations: fp1 (ld), fp3 (lc), fp2 (simplified).
enum class FpApprox { Fp1, Fp2, Fp3 };

[[nodiscard]] std::string_view to_string(FpApprox approx) noexcept;
[[nodiscard]] FpApprox parse_approx(std::string_view text);
[[nodiscard]] Setting approx_setting(FpApprox approx) noexcept;
[[nodiscard]] FpApprox setting_approx(Setting setting) noexcept;

/// ld:         a = gamma, b = nu N~,            c = 0,         d = nu N~ / 2
/// lc:         a = gamma, b = nu N~,            c = gamma / 2, d = nu N~ / 2
/// simplified: a = 0,     b = gamma M~ + nu N~, c = 0,         d = b / 2
/// with N~(tau) = N0 e^{gamma1 tau}.
[[nodiscard]] FPCoefficients build_coefficients(Setting setting, const ScaledParams& scaled);

/// Cell-averaged density on [m_lo, m_max] split into n_cells equal cells.
struct GridFunction {
  double m_lo = 0.0;
  double m_max = 1.0;
  std::size_t n_cells = 0;
  std::vector<double> values;
  double time = 0.0;

  [[nodiscard]] double cell_width() const { return (m_max - m_lo) / static_cast<double>(n_cells); }
  [[nodiscard]] double center(std::size_t i) const { return m_lo + (static_cast<double>(i) + 0.5) * cell_width(); }
  [[nodiscard]] double mass() const;
};

/// Unit mass in the cell that contains `at`.
[[nodiscard]] GridFunction point_mass(double m_lo, double m_max, std::size_t n_cells, double at = 0.0);

struct GridMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};
[[nodiscard]] GridMoments grid_moments(const GridFunction& f);

/// L1 distance sum |f - g| dm of two functions on the same grid.
[[nodiscard]] double l1_distance(const GridFunction& f, const GridFunction& g);

/// u(t) = exp(-int_0^t a), shift(t) = int_0^t b u, tau_heat(t) = int_0^t d u^2.
/// For c = 0, g(y, tau_heat) = f(m, t) / u with y = u m - shift solves the heat equation.
struct ChangeOfVariables {
  double u = 1.0;
  double shift = 0.0;
  double tau_heat = 0.0;
  [[nodiscard]] double y(double m) const { return u * m - shift; }
};

/// Closed forms for build_coefficients output, adaptive quadrature otherwise.
[[nodiscard]] ChangeOfVariables change_of_variables(const FPCoefficients& coeffs, double t);

/// Heat-kernel solution from a point mass at m = 0, cell-averaged on the grid:
/// f(m, tau) = u G(y(m), tau_heat) with G(y, s) = exp(-y^2 / 4s) / sqrt(4 pi s).
/// Requires c = 0 (checked on a time grid for custom coefficients).
[[nodiscard]] GridFunction closed_form_solution(const FPCoefficients& coeffs, double tau, double m_lo,
                                                double m_max, std::size_t n_cells);

/// Conservative finite volumes with zero-flux boundaries: explicit upwind drift,
/// backward-Euler diffusion of D = c m + d (tridiagonal solve), coefficients at
/// step midpoints. Steps through `time_nodes` (the first must equal f0.time).
/// Throws NumericalError on negative cells below -1e-12, mass drift above 1e-8
/// or an advective CFL number above 1.
[[nodiscard]] GridFunction solve_finite_difference(const FPCoefficients& coeffs, const GridFunction& f0,
                                                   std::span<const double> time_nodes);

/// Uniform steps of at most dt from f0.time to tau_final.
[[nodiscard]] GridFunction solve_finite_difference(const FPCoefficients& coeffs, const GridFunction& f0,
                                                   double tau_final, double dt);

struct FpSolveOptions {
  std::size_t n_cells = 4096;
  std::size_t n_steps = 0;  ///< 0: 2 n_cells
  double width_sd = 12.0;   ///< half-width of the domain in final standard deviations
  /// If > 0, start from the closed form at this time (c = 0 only) instead of a point-mass cell.
  double start_time = 0.0;
};

struct FpSolution {
  GridFunction density;  ///< in m
  GridMoments moments;
  double mass_error = 0.0;
  std::size_t n_steps = 0;
  std::string scheme;
};

/// Solves fp1/fp2/fp3 from a point mass at m = 0 (requires m0 = 0). The
/// equation is advanced in x = u m - shift, where the drift vanishes and the
/// diffusion becomes ((c u (x + shift) + d u^2) g)_xx; the frame is affine in m,
/// so the returned density lives on a uniform m grid. Time steps are
/// equidistributed in accumulated diffusion.
[[nodiscard]] FpSolution solve_fokker_planck(Setting setting, const ScaledParams& scaled, double tau_final,
                                             const FpSolveOptions& options = {});

}  // namespace mutdist
