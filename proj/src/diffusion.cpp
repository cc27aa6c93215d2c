#include "mutdist/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mutdist/errors.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/quadrature.hpp"
#include "mutdist/simd/kernels.hpp"

namespace mutdist {
namespace {

// int_0^t e^{r s} ds
double exp_integral(double r, double t) {
  const double x = r * t;
  if (std::abs(x) < 1e-300) return t;
  return std::expm1(x) / r;
}

// Mass of N(0, 2s) on [lo, hi].
double gauss_mass(double lo, double hi, double s) {
  const double k = 1.0 / (2.0 * std::sqrt(s));
  const double a = lo * k;
  const double b = hi * k;
  if (a > 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b < 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 0.5 * (std::erf(b) - std::erf(a));
}

bool is_zero_c(const FPCoefficients& coeffs, double tau) {
  if (coeffs.setting) return *coeffs.setting != Setting::LeaCoulson || coeffs.params.gamma == 0.0;
  for (int i = 0; i <= 64; ++i) {
    if (coeffs.c(tau * i / 64.0) != 0.0) return false;
  }
  return true;
}

void require_grid(double m_lo, double m_max, std::size_t n_cells) {
  detail::require(n_cells >= 1, "n_cells", "must be >= 1");
  detail::require(std::isfinite(m_lo) && std::isfinite(m_max) && m_max > m_lo, "m_max", "must exceed m_lo");
}

// Solves the tridiagonal system lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i] in place.
void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

struct Workspace {
  std::vector<double> velocity, flux, lower, diag, upper, diffusivity;
};

void step(const FPCoefficients& k, GridFunction& f, double t0, double t1, Workspace& ws, double mass0) {
  const std::size_t n = f.n_cells;
  const double dt = t1 - t0;
  const double tm = 0.5 * (t0 + t1);
  const double dm = f.cell_width();
  const double a = k.a(tm);
  const double b = k.b(tm);
  const double c = k.c(tm);
  const double d = k.d(tm);
  auto& v = f.values;

  if (a != 0.0 || b != 0.0) {
    // Interior faces j = 0..n-2 separate cells j and j+1.
    ws.velocity.resize(n > 1 ? n - 1 : 0);
    ws.flux.resize(ws.velocity.size());
    for (std::size_t j = 0; j + 1 < n; ++j) ws.velocity[j] = a * (f.m_lo + static_cast<double>(j + 1) * dm) + b;
    simd::kernels().upwind_fluxes(v.data(), ws.velocity.data(), ws.flux.data(), ws.velocity.size());
    const double r = dt / dm;
    for (std::size_t i = 0; i < n; ++i) {
      const double out_right = i + 1 < n ? std::max(ws.velocity[i], 0.0) : 0.0;
      const double out_left = i > 0 ? -std::min(ws.velocity[i - 1], 0.0) : 0.0;
      if (r * (out_right + out_left) > 1.0) {
        throw NumericalError("solve_finite_difference: advective CFL number " +
                             std::to_string(r * (out_right + out_left)) + " > 1 at cell " + std::to_string(i) +
                             "; reduce dt");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double right = i + 1 < n ? ws.flux[i] : 0.0;
      const double left = i > 0 ? ws.flux[i - 1] : 0.0;
      v[i] -= r * (right - left);
    }
  }

  if (c != 0.0 || d != 0.0) {
    ws.diffusivity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double D = c * f.center(i) + d;
      if (D < -1e-14 * std::abs(d)) {
        throw NumericalError("solve_finite_difference: diffusion " + std::to_string(D) + " < 0 at m = " +
                             std::to_string(f.center(i)) + ", t = " + std::to_string(tm));
      }
      ws.diffusivity[i] = std::max(D, 0.0);
    }
    const double r = dt / (dm * dm);
    ws.lower.assign(n, 0.0);
    ws.upper.assign(n, 0.0);
    ws.diag.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        ws.lower[i] = -r * ws.diffusivity[i - 1];
        ws.diag[i] += r * ws.diffusivity[i];
      }
      if (i + 1 < n) {
        ws.upper[i] = -r * ws.diffusivity[i + 1];
        ws.diag[i] += r * ws.diffusivity[i];
      }
    }
    thomas(ws.lower, ws.diag, ws.upper, v);
  }

  f.time = t1;
  const double lowest = *std::min_element(v.begin(), v.end());
  if (lowest < -1e-12) {
    throw NumericalError("solve_finite_difference: negative density " + std::to_string(lowest) + " at t = " +
                         std::to_string(t1));
  }
  const double drift = std::abs(f.mass() - mass0);
  if (drift > 1e-8 * std::max(mass0, 1.0)) {
    throw NumericalError("solve_finite_difference: mass drift " + std::to_string(drift) + " at t = " +
                         std::to_string(t1));
  }
}

}  // namespace

std::string_view to_string(FpApprox approx) noexcept {
  switch (approx) {
    case FpApprox::Fp1: return "fp1";
    case FpApprox::Fp2: return "fp2";
    case FpApprox::Fp3: return "fp3";
  }
  return "?";
}

FpApprox parse_approx(std::string_view text) {
  if (text == "fp1") return FpApprox::Fp1;
  if (text == "fp2") return FpApprox::Fp2;
  if (text == "fp3") return FpApprox::Fp3;
  throw ValidationError("approx: expected one of fp1|fp2|fp3, got '" + std::string(text) + "'");
}

Setting approx_setting(FpApprox approx) noexcept {
  switch (approx) {
    case FpApprox::Fp1: return Setting::LuriaDelbruck;
    case FpApprox::Fp3: return Setting::LeaCoulson;
    case FpApprox::Fp2: return Setting::Simplified;
  }
  return Setting::LuriaDelbruck;
}

FpApprox setting_approx(Setting setting) noexcept {
  switch (setting) {
    case Setting::LuriaDelbruck: return FpApprox::Fp1;
    case Setting::LeaCoulson: return FpApprox::Fp3;
    case Setting::Simplified: return FpApprox::Fp2;
  }
  return FpApprox::Fp1;
}

FPCoefficients build_coefficients(Setting setting, const ScaledParams& s) {
  validate(s);
  FPCoefficients k;
  k.setting = setting;
  k.params = s;
  const double g = s.gamma;
  const double g1 = s.gamma1;
  const double src = s.nu * s.n0;
  auto source = [src, g1](double t) { return src * std::exp(g1 * t); };
  auto zero = [](double) { return 0.0; };
  switch (setting) {
    case Setting::LuriaDelbruck:
    case Setting::LeaCoulson:
      k.a = [g](double) { return g; };
      k.b = source;
      k.c = setting == Setting::LeaCoulson ? std::function<double(double)>([g](double) { return 0.5 * g; })
                                           : std::function<double(double)>(zero);
      k.d = [source](double t) { return 0.5 * source(t); };
      break;
    case Setting::Simplified: {
      auto rate = [s, g, source](double t) { return g * mean_scaled(s, t) + source(t); };
      k.a = zero;
      k.b = rate;
      k.c = zero;
      k.d = [rate](double t) { return 0.5 * rate(t); };
      break;
    }
  }
  return k;
}

double GridFunction::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell_width();
}

GridFunction point_mass(double m_lo, double m_max, std::size_t n_cells, double at) {
  require_grid(m_lo, m_max, n_cells);
  GridFunction f;
  f.m_lo = m_lo;
  f.m_max = m_max;
  f.n_cells = n_cells;
  f.values.assign(n_cells, 0.0);
  const double pos = (at - m_lo) / f.cell_width();
  detail::require(pos >= 0.0 && pos < static_cast<double>(n_cells), "at", "must lie inside the grid");
  f.values[static_cast<std::size_t>(pos)] = 1.0 / f.cell_width();
  return f;
}

GridMoments grid_moments(const GridFunction& f) {
  std::vector<double> x(f.n_cells);
  for (std::size_t i = 0; i < f.n_cells; ++i) x[i] = f.center(i);
  const auto& k = simd::kernels();
  const double dm = f.cell_width();
  const simd::Moments3 raw = k.shifted_moments(x.data(), f.values.data(), f.n_cells, 0.0);
  GridMoments out;
  out.mass = raw.sum_w * dm;
  if (raw.sum_w <= 0.0) return out;
  const double mean0 = raw.sum_wx / raw.sum_w;
  const simd::Moments3 c = k.shifted_moments(x.data(), f.values.data(), f.n_cells, mean0);
  out.mean = mean0 + c.sum_wx / c.sum_w;
  out.variance = std::max(0.0, c.sum_wx2 / c.sum_w - (c.sum_wx / c.sum_w) * (c.sum_wx / c.sum_w));
  return out;
}

double l1_distance(const GridFunction& f, const GridFunction& g) {
  detail::require(f.n_cells == g.n_cells && f.values.size() == g.values.size(), "grid", "sizes differ");
  return simd::kernels().l1_distance(f.values.data(), g.values.data(), f.n_cells) * f.cell_width();
}

ChangeOfVariables change_of_variables(const FPCoefficients& k, double t) {
  detail::require(std::isfinite(t) && t >= 0.0, "t", "must be >= 0");
  ChangeOfVariables cv;
  if (t == 0.0) return cv;
  if (k.setting) {
    const ScaledParams& s = k.params;
    const double src = s.nu * s.n0;
    if (*k.setting == Setting::Simplified) {
      cv.shift = mean_scaled(s, t) - s.m0;
      cv.tau_heat = 0.5 * cv.shift;
    } else {
      cv.u = std::exp(-s.gamma * t);
      cv.shift = src * exp_integral(s.gamma1 - s.gamma, t);
      cv.tau_heat = 0.5 * src * exp_integral(s.gamma1 - 2.0 * s.gamma, t);
    }
    return cv;
  }
  const quad::Tolerance tol{1e-13, 1e-11, 20000};
  auto u_at = [&](double s) { return std::exp(-quad::integrate(k.a, 0.0, s, tol).value); };
  cv.u = u_at(t);
  cv.shift = quad::integrate([&](double s) { return k.b(s) * u_at(s); }, 0.0, t, tol).value;
  cv.tau_heat = quad::integrate(
                    [&](double s) {
                      const double u = u_at(s);
                      return k.d(s) * u * u;
                    },
                    0.0, t, tol)
                    .value;
  return cv;
}

GridFunction closed_form_solution(const FPCoefficients& coeffs, double tau, double m_lo, double m_max,
                                  std::size_t n_cells) {
  require_grid(m_lo, m_max, n_cells);
  detail::require(std::isfinite(tau) && tau >= 0.0, "tau", "must be >= 0");
  if (!is_zero_c(coeffs, tau)) {
    detail::fail_validation("coeffs", "closed form requires c = 0 (fp1 or fp2)");
  }
  const ChangeOfVariables cv = change_of_variables(coeffs, tau);
  GridFunction f;
  f.m_lo = m_lo;
  f.m_max = m_max;
  f.n_cells = n_cells;
  f.time = tau;
  if (cv.tau_heat <= 0.0) {
    // Still a point mass, transported to y = 0.
    return point_mass(m_lo, m_max, n_cells, cv.shift / cv.u);
  }
  f.values.resize(n_cells);
  const double dm = f.cell_width();
  for (std::size_t i = 0; i < n_cells; ++i) {
    const double lo = m_lo + static_cast<double>(i) * dm;
    f.values[i] = gauss_mass(cv.y(lo), cv.y(lo + dm), cv.tau_heat) / dm;
  }
  return f;
}

GridFunction solve_finite_difference(const FPCoefficients& coeffs, const GridFunction& f0,
                                     std::span<const double> time_nodes) {
  require_grid(f0.m_lo, f0.m_max, f0.n_cells);
  detail::require(f0.values.size() == f0.n_cells, "f0", "values size differs from n_cells");
  detail::require(!time_nodes.empty() && time_nodes.front() == f0.time, "time_nodes", "must start at f0.time");
  GridFunction f = f0;
  const double mass0 = f.mass();
  Workspace ws;
  for (std::size_t i = 1; i < time_nodes.size(); ++i) {
    detail::require(time_nodes[i] > time_nodes[i - 1], "time_nodes", "must be strictly increasing");
    step(coeffs, f, time_nodes[i - 1], time_nodes[i], ws, mass0);
  }
  return f;
}

GridFunction solve_finite_difference(const FPCoefficients& coeffs, const GridFunction& f0, double tau_final,
                                     double dt) {
  detail::require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
  detail::require(tau_final >= f0.time, "tau_final", "must be >= f0.time");
  const auto n = static_cast<std::size_t>(std::ceil((tau_final - f0.time) / dt - 1e-12));
  std::vector<double> nodes{f0.time};
  for (std::size_t i = 1; i <= n; ++i) {
    nodes.push_back(i == n ? tau_final : f0.time + (tau_final - f0.time) * static_cast<double>(i) / n);
  }
  return solve_finite_difference(coeffs, f0, nodes);
}

namespace {

// fp3 in the frame y = u m - shift - floor(t), where the diffusion is c' y with
// c' = c u and the floor y = 0 is fixed; the floor's motion is a translation of
// the density by floor(t0) - floor(t1) per step. Vertex-centered finite volumes
// on geometrically graded nodes x_0 = 0 < x_1 < ...: node masses q_i, control
// widths w_i = (x_{i+1} - x_{i-1}) / 2. With D(0) = 0 the discrete mean and
// second moment follow the continuum moment equations; the translation splits
// each node mass linearly between its new neighbors, which keeps the mean.
struct FellerResult {
  std::vector<double> nodes;
  std::vector<double> mass;
  std::size_t n_steps = 0;
};

std::vector<double> graded_nodes(std::size_t n, double smallest, double top) {
  std::vector<double> x(n);
  const double last = static_cast<double>(n - 1);
  if (smallest * last >= top) {
    for (std::size_t i = 0; i < n; ++i) x[i] = top * static_cast<double>(i) / last;
    return x;
  }
  // x_i = (smallest / k) (e^{i k} - 1); pick k so that x_{n-1} = top.
  auto end_at = [&](double k) { return smallest / k * std::expm1(last * k); };
  double k_lo = 0.0;
  double k_hi = 1.0;
  while (end_at(k_hi) < top) k_hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (k_lo + k_hi);
    (end_at(mid) < top ? k_lo : k_hi) = mid;
  }
  const double k = k_hi;
  for (std::size_t i = 0; i < n; ++i) x[i] = smallest / k * std::expm1(static_cast<double>(i) * k);
  x[n - 1] = top;
  return x;
}

// Adds mass q at position p to the nodes bracketing it (first moment preserved).
void deposit(const std::vector<double>& x, std::vector<double>& q, double p, double mass, std::size_t& cursor) {
  const std::size_t n = x.size();
  if (p >= x[n - 1]) {
    q[n - 1] += mass;
    return;
  }
  if (p <= x[0]) {
    q[0] += mass;
    return;
  }
  while (cursor + 1 < n && x[cursor + 1] <= p) ++cursor;
  while (cursor > 0 && x[cursor] > p) --cursor;
  const double w = (p - x[cursor]) / (x[cursor + 1] - x[cursor]);
  q[cursor] += (1.0 - w) * mass;
  q[cursor + 1] += w * mass;
}

FellerResult solve_feller(const std::function<double(double)>& c_frame, const std::function<double(double)>& floor_at,
                          double y_start, double t0, double t1, double top, std::size_t n, std::size_t n_steps) {
  FellerResult r;
  r.nodes = graded_nodes(n, y_start > 0.0 ? y_start / 16.0 : top / static_cast<double>(n - 1), top);
  const auto& x = r.nodes;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] - x[i] : 0.0;
    w[i] = 0.5 * (left + right);
  }
  std::vector<double> q(n, 0.0);
  std::size_t cursor = 0;
  deposit(x, q, y_start, 1.0, cursor);

  // Time nodes: half equidistributed in int c' dt, half uniform.
  const std::size_t n_tab = 16 * n_steps + 1;
  std::vector<double> tt(n_tab);
  std::vector<double> acc(n_tab, 0.0);
  for (std::size_t i = 0; i < n_tab; ++i) {
    tt[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_tab - 1);
    if (i > 0) acc[i] = acc[i - 1] + 0.5 * (c_frame(tt[i - 1]) + c_frame(tt[i])) * (tt[i] - tt[i - 1]);
  }
  const double total = acc.back();
  std::vector<double> times{t0};
  std::size_t c = 1;
  for (std::size_t k = 1; k < n_steps; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(n_steps);
    // Invert 0.5 acc / total + 0.5 (t - t0) / (t1 - t0) = frac on the table.
    auto phi = [&](std::size_t i) {
      return (total > 0.0 ? 0.5 * acc[i] / total : 0.0) + (total > 0.0 ? 0.5 : 1.0) * (tt[i] - t0) / (t1 - t0);
    };
    while (c + 1 < n_tab && phi(c) < frac) ++c;
    const double span = phi(c) - phi(c - 1);
    const double a = span > 0.0 ? (frac - phi(c - 1)) / span : 1.0;
    const double t = tt[c - 1] + a * (tt[c] - tt[c - 1]);
    if (t > times.back() && t < t1) times.push_back(t);
  }
  times.push_back(t1);

  std::vector<double> lower(n), diag(n), upper(n), shifted(n), diff(n), gap(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) gap[i] = x[i + 1] - x[i];
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double dt = times[s] - times[s - 1];
    const double cm = c_frame(0.5 * (times[s] + times[s - 1]));
    const double delta = floor_at(times[s - 1]) - floor_at(times[s]);
    // Splitting a node mass at x_i + delta between x_j and x_{j+1} adds the
    // variance (x_i + delta - x_j)(x_{j+1} - x_i - delta); that much is taken
    // off the diffusion beforehand (never below 0).
    cursor = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double spread = 0.0;
      const double p = x[i] + delta;
      if (delta != 0.0 && p < x[n - 1]) {
        while (cursor + 1 < n && x[cursor + 1] <= p) ++cursor;
        spread = (p - x[cursor]) * (x[cursor + 1] - p);
      }
      diff[i] = std::max(cm * x[i] - spread / (2.0 * dt), 0.0);
    }
    // Implicit diffusion: q_i - dt (F_{i-1/2} - F_{i+1/2}) = q_i^old with
    // F_{i+1/2} = (D_i q_i / w_i - D_{i+1} q_{i+1} / w_{i+1}) / gap_i.
    for (std::size_t i = 0; i < n; ++i) {
      const double k_i = diff[i] / w[i];
      diag[i] = 1.0;
      lower[i] = 0.0;
      upper[i] = 0.0;
      if (i > 0) {
        diag[i] += dt * k_i / gap[i - 1];
        lower[i] = -dt * diff[i - 1] / w[i - 1] / gap[i - 1];
      }
      if (i + 1 < n) {
        diag[i] += dt * k_i / gap[i];
        upper[i] = -dt * diff[i + 1] / w[i + 1] / gap[i];
      }
    }
    thomas(lower, diag, upper, q);
    for (double& v : q) {
      if (v < -1e-12) throw NumericalError("solve_fokker_planck: negative node mass " + std::to_string(v));
      v = std::max(v, 0.0);
    }
    if (delta != 0.0) {
      std::fill(shifted.begin(), shifted.end(), 0.0);
      cursor = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (q[i] != 0.0) deposit(x, shifted, x[i] + delta, q[i], cursor);
      }
      q.swap(shifted);
    }
  }
  r.mass = std::move(q);
  r.n_steps = times.size() - 1;
  return r;
}

}  // namespace

FpSolution solve_fokker_planck(Setting setting, const ScaledParams& scaled, double tau_final,
                               const FpSolveOptions& opt) {
  validate(scaled);
  detail::require(scaled.m0 == 0.0, "m0", "the diffusion solvers start from a point mass at 0");
  detail::require(std::isfinite(tau_final) && tau_final > 0.0, "tau", "must be > 0");
  detail::require(opt.n_cells >= 8, "cells", "must be >= 8");
  detail::require(opt.start_time >= 0.0 && opt.start_time < tau_final, "start_time", "must lie in [0, tau)");
  detail::require(opt.width_sd > 0.0, "width_sd", "must be > 0");
  const FPCoefficients phys = build_coefficients(setting, scaled);
  const bool feller = !is_zero_c(phys, tau_final);
  if (opt.start_time > 0.0 && feller) {
    detail::fail_validation("start_time", "closed-form start requires c = 0");
  }
  const std::size_t n_steps = opt.n_steps ? opt.n_steps : 2 * opt.n_cells;
  const ChangeOfVariables end = change_of_variables(phys, tau_final);
  const double var_m = setting == Setting::Simplified ? mean_scaled(scaled, tau_final)
                                                      : variance_scaled(setting, scaled, tau_final);
  double sd_x = end.u * std::sqrt(std::max(var_m, 0.0));
  if (!(sd_x > 0.0)) sd_x = 1.0;

  FpSolution out;
  out.density.time = tau_final;
  out.density.n_cells = opt.n_cells;

  if (feller) {
    // y = u m - shift - floor(t) >= 0, with the diffusion c u y vanishing at y = 0.
    auto floor_at = [phys](double t) {
      const ChangeOfVariables cv = change_of_variables(phys, t);
      return -cv.shift - phys.d(t) * cv.u / phys.c(t);
    };
    auto c_frame = [phys](double t) { return phys.c(t) * change_of_variables(phys, t).u; };
    const double floor_end = floor_at(tau_final);
    // Tails of c' y diffusion decay like exp(-y / int c' dt).
    const double theta = quad::integrate(c_frame, 0.0, tau_final).value;
    const double top = -floor_end + std::max(opt.width_sd * sd_x, 50.0 * theta);
    const FellerResult r = solve_feller(c_frame, floor_at, -floor_at(0.0), 0.0, tau_final, top, opt.n_cells, n_steps);

    // Node positions in m.
    const double to_m = 1.0 / end.u;
    const double offset = floor_end + end.shift;
    std::vector<double> m(r.nodes.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (r.nodes[i] + offset) * to_m;
    const simd::Moments3 raw = simd::kernels().shifted_moments(m.data(), r.mass.data(), m.size(), 0.0);
    const double mean0 = raw.sum_wx / raw.sum_w;
    const simd::Moments3 c = simd::kernels().shifted_moments(m.data(), r.mass.data(), m.size(), mean0);
    out.moments.mass = raw.sum_w;
    out.moments.mean = mean0 + c.sum_wx / c.sum_w;
    out.moments.variance = std::max(0.0, c.sum_wx2 / c.sum_w - (c.sum_wx / c.sum_w) * (c.sum_wx / c.sum_w));
    out.mass_error = std::abs(raw.sum_w - 1.0);
    out.n_steps = r.n_steps;

    // Uniform m grid from the floor to width_sd standard deviations past the
    // mean; each node's control volume is spread evenly over the cells it
    // covers and whatever lies beyond the grid is added to the last cell.
    GridFunction& dens = out.density;
    dens.m_lo = m.front();
    dens.m_max = std::min(m.back(), out.moments.mean + opt.width_sd * std::sqrt(out.moments.variance));
    if (!(dens.m_max > dens.m_lo)) dens.m_max = m.back();
    dens.values.assign(opt.n_cells, 0.0);
    const double h = dens.cell_width();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (r.mass[i] == 0.0) continue;
      const double a = i > 0 ? 0.5 * (m[i - 1] + m[i]) : m[i];
      const double b = i + 1 < m.size() ? 0.5 * (m[i] + m[i + 1]) : m[i];
      if (b <= a) {
        const auto k = static_cast<std::size_t>(std::clamp((m[i] - dens.m_lo) / h, 0.0, double(opt.n_cells - 1)));
        dens.values[k] += r.mass[i];
        continue;
      }
      const double density = r.mass[i] / (b - a);
      auto k = static_cast<std::size_t>(std::clamp(std::floor((a - dens.m_lo) / h), 0.0, double(opt.n_cells - 1)));
      double lo = a;
      while (lo < b) {
        const double cell_hi = k + 1 < opt.n_cells ? dens.m_lo + static_cast<double>(k + 1) * h : b;
        const double hi = std::min(b, cell_hi);
        dens.values[k] += density * (hi - lo);
        lo = hi;
        if (k + 1 < opt.n_cells) ++k;
      }
    }
    for (double& v : dens.values) v /= h;
    out.scheme = "graded-node finite volumes with moving floor, " + std::string(to_string(setting_approx(setting)));
    return out;
  }

  // Drift-free frame x = u m - shift, diffusion d u^2; mean x = 0 is conserved.
  FPCoefficients frame;
  frame.a = [](double) { return 0.0; };
  frame.b = frame.a;
  frame.c = frame.a;
  frame.d = [phys](double t) {
    const double u = change_of_variables(phys, t).u;
    return phys.d(t) * u * u;
  };
  const double x_lo = -opt.width_sd * sd_x;
  // Put x = 0 at a cell center.
  const double dx = 2.0 * opt.width_sd * sd_x / static_cast<double>(opt.n_cells);
  const double lo = -(std::floor(-x_lo / dx) + 0.5) * dx;
  const double hi = lo + static_cast<double>(opt.n_cells) * dx;

  GridFunction g;
  const double s0 = opt.start_time > 0.0 ? change_of_variables(phys, opt.start_time).tau_heat : 0.0;
  if (s0 > 0.0) {
    g.m_lo = lo;
    g.m_max = hi;
    g.n_cells = opt.n_cells;
    g.values.resize(g.n_cells);
    for (std::size_t i = 0; i < g.n_cells; ++i) {
      const double a = lo + static_cast<double>(i) * dx;
      g.values[i] = gauss_mass(a, a + dx, s0) / dx;
    }
  } else {
    g = point_mass(lo, hi, opt.n_cells, 0.0);
  }
  g.time = opt.start_time;

  // Time nodes equidistributed in accumulated diffusion int d' dt.
  const std::size_t n_tab = 16 * n_steps + 1;
  std::vector<double> tt(n_tab);
  std::vector<double> acc(n_tab, 0.0);
  double prev = frame.d(opt.start_time);
  for (std::size_t i = 0; i < n_tab; ++i) {
    tt[i] = opt.start_time + (tau_final - opt.start_time) * static_cast<double>(i) / static_cast<double>(n_tab - 1);
    if (i > 0) {
      const double r = std::max(frame.d(tt[i]), 0.0);
      acc[i] = acc[i - 1] + 0.5 * (prev + r) * (tt[i] - tt[i - 1]);
      prev = r;
    }
  }
  std::vector<double> nodes{opt.start_time};
  const double total = acc.back();
  std::size_t cursor = 1;
  for (std::size_t k = 1; k < n_steps; ++k) {
    double t;
    if (total > 0.0) {
      const double target = total * static_cast<double>(k) / static_cast<double>(n_steps);
      while (cursor + 1 < n_tab && acc[cursor] < target) ++cursor;
      const double span = acc[cursor] - acc[cursor - 1];
      const double w = span > 0.0 ? (target - acc[cursor - 1]) / span : 1.0;
      t = tt[cursor - 1] + w * (tt[cursor] - tt[cursor - 1]);
    } else {
      t = opt.start_time + (tau_final - opt.start_time) * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    if (t > nodes.back() && t < tau_final) nodes.push_back(t);
  }
  nodes.push_back(tau_final);

  const GridFunction gx = solve_finite_difference(frame, g, nodes);

  // Back to m = (x + shift) / u.
  out.density.m_lo = (gx.m_lo + end.shift) / end.u;
  out.density.m_max = (gx.m_max + end.shift) / end.u;
  out.density.values.resize(gx.n_cells);
  for (std::size_t i = 0; i < gx.n_cells; ++i) out.density.values[i] = gx.values[i] * end.u;
  out.moments = grid_moments(out.density);
  out.mass_error = std::abs(out.moments.mass - 1.0);
  out.n_steps = nodes.size() - 1;
  out.scheme = "characteristic-frame backward Euler, " + std::string(to_string(setting_approx(setting)));
  return out;
}

}  // namespace mutdist
