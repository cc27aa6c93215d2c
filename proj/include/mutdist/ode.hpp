#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "mutdist/errors.hpp"

namespace mutdist::ode {

struct Tolerance {
  double abs = 1e-300;
  double rel = 1e-11;
  double min_step = 1e-14;  ///< relative to the interval length
  std::size_t max_steps = 2'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Runge-Kutta-Fehlberg 4(5): advances the 4th-order solution, uses the
/// embedded 5th-order one for the local error estimate.
///
/// `rhs(t, y)` returns dy/dt as std::array<double, N>. Throws NumericalError
/// when the step size collapses below `tol.min_step * |t1 - t0|`.
template <std::size_t N, class Rhs>
std::array<double, N> integrate(Rhs&& rhs, double t0, double t1, std::array<double, N> y,
                                const Tolerance& tol = {}, Stats* stats = nullptr,
                                double* step_hint = nullptr) {
  using State = std::array<double, N>;
  if (t1 == t0) return y;
  const double span = t1 - t0;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = step_hint && *step_hint > 0 ? dir * std::min(*step_hint, std::abs(span))
                                         : span / 64.0;
  const double h_min = tol.min_step * std::abs(span);

  auto axpy = [](const State& base, double h_, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] += h_ * acc;
    }
    return out;
  };

  double t = t0;
  std::size_t steps = 0;
  while (dir * (t1 - t) > 0) {
    if (++steps > tol.max_steps) throw NumericalError("ode: step budget exhausted");
    if (dir * (t + h - t1) > 0) h = t1 - t;

    const State k1 = rhs(t, y);
    const State k2 = rhs(t + h / 4, axpy(y, h, {{1.0 / 4, &k1}}));
    const State k3 = rhs(t + 3 * h / 8, axpy(y, h, {{3.0 / 32, &k1}, {9.0 / 32, &k2}}));
    const State k4 = rhs(t + 12 * h / 13,
                         axpy(y, h, {{1932.0 / 2197, &k1}, {-7200.0 / 2197, &k2}, {7296.0 / 2197, &k3}}));
    const State k5 = rhs(t + h, axpy(y, h, {{439.0 / 216, &k1}, {-8.0, &k2}, {3680.0 / 513, &k3},
                                            {-845.0 / 4104, &k4}}));
    const State k6 = rhs(t + h / 2, axpy(y, h, {{-8.0 / 27, &k1}, {2.0, &k2}, {-3544.0 / 2565, &k3},
                                                {1859.0 / 4104, &k4}, {-11.0 / 40, &k5}}));
    const State y4 = axpy(y, h, {{25.0 / 216, &k1}, {1408.0 / 2565, &k3}, {2197.0 / 4104, &k4},
                                 {-1.0 / 5, &k5}});
    const State y5 = axpy(y, h, {{16.0 / 135, &k1}, {6656.0 / 12825, &k3}, {28561.0 / 56430, &k4},
                                 {-9.0 / 50, &k5}, {2.0 / 55, &k6}});

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      finite = finite && std::isfinite(y4[i]) && std::isfinite(y5[i]);
      const double scale = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y4[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
    }
    if (!finite) throw OverflowError("ode: solution left the representable range");

    if (err <= 1.0) {
      t += h;
      y = y4;
      if (stats) ++stats->accepted;
      const double grow = err > 0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
      if (step_hint) *step_hint = std::abs(h);
      h *= grow;
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
      if (std::abs(h) < h_min) {
        throw NumericalError("ode: step size underflow at t=" + std::to_string(t));
      }
    }
  }
  return y;
}

}  // namespace mutdist::ode
