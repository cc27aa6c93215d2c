#pragma once

// Independent reference computations used only by the tests.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

// Classical fixed-step RK4 for y' = f(t, y).
template <std::size_t N, class F>
std::array<double, N> rk4(F f, double t0, double t1, std::array<double, N> y, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
    std::array<double, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + h * static_cast<double>(k);
    const auto k1 = f(t, y);
    const auto k2 = f(t + h / 2, axpy(y, h / 2, k1));
    const auto k3 = f(t + h / 2, axpy(y, h / 2, k2));
    const auto k4 = f(t + h, axpy(y, h, k3));
    for (std::size_t i = 0; i < N; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

// Forward Euler.
template <std::size_t N, class F>
std::array<double, N> euler(F f, double t0, double t1, std::array<double, N> y, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto d = f(t0 + h * static_cast<double>(k), y);
    for (std::size_t i = 0; i < N; ++i) y[i] += h * d[i];
  }
  return y;
}

// Composite Simpson on [a, b] with an even number of panels.
template <class T, class F>
T simpson(F f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  T s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * (h / 3.0);
}

// Poisson pmf by the direct formula.
inline double poisson_pmf(std::size_t k, double lambda) {
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace oracle
