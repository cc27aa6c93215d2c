#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "mutdist/errors.hpp"

namespace mutdist::quad {

/// 15-point Kronrod rule on [-1, 1] and its embedded 7-point Gauss rule
/// (Gauss nodes are the odd-indexed Kronrod nodes).
struct Gk15 {
  std::array<double, 15> nodes;
  std::array<double, 15> kronrod_weights;
  std::array<double, 7> gauss_nodes;
  std::array<double, 7> gauss_weights;
};
[[nodiscard]] const Gk15& gk15() noexcept;

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-12;
  int max_intervals = 20000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod on [a, b]. `weighted_sum(x, w, n)` must
/// return sum_i w_i f(x_i); it receives whole rules at once so batched
/// integrands can vectorise. Stops when the summed |K - G| estimate is below
/// max(abs, rel |I|). Throws NumericalError when max_intervals is exceeded.
template <class T, class WeightedSum>
Result<T> adaptive_gk15(WeightedSum&& weighted_sum, double a, double b, const Tolerance& tol = {}) {
  const Gk15& r = gk15();
  struct Piece {
    double a, b;
    T value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::array<double, 15> xk;
    std::array<double, 15> wk;
    std::array<double, 7> xg;
    std::array<double, 7> wg;
    for (std::size_t i = 0; i < 15; ++i) {
      xk[i] = c + h * r.nodes[i];
      wk[i] = h * r.kronrod_weights[i];
    }
    for (std::size_t i = 0; i < 7; ++i) {
      xg[i] = c + h * r.gauss_nodes[i];
      wg[i] = h * r.gauss_weights[i];
    }
    const T k = weighted_sum(xk.data(), wk.data(), std::size_t{15});
    const T g = weighted_sum(xg.data(), wg.data(), std::size_t{7});
    return Piece{lo, hi, k, std::abs(k - g)};
  };

  Result<T> out;
  if (a == b) return out;
  std::priority_queue<Piece> heap;
  heap.push(eval(a, b));
  T total = heap.top().value;
  double err = heap.top().error;
  int count = 1;
  while (err > std::max(tol.abs, tol.rel * std::abs(total))) {
    if (count >= tol.max_intervals) {
      throw NumericalError("adaptive_gk15: no convergence within " + std::to_string(tol.max_intervals) +
                           " intervals (error estimate " + std::to_string(err) + ")");
    }
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw NumericalError("adaptive_gk15: interval underflow near " + std::to_string(mid));
    }
    const Piece left = eval(worst.a, mid);
    const Piece right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the running updates.
  out.value = T{};
  out.error = 0.0;
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  out.intervals = count;
  return out;
}

/// Convenience wrapper for a pointwise real integrand.
[[nodiscard]] Result<double> integrate(const std::function<double(double)>& f, double a, double b,
                                       const Tolerance& tol = {});

}  // namespace mutdist::quad
