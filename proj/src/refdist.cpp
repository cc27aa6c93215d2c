#include "mutdist/refdist.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "mutdist/errors.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/parallel.hpp"
#include "mutdist/poisson.hpp"
#include "mutdist/quadrature.hpp"
#include "mutdist/rng.hpp"
#include "mutdist/simd/kernels.hpp"

namespace mutdist {
namespace {

using cplx = std::complex<double>;

// Phase above which the tail uses the integration-by-parts series.
constexpr double kAsymptoticPhase = 64.0;

void require_zero_m0(const ScaledParams& s) {
  detail::require(s.m0 == 0.0, "m0", "reference laws are only available for m0 = 0");
}

// e^{-i theta} - 1 with relative accuracy for small theta.
cplx exp_minus_i_minus_one(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, -std::sin(theta)};
}

// (1 - e^{-x}) / x, continuous at 0.
double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-300) return 1.0;
  return -std::expm1(-x) / x;
}

// Sum_n i^{n+1} (s)_n q^n for q = 1 / (zeta y) <= 1/64, truncated at its
// smallest term.
cplx asymptotic_series(double s, double q) {
  cplx sum{0.0, 1.0};  // n = 0: i
  double t = 1.0;
  cplx ipow{0.0, 1.0};
  for (int n = 1; n < 400; ++n) {
    const double next = t * (s + n - 1) * q;
    if (next > t || next < 1e-18 * std::abs(sum)) break;
    t = next;
    ipow *= cplx{0.0, 1.0};
    sum += ipow * t;
  }
  return sum;
}

// I(zeta) = int_0^U (exp(-i zeta e^x) - 1) e^{-p x} dx for zeta > 0.
cplx ld_log_integral(double zeta, double p, double upper, double abs_tol) {
  const double split = std::min(upper, std::max(0.0, std::log(kAsymptoticPhase / zeta)));
  cplx head{};
  if (split > 0.0) {
    const auto& k = simd::kernels();
    auto sum = [&](const double* x, const double* w, std::size_t n) {
      const simd::ComplexSum c = k.oscillatory_sum(x, w, n, zeta, p);
      return cplx{c.re, c.im};
    };
    head = quad::adaptive_gk15<cplx>(sum, 0.0, split, {abs_tol, 1e-13, 20000}).value;
  }
  cplx tail{};
  if (split < upper) {
    // y = e^x: int_{Ya}^{Yu} e^{-i zeta y} y^{-s} dy - int_{Ya}^{Yu} y^{-s} dy, s = p + 1.
    const double s = p + 1.0;
    auto endpoint = [&](double x) {
      const double y = std::exp(x);
      const double phase = zeta * y;
      const cplx osc{std::cos(phase), -std::sin(phase)};
      return std::exp(-s * x) / zeta * osc * asymptotic_series(s, 1.0 / phase);
    };
    const double width = upper - split;
    const double plain = std::exp(-p * split) * width * one_minus_exp_over(p * width);
    tail = endpoint(upper) - endpoint(split) - plain;
  }
  return head + tail;
}

}  // namespace

double ld_unscale_value(const ScaledParams& scaled, double tau) {
  return checked_exp(scaled.gamma * tau, "ld_unscale_value");
}

CharFn ld_characteristic_function(const ScaledParams& scaled, double tau, double quad_tol) {
  validate(scaled);
  require_zero_m0(scaled);
  detail::require(std::isfinite(tau) && tau >= 0.0, "tau", "must be >= 0");
  detail::require(quad_tol > 0.0 && quad_tol <= 1e-6, "quad_tol", "must lie in (0, 1e-6]");

  CharFn cf;
  cf.tau = tau;
  cf.scaled = scaled;
  cf.quad_tol = quad_tol;
  cf.lattice_scale = ld_unscale_value(scaled, tau);

  const double g = scaled.gamma;
  const double g1 = scaled.gamma1;
  const double source = scaled.nu * scaled.n0;
  const double u = cf.lattice_scale;

  if (source == 0.0 || tau == 0.0) {
    cf.point_mass_at_zero = true;
    cf.evaluator = [](double) { return cplx{1.0, 0.0}; };
    return cf;
  }
  if (g == 0.0) {
    // Clones never grow: Poisson number of unit clones.
    const double lambda = source * std::expm1(g1 * tau) / g1;
    cf.evaluator = [lambda](double xi) { return std::exp(lambda * exp_minus_i_minus_one(xi)); };
    return cf;
  }

  // Exponent in the raw count frequency zeta = xi / u, with x = gamma (tau - z):
  //   (nu N0 e^{gamma1 tau} / gamma) int_0^{gamma tau} (exp(-i zeta e^x) - 1) e^{-p x} dx.
  const double scale = source * checked_exp(g1 * tau, "ld_characteristic_function") / g;
  const double p = g1 / g;
  const double upper = g * tau;
  const double abs_tol = quad_tol / std::max(1.0, scale);
  cf.evaluator = [=](double xi) {
    if (xi == 0.0) return cplx{1.0, 0.0};
    const double zeta = std::abs(xi) / u;
    cplx e = scale * ld_log_integral(zeta, p, upper, abs_tol);
    if (xi < 0.0) e = std::conj(e);
    return std::exp(e);
  };
  return cf;
}

CharFn simplified_characteristic_function(const ScaledParams& scaled, double tau) {
  validate(scaled);
  require_zero_m0(scaled);
  CharFn cf;
  cf.tau = tau;
  cf.scaled = scaled;
  const double mean = mean_scaled(scaled, tau);
  cf.point_mass_at_zero = mean == 0.0;
  cf.evaluator = [mean](double xi) {
    if (mean == 0.0) return cplx{1.0, 0.0};
    return std::exp(mean * exp_minus_i_minus_one(xi));
  };
  return cf;
}

LatticePmf pmf_from_cf(const CharFn& cf, std::size_t k_max, std::size_t n_nodes, unsigned n_workers) {
  detail::require(static_cast<bool>(cf.evaluator), "cf", "has no evaluator");
  detail::require(n_nodes >= 2 && (n_nodes & (n_nodes - 1)) == 0, "n_nodes", "must be a power of two >= 2");
  detail::require(n_nodes >= 2 * k_max, "n_nodes", "must be >= 2 k_max");

  if (cf.point_mass_at_zero) {
    LatticePmf pmf;
    pmf.method = "cf";
    pmf.k_max = k_max;
    pmf.probs.assign(k_max + 1, 0.0);
    pmf.probs[0] = 1.0;
    return pmf;
  }

  const std::size_t half = n_nodes / 2 + 1;
  std::vector<cplx> samples(half);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n_nodes);
  parallel_for(half, n_workers, [&](std::size_t j) { samples[j] = cf.count_cf(step * static_cast<double>(j)); });

  std::vector<double> out(n_nodes);
  {
    // FFTW planning is not thread-safe.
    static std::mutex plan_mutex;
    std::unique_ptr<fftw_complex[], decltype(&fftw_free)> in(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)), &fftw_free);
    for (std::size_t j = 0; j < half; ++j) {
      in[j][0] = samples[j].real();
      in[j][1] = samples[j].imag();
    }
    fftw_plan plan;
    {
      std::lock_guard lock(plan_mutex);
      plan = fftw_plan_dft_c2r_1d(static_cast<int>(n_nodes), in.get(), out.data(), FFTW_ESTIMATE);
    }
    if (!plan) throw NumericalError("pmf_from_cf: FFT planning failed");
    fftw_execute(plan);
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan);
  }

  LatticePmf pmf;
  pmf.method = "cf";
  pmf.k_max = k_max;
  pmf.probs.resize(k_max + 1);
  const double inv_n = 1.0 / static_cast<double>(n_nodes);
  double total = 0.0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double v = out[k] * inv_n;
    if (v < -1e-6) {
      throw NumericalError("pmf_from_cf: p_" + std::to_string(k) + " = " + std::to_string(v) +
                           " is negative; increase n_nodes or the quadrature accuracy");
    }
    pmf.probs[k] = std::max(v, 0.0);
    total += pmf.probs[k];
  }
  pmf.residual = 1.0 - total;
  if (pmf.residual > 0.01) {
    pmf.warning = "truncation: residual mass " + std::to_string(pmf.residual) + " beyond k_max " +
                  std::to_string(k_max);
  }
  return pmf;
}

LatticePmf reference_pmf(const CharFn& cf, double residual_target, std::size_t k_start, std::size_t k_cap,
                         unsigned n_workers) {
  detail::require(k_start >= 1 && k_start <= k_cap, "k_start", "must lie in [1, k_cap]");
  std::size_t k = k_start;
  for (;;) {
    LatticePmf pmf = pmf_from_cf(cf, k, 2 * k, n_workers);
    if (std::abs(pmf.residual) < residual_target || k >= k_cap) return pmf;
    k = std::min(2 * k, k_cap);
  }
}

std::vector<double> clone_oracle_values(Setting setting, const ScaledParams& scaled, double tau,
                                        std::size_t n_samples, std::uint64_t seed, unsigned n_workers) {
  validate(scaled);
  require_zero_m0(scaled);
  detail::require(n_samples >= 1, "n_samples", "must be >= 1");
  detail::require(std::isfinite(tau) && tau >= 0.0, "tau", "must be >= 0");

  const double g = scaled.gamma;
  const double g1 = scaled.gamma1;
  const double growth = std::expm1(g1 * tau);  // e^{gamma1 tau} - 1
  if (!std::isfinite(growth)) throw OverflowError("clone_oracle: e^{gamma1 tau} overflows");
  const double lambda = scaled.nu * scaled.n0 * growth / g1;
  const double simplified_mean = setting == Setting::Simplified ? mean_scaled(scaled, tau) : 0.0;
  constexpr double kMaxClone = 0x1p53;

  std::vector<double> values(n_samples);
  parallel_for(n_samples, n_workers, [&](std::size_t i) {
    RngStream rng(seed ^ kOracleStreamDomain, i);
    if (setting == Setting::Simplified) {
      values[i] = static_cast<double>(sample_poisson(rng, simplified_mean));
      return;
    }
    const std::uint64_t clones = sample_poisson(rng, lambda);
    double total = 0.0;
    for (std::uint64_t c = 0; c < clones; ++c) {
      // Birth time with density proportional to e^{gamma1 z} on [0, tau].
      const double z = std::log1p(rng.uniform() * growth) / g1;
      const double age = std::max(0.0, tau - z);
      double size;
      if (setting == Setting::LuriaDelbruck) {
        size = std::exp(g * age);
      } else {
        const double success = std::exp(-g * age);
        size = 1.0;
        if (success < 1.0) size += std::floor(std::log(rng.uniform_open()) / std::log1p(-success));
      }
      if (!(size <= kMaxClone)) throw OverflowError("clone_oracle: clone size exceeds 2^53");
      total += size;
    }
    values[i] = total;
  });
  return values;
}

EmpiricalDistribution clone_oracle(Setting setting, const ScaledParams& scaled, double tau, std::size_t n_samples,
                                   std::uint64_t seed, unsigned n_workers) {
  return summarize(clone_oracle_values(setting, scaled, tau, n_samples, seed, n_workers), seed);
}

LatticePmf lc_pmf_recursion_unchecked(double theta, std::size_t k_max) {
  detail::require(std::isfinite(theta) && theta >= 0.0, "theta", "must be finite and >= 0");
  LatticePmf pmf;
  pmf.method = "recursion";
  pmf.k_max = k_max;
  pmf.probs.assign(k_max + 1, 0.0);
  pmf.probs[0] = std::exp(-theta);
  for (std::size_t n = 1; n <= k_max; ++n) {
    // Compound Poisson with clone-size law 1 / (i (i + 1)): sum_i i q_i p_{n-i}.
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += pmf.probs[j] / (static_cast<double>(n - j) + 1.0);
    pmf.probs[n] = theta / static_cast<double>(n) * s;
  }
  double total = 0.0;
  for (double p : pmf.probs) total += p;
  pmf.residual = 1.0 - total;
  if (pmf.residual > 0.01) {
    pmf.warning = "truncation: residual mass " + std::to_string(pmf.residual) + " beyond k_max " +
                  std::to_string(k_max);
  }
  return pmf;
}

LatticePmf lc_pmf_recursion(double theta, std::size_t k_max, const RecursionGate& gate) {
  LatticePmf pmf = lc_pmf_recursion_unchecked(theta, k_max);
  if (theta == 0.0) {
    pmf.validation_tv = 0.0;
    return pmf;
  }
  // gamma = gamma1 = 1 over a horizon long enough that clone ages are
  // effectively unbounded (e^{-15} ~ 3e-7), with theta expected events.
  constexpr double kTau = 15.0;
  ScaledParams s;
  s.gamma = 1.0;
  s.gamma1 = 1.0;
  s.n0 = 1.0;
  s.nu = theta / std::expm1(kTau);
  const EmpiricalDistribution oracle =
      clone_oracle(Setting::LeaCoulson, s, kTau, gate.oracle_samples, gate.seed, gate.n_workers);
  pmf.validation_tv = total_variation(oracle, pmf.probs, pmf.residual);
  if (pmf.validation_tv > gate.max_tv) {
    throw NumericalError("lc_pmf_recursion: TV " + std::to_string(pmf.validation_tv) +
                         " to the clone oracle exceeds " + std::to_string(gate.max_tv));
  }
  return pmf;
}

}  // namespace mutdist
