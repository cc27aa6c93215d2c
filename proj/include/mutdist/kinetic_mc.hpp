#pragma once

#include <cstdint>
#include <vector>

#include "mutdist/core_model.hpp"
#include "mutdist/empirical.hpp"
#include "mutdist/poisson.hpp"
#include "mutdist/rng.hpp"
#include "mutdist/setting.hpp"

namespace mutdist {

struct SampleState {
  double m = 0.0;  ///< mutant mass, >= 0
  double t = 0.0;  ///< unscaled time
};

/// One jump of the kinetic equation at time state.t:
///   ld:         m' = (1 + beta) m + Poisson(mu N(t))
///   lc:         m' = m + Poisson(beta m) + Poisson(mu N(t))
///   simplified: m' = m + Poisson(beta M(t)) + Poisson(mu N(t)), M(t) = mean_mutants
/// Time is left unchanged.
[[nodiscard]] SampleState jump_update(Setting setting, SampleState state, const ModelParams& params,
                                      double mean_mutants, RngStream& stream);

/// One exact path on [0, t_final]: unit-rate exponential jump clock, jump_update
/// at each arrival. If `trace` is non-null every post-jump state is appended
/// (after the initial state).
[[nodiscard]] double simulate_path(Setting setting, const ModelParams& params, double t_final,
                                   RngStream& stream, std::vector<SampleState>* trace = nullptr);

/// Final mutant values of `n_samples` independent paths over tau_final (t = tau_final / eps).
/// Sample i uses RngStream(seed, i); the result does not depend on n_workers.
[[nodiscard]] std::vector<double> simulate_values(Setting setting, const ScaledParams& scaled,
                                                  double tau_final, std::size_t n_samples,
                                                  std::uint64_t seed, unsigned n_workers = 0);

/// Histogram of simulate_values.
[[nodiscard]] EmpiricalDistribution simulate_ensemble(Setting setting, const ScaledParams& scaled,
                                                      double tau_final, std::size_t n_samples,
                                                      std::uint64_t seed, unsigned n_workers = 0);

}  // namespace mutdist
