#include "mutdist/kinetic_mc.hpp"

#include <cmath>

#include "mutdist/errors.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/parallel.hpp"

namespace mutdist {

SampleState jump_update(Setting setting, SampleState state, const ModelParams& params, double mean_mutants,
                        RngStream& stream) {
  detail::require(state.m >= 0.0, "state.m", "must be >= 0");
  const double source = params.mu * normal_population(params, state.t);
  if (!std::isfinite(source)) throw OverflowError("jump_update: mutation intensity overflows");
  const auto eta = static_cast<double>(sample_poisson(stream, source));
  switch (setting) {
    case Setting::LuriaDelbruck:
      state.m = (1.0 + params.beta) * state.m + eta;
      break;
    case Setting::LeaCoulson:
      state.m += static_cast<double>(sample_poisson(stream, params.beta * state.m)) + eta;
      break;
    case Setting::Simplified:
      state.m += static_cast<double>(sample_poisson(stream, params.beta * mean_mutants)) + eta;
      break;
  }
  if (!std::isfinite(state.m)) throw OverflowError("jump_update: mutant mass overflows");
  return state;
}

double simulate_path(Setting setting, const ModelParams& params, double t_final, RngStream& stream,
                     std::vector<SampleState>* trace) {
  detail::require(std::isfinite(t_final) && t_final >= 0.0, "tau_final", "must be >= 0");
  SampleState s{params.m0, 0.0};
  if (trace) trace->push_back(s);
  for (;;) {
    s.t += stream.exponential();
    if (s.t > t_final) break;
    const double mean = setting == Setting::Simplified ? mean_closed(params, s.t) : 0.0;
    s = jump_update(setting, s, params, mean, stream);
    if (trace) trace->push_back(s);
  }
  return s.m;
}

std::vector<double> simulate_values(Setting setting, const ScaledParams& scaled, double tau_final,
                                    std::size_t n_samples, std::uint64_t seed, unsigned n_workers) {
  validate(scaled);
  detail::require(n_samples >= 1, "n_samples", "must be >= 1");
  detail::require(std::isfinite(tau_final) && tau_final >= 0.0, "tau_final", "must be >= 0");
  const ModelParams params = scale_params(scaled);
  const double t_final = tau_final / scaled.epsilon;
  // Fail once up front rather than inside every worker.
  (void)normal_population(params, t_final);
  std::vector<double> values(n_samples);
  parallel_for(n_samples, n_workers, [&](std::size_t i) {
    RngStream stream(seed, i);
    values[i] = simulate_path(setting, params, t_final, stream);
  });
  return values;
}

EmpiricalDistribution simulate_ensemble(Setting setting, const ScaledParams& scaled, double tau_final,
                                        std::size_t n_samples, std::uint64_t seed, unsigned n_workers) {
  const std::vector<double> values = simulate_values(setting, scaled, tau_final, n_samples, seed, n_workers);
  return summarize(values, seed);
}

}  // namespace mutdist
