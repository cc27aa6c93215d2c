#pragma once

#include <cstdint>

#include "mutdist/rng.hpp"

namespace mutdist {

/// Below this mean the sampler inverts the cdf by sequential search; at and
/// above it uses Hoermann's PTRS transformed rejection.
inline constexpr double kPoissonInversionCutoff = 10.0;

/// Exact Poisson(lambda) variate. lambda = 0 returns 0 without consuming
/// randomness. Throws ValidationError for negative or non-finite lambda and
/// OverflowError when lambda exceeds 2^52.
[[nodiscard]] std::uint64_t sample_poisson(RngStream& stream, double lambda);

/// log P(X = k) for X ~ Poisson(lambda).
[[nodiscard]] double poisson_log_pmf(std::uint64_t k, double lambda);

}  // namespace mutdist
