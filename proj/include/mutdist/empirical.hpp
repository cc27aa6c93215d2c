#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mutdist {

/// Integer-binned ensemble summary. Bin k covers [k - 1/2, k + 1/2); only
/// nonempty bins are stored, in increasing k.
struct EmpiricalDistribution {
  std::vector<std::int64_t> bins;      ///< bin centers k
  std::vector<std::uint64_t> counts;   ///< samples per bin
  std::vector<double> probabilities;   ///< counts / n_samples
  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;               ///< unbiased sample variance, 0 when n_samples < 2
  std::uint64_t seed = 0;

  /// Mass of bin k (0 for empty bins).
  [[nodiscard]] double probability(std::int64_t k) const;

  /// Dense probabilities for k = 0..k_max. Mass outside that range is dropped.
  [[nodiscard]] std::vector<double> dense(std::int64_t k_max) const;

  /// Standard error of the mean, sqrt(variance / n).
  [[nodiscard]] double mean_standard_error() const;
};

/// Bin index of a value: floor(m + 1/2). Throws OverflowError beyond 2^62.
[[nodiscard]] std::int64_t bin_of(double m);

/// Histogram and moments of `values`, accumulated in index order.
[[nodiscard]] EmpiricalDistribution summarize(std::span<const double> values, std::uint64_t seed);

/// Sample mean and unbiased variance, computed in index order.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};
[[nodiscard]] SampleMoments sample_moments(std::span<const double> values);

/// 1/2 sum |p_k - q_k| over all bins.
[[nodiscard]] double total_variation(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// TV between a histogram and a pmf given on k = 0..pmf.size()-1 with
/// `residual` mass beyond: the tail is compared as one lumped bin.
[[nodiscard]] double total_variation(const EmpiricalDistribution& e, std::span<const double> pmf,
                                     double residual);

}  // namespace mutdist
