#include "mutdist/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mutdist/errors.hpp"
#include "mutdist/simd/kernels.hpp"

namespace mutdist {

double EmpiricalDistribution::probability(std::int64_t k) const {
  const auto it = std::lower_bound(bins.begin(), bins.end(), k);
  if (it == bins.end() || *it != k) return 0.0;
  return probabilities[static_cast<std::size_t>(it - bins.begin())];
}

std::vector<double> EmpiricalDistribution::dense(std::int64_t k_max) const {
  std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(k_max + 1, 0)), 0.0);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] >= 0 && bins[i] <= k_max) out[static_cast<std::size_t>(bins[i])] = probabilities[i];
  }
  return out;
}

double EmpiricalDistribution::mean_standard_error() const {
  if (n_samples == 0) return 0.0;
  return std::sqrt(variance / static_cast<double>(n_samples));
}

std::int64_t bin_of(double m) {
  const double k = std::floor(m + 0.5);
  if (!(std::abs(k) < 0x1p62)) throw OverflowError("bin_of: value " + std::to_string(m) + " out of range");
  return static_cast<std::int64_t>(k);
}

SampleMoments sample_moments(std::span<const double> values) {
  SampleMoments out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  const auto& k = simd::kernels();
  // Two passes: the second is taken about the first-pass mean.
  const double mean0 = k.shifted_moments(values.data(), nullptr, n, 0.0).sum_wx / static_cast<double>(n);
  const simd::Moments3 c = k.shifted_moments(values.data(), nullptr, n, mean0);
  const double dn = static_cast<double>(n);
  out.mean = mean0 + c.sum_wx / dn;
  if (n > 1) out.variance = std::max(0.0, (c.sum_wx2 - c.sum_wx * c.sum_wx / dn) / (dn - 1.0));
  return out;
}

EmpiricalDistribution summarize(std::span<const double> values, std::uint64_t seed) {
  EmpiricalDistribution e;
  e.seed = seed;
  e.n_samples = values.size();
  std::map<std::int64_t, std::uint64_t> hist;
  for (double v : values) ++hist[bin_of(v)];
  e.bins.reserve(hist.size());
  e.counts.reserve(hist.size());
  e.probabilities.reserve(hist.size());
  const double n = static_cast<double>(values.size());
  for (const auto& [k, c] : hist) {
    e.bins.push_back(k);
    e.counts.push_back(c);
    e.probabilities.push_back(static_cast<double>(c) / n);
  }
  const SampleMoments m = sample_moments(values);
  e.mean = m.mean;
  e.variance = m.variance;
  return e;
}

double total_variation(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.bins.size() || j < b.bins.size()) {
    if (j == b.bins.size() || (i < a.bins.size() && a.bins[i] < b.bins[j])) {
      sum += a.probabilities[i++];
    } else if (i == a.bins.size() || b.bins[j] < a.bins[i]) {
      sum += b.probabilities[j++];
    } else {
      sum += std::abs(a.probabilities[i++] - b.probabilities[j++]);
    }
  }
  return 0.5 * sum;
}

double total_variation(const EmpiricalDistribution& e, std::span<const double> pmf, double residual) {
  const auto k_max = static_cast<std::int64_t>(pmf.size()) - 1;
  const std::vector<double> p = e.dense(k_max);
  double outside = 0.0;  // empirical mass beyond k_max (or below 0)
  for (std::size_t i = 0; i < e.bins.size(); ++i) {
    if (e.bins[i] < 0 || e.bins[i] > k_max) outside += e.probabilities[i];
  }
  const double l1 = simd::kernels().l1_distance(p.data(), pmf.data(), pmf.size());
  return 0.5 * (l1 + std::abs(outside - residual));
}

}  // namespace mutdist
