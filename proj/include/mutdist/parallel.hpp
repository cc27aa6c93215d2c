#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mutdist {

/// Number of workers to use when the caller passes 0.
[[nodiscard]] inline unsigned default_workers() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for every i in [0, n) on up to `n_workers` threads (0 = all
/// cores). Indices are split into contiguous chunks; fn must only write state
/// owned by index i. The exception of the lowest failing chunk is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned n_workers, Fn&& fn) {
  if (n_workers == 0) n_workers = default_workers();
  const std::size_t workers = std::min<std::size_t>(n_workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    threads.emplace_back([&, lo, hi, w] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mutdist
