#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mutdist/core_model.hpp"
#include "mutdist/diffusion.hpp"
#include "mutdist/io.hpp"
#include "mutdist/setting.hpp"

namespace mutdist::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Merged run configuration. Defaults reproduce the Luria-Delbrueck
/// experiment: gamma 2.5, gamma1 3, nu 1e-7, eps 0.01, N0 1, tau 6.7.
struct RunConfig {
  std::optional<Setting> setting;
  ScaledParams scaled{2.5, 3.0, 1e-7, 0.01, 1.0, 0.0};
  double tau = 6.7;
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string method;     ///< moments: limit|exact; refdist: cf|oracle|recursion
  std::size_t kmax = 0;   ///< 0: chosen automatically
  std::optional<FpApprox> approx;
  std::size_t cells = 4096;
  double dt = 0.0;        ///< 0: chosen automatically
  std::size_t points = 101;
  std::vector<double> eps_list{0.1, 0.01};
  std::size_t oracle_samples = 1'000'000;
  unsigned workers = 0;   ///< 0: all cores
};

[[nodiscard]] io::Json config_to_json(const RunConfig& cfg);

/// Reads a flat config object, or the "config" member of a run record.
/// Unknown keys are rejected.
[[nodiscard]] RunConfig config_from_json(const io::Json& j, RunConfig base = {});

/// Parses argv[1..] and runs one subcommand. Returns 0 on success, 1 on a
/// validation error, 2 on a numerical failure.
int run_subcommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct EpsilonResult {
  double eps = 0.0;
  double tv = 0.0;
  double mean = 0.0;            ///< ensemble mean
  double variance = 0.0;        ///< ensemble variance
  double mean_exact = 0.0;      ///< eps-exact moment equations
  double variance_exact = 0.0;
  double mean_error = 0.0;      ///< |mean - mean_exact| / mean standard error
  double variance_error = 0.0;  ///< relative variance error
};

struct ConvergenceReport {
  std::vector<EpsilonResult> rows;
  std::string reference_method;
  double reference_residual = 0.0;
  bool monotone = true;
  std::vector<std::string> violations;
  [[nodiscard]] io::Json to_json() const;
};

/// Simulates every eps in eps_list and compares against the limit law: the
/// inverted CF (ld, simplified) or clone_oracle with cfg.oracle_samples (lc).
/// Flags eps pairs where TV grows as eps decreases. Writes per-eps
/// histograms, reference.csv, convergence.json and plot.gp when out_dir is set.
[[nodiscard]] ConvergenceReport run_convergence(const RunConfig& cfg, std::span<const double> eps_list,
                                                const std::optional<std::filesystem::path>& out_dir = {});

}  // namespace mutdist::cli
