#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mutdist/core_model.hpp"
#include "mutdist/diffusion.hpp"
#include "mutdist/empirical.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/refdist.hpp"

namespace mutdist::io {

using Json = nlohmann::ordered_json;

/// Throws ValidationError naming `field` when the directory cannot be created or written.
void ensure_writable_dir(const std::filesystem::path& dir, const std::string& field = "out");

/// `tau,mean,variance,second_moment`
void write_moment_curve_csv(const std::filesystem::path& path, const MomentCurve& curve);

/// `k,probability` for the nonempty bins.
void write_pmf_csv(const std::filesystem::path& path, const EmpiricalDistribution& e);

/// `k,probability` for k = 0..k_max.
void write_pmf_csv(const std::filesystem::path& path, const LatticePmf& pmf);

/// `m,density` at cell centers.
void write_density_csv(const std::filesystem::path& path, const GridFunction& f);

void write_json(const std::filesystem::path& path, const Json& j);
[[nodiscard]] Json read_json(const std::filesystem::path& path);

[[nodiscard]] Json to_json(const ScaledParams& s);
[[nodiscard]] Json summary_json(const EmpiricalDistribution& e);

/// Shortest decimal that round-trips, for file names and CSV cells.
[[nodiscard]] std::string format_double(double v);

}  // namespace mutdist::io
