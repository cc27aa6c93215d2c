#include "mutdist/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "mutdist/errors.hpp"

namespace mutdist::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) detail::fail_validation("out", "cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) detail::fail_validation("out", "write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ensure_writable_dir(const std::filesystem::path& dir, const std::string& field) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    detail::fail_validation(field, "cannot create directory " + dir.string());
  }
  const auto probe = dir / ".write_probe";
  {
    std::ofstream p(probe);
    if (!p) detail::fail_validation(field, "directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

void write_moment_curve_csv(const std::filesystem::path& path, const MomentCurve& c) {
  auto out = open_out(path);
  out << "tau,mean,variance,second_moment\n";
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    out << format_double(c.times[i]) << ',' << format_double(c.mean[i]) << ',' << format_double(c.variance[i])
        << ',' << format_double(c.second_moment[i]) << '\n';
  }
  close_checked(out, path);
}

void write_pmf_csv(const std::filesystem::path& path, const EmpiricalDistribution& e) {
  auto out = open_out(path);
  out << "k,probability\n";
  for (std::size_t i = 0; i < e.bins.size(); ++i) out << e.bins[i] << ',' << format_double(e.probabilities[i]) << '\n';
  close_checked(out, path);
}

void write_pmf_csv(const std::filesystem::path& path, const LatticePmf& pmf) {
  auto out = open_out(path);
  out << "k,probability\n";
  for (std::size_t k = 0; k < pmf.probs.size(); ++k) out << k << ',' << format_double(pmf.probs[k]) << '\n';
  close_checked(out, path);
}

void write_density_csv(const std::filesystem::path& path, const GridFunction& f) {
  auto out = open_out(path);
  out << "m,density\n";
  for (std::size_t i = 0; i < f.n_cells; ++i) out << format_double(f.center(i)) << ',' << format_double(f.values[i]) << '\n';
  close_checked(out, path);
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) detail::fail_validation("config", "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    detail::fail_validation("config", std::string("invalid JSON: ") + e.what());
  }
}

Json to_json(const ScaledParams& s) {
  return Json{{"gamma", s.gamma}, {"gamma1", s.gamma1}, {"nu", s.nu},
              {"eps", s.epsilon}, {"n0", s.n0},         {"m0", s.m0}};
}

Json summary_json(const EmpiricalDistribution& e) {
  return Json{{"n_samples", e.n_samples}, {"seed", e.seed}, {"mean", e.mean}, {"variance", e.variance}};
}

}  // namespace mutdist::io
