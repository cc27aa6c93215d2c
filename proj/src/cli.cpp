#include "mutdist/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mutdist/errors.hpp"
#include "mutdist/kinetic_mc.hpp"
#include "mutdist/moments.hpp"
#include "mutdist/refdist.hpp"
#include "mutdist/simd/kernels.hpp"

namespace mutdist::cli {
namespace fs = std::filesystem;
using io::Json;

namespace {

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      detail::fail_validation("eps-list", "cannot parse '" + item + "'");
    }
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  if (!cfg.setting) detail::fail_validation("setting", "is required (--setting ld|lc|simplified)");
  validate(cfg.scaled);
  detail::require(std::isfinite(cfg.tau) && cfg.tau >= 0.0, "tau", "must be >= 0");
  detail::require(cfg.samples >= 1, "samples", "must be >= 1");
  detail::require(cfg.points >= 2, "points", "must be >= 2");
  detail::require(cfg.dt >= 0.0, "dt", "must be >= 0");
  detail::require(!cfg.eps_list.empty(), "eps-list", "must not be empty");
  for (double e : cfg.eps_list) detail::require(e > 0.0 && e <= 1.0, "eps-list", "entries must lie in (0, 1]");
}

std::vector<double> tau_grid(double tau, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = tau * static_cast<double>(i) / static_cast<double>(points - 1);
  if (tau == 0.0) g.resize(1);
  return g;
}

Json header(const char* command, const RunConfig& cfg) {
  return Json{{"command", command},
              {"version", kVersion},
              {"simd", std::string(simd::to_string(simd::active_isa()))},
              {"config", config_to_json(cfg)}};
}

void write_plot_script(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) detail::fail_validation("out", "cannot write " + path.string());
  out << "# gnuplot " << path.filename().string() << "\n"
      << "set datafile separator ','\nset key top right\n"
      << body;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// --- subcommands -------------------------------------------------------------

void cmd_moments(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const std::string method = cfg.method.empty() ? "limit" : cfg.method;
  const auto grid = tau_grid(cfg.tau, cfg.points);
  MomentCurve curve;
  if (method == "limit") {
    curve = limit_curve(*cfg.setting, cfg.scaled, grid);
  } else if (method == "exact") {
    curve = variance_ode_scaled(*cfg.setting, cfg.scaled, grid);
  } else {
    detail::fail_validation("method", "moments accepts limit|exact, got '" + method + "'");
  }
  io::write_moment_curve_csv(dir / "moments.csv", curve);
  Json rec = header("moments", cfg);
  rec["method"] = method;
  rec["final"] = Json{{"tau", curve.times.back()},
                      {"mean", curve.mean.back()},
                      {"variance", curve.variance.back()},
                      {"second_moment", curve.second_moment.back()}};
  io::write_json(dir / "moments.json", rec);
  write_plot_script(dir / "plot.gp",
                    "set xlabel 'tau'\nset logscale y\n"
                    "plot 'moments.csv' every ::1 using 1:2 with lines title 'mean', \\\n"
                    "     'moments.csv' every ::1 using 1:3 with lines title 'variance'\n");
  out << "tau,mean,variance,second_moment\n"
      << io::format_double(curve.times.back()) << ',' << io::format_double(curve.mean.back()) << ','
      << io::format_double(curve.variance.back()) << ',' << io::format_double(curve.second_moment.back()) << '\n';
}

void cmd_simulate(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const EmpiricalDistribution e =
      simulate_ensemble(*cfg.setting, cfg.scaled, cfg.tau, cfg.samples, cfg.seed, cfg.workers);
  io::write_pmf_csv(dir / "simulate_pmf.csv", e);
  Json rec = header("simulate", cfg);
  rec["setting"] = std::string(to_string(*cfg.setting));
  rec["scaled"] = io::to_json(cfg.scaled);
  rec["tau"] = cfg.tau;
  rec["summary"] = io::summary_json(e);
  io::write_json(dir / "simulate.json", rec);
  write_plot_script(dir / "plot.gp",
                    "set xlabel 'k'\nset ylabel 'probability'\n"
                    "plot 'simulate_pmf.csv' every ::1 using 1:2 with impulses title 'ensemble'\n");
  out << "n_samples=" << e.n_samples << " mean=" << io::format_double(e.mean)
      << " variance=" << io::format_double(e.variance) << '\n';
}

void cmd_refdist(const RunConfig& cfg, const fs::path& dir, std::ostream& out, std::ostream& err) {
  const std::string method = cfg.method.empty() ? (*cfg.setting == Setting::LeaCoulson ? "oracle" : "cf")
                                                : cfg.method;
  Json rec = header("refdist", cfg);
  rec["method"] = method;
  rec["params"] = io::to_json(cfg.scaled);
  rec["tau"] = cfg.tau;
  LatticePmf pmf;
  if (method == "cf") {
    CharFn cf;
    switch (*cfg.setting) {
      case Setting::LuriaDelbruck: cf = ld_characteristic_function(cfg.scaled, cfg.tau); break;
      case Setting::Simplified: cf = simplified_characteristic_function(cfg.scaled, cfg.tau); break;
      case Setting::LeaCoulson:
        detail::fail_validation("method", "cf is available for ld and simplified only; use oracle or recursion");
    }
    pmf = cfg.kmax ? pmf_from_cf(cf, cfg.kmax, next_pow2(2 * cfg.kmax), cfg.workers)
                   : reference_pmf(cf, 1e-4, 256, std::size_t{1} << 20, cfg.workers);
  } else if (method == "recursion") {
    const Setting s = *cfg.setting;
    detail::require(s == Setting::LeaCoulson, "method", "recursion applies to the lc setting only");
    detail::require(std::abs(cfg.scaled.gamma - cfg.scaled.gamma1) <= kBranchSwitch * std::max(cfg.scaled.gamma1, 1.0),
                    "gamma", "recursion requires gamma == gamma1");
    const double theta = cfg.scaled.nu * cfg.scaled.n0 * std::expm1(cfg.scaled.gamma1 * cfg.tau) / cfg.scaled.gamma1;
    RecursionGate gate;
    gate.oracle_samples = cfg.oracle_samples;
    gate.seed = cfg.seed;
    gate.n_workers = cfg.workers;
    pmf = lc_pmf_recursion(theta, cfg.kmax ? cfg.kmax : 1000, gate);
    rec["theta"] = theta;
    rec["validation_tv"] = pmf.validation_tv;
  } else if (method == "oracle") {
    const EmpiricalDistribution e = clone_oracle(*cfg.setting, cfg.scaled, cfg.tau, cfg.samples, cfg.seed, cfg.workers);
    io::write_pmf_csv(dir / "refdist_pmf.csv", e);
    rec["summary"] = io::summary_json(e);
    io::write_json(dir / "refdist.json", rec);
    out << "oracle n_samples=" << e.n_samples << " mean=" << io::format_double(e.mean) << '\n';
    return;
  } else {
    detail::fail_validation("method", "refdist accepts cf|oracle|recursion, got '" + method + "'");
  }
  io::write_pmf_csv(dir / "refdist_pmf.csv", pmf);
  rec["k_max"] = pmf.k_max;
  rec["residual"] = pmf.residual;
  if (!pmf.warning.empty()) {
    rec["warning"] = pmf.warning;
    err << "warning: " << pmf.warning << '\n';
  }
  io::write_json(dir / "refdist.json", rec);
  write_plot_script(dir / "plot.gp",
                    "set xlabel 'k'\nset ylabel 'probability'\n"
                    "plot 'refdist_pmf.csv' every ::1 using 1:2 with impulses title 'reference'\n");
  out << method << " k_max=" << pmf.k_max << " residual=" << io::format_double(pmf.residual) << '\n';
}

void cmd_pde(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const FpApprox approx = cfg.approx.value_or(setting_approx(*cfg.setting));
  const Setting setting = approx_setting(approx);
  FpSolveOptions opt;
  opt.n_cells = cfg.cells;
  if (cfg.dt > 0.0) opt.n_steps = static_cast<std::size_t>(std::ceil(cfg.tau / cfg.dt));
  const FpSolution sol = solve_fokker_planck(setting, cfg.scaled, cfg.tau, opt);
  io::write_density_csv(dir / "density.csv", sol.density);
  const double mean_ref = mean_scaled(cfg.scaled, cfg.tau);
  const double var_ref =
      setting == Setting::Simplified ? mean_ref - cfg.scaled.m0 : variance_scaled(setting, cfg.scaled, cfg.tau);
  Json rec = header("pde", cfg);
  rec["approx"] = std::string(to_string(approx));
  rec["scheme"] = sol.scheme;
  rec["n_cells"] = sol.density.n_cells;
  rec["n_steps"] = sol.n_steps;
  rec["dt"] = cfg.tau / static_cast<double>(sol.n_steps);
  rec["mass_error"] = sol.mass_error;
  rec["moments"] = Json{{"mean", sol.moments.mean}, {"variance", sol.moments.variance}};
  rec["reference_moments"] = Json{{"mean", mean_ref}, {"variance", var_ref}};
  io::write_json(dir / "pde.json", rec);
  write_plot_script(dir / "plot.gp",
                    "set xlabel 'm'\nset ylabel 'density'\n"
                    "plot 'density.csv' every ::1 using 1:2 with lines title '" +
                        std::string(to_string(approx)) + "'\n");
  out << to_string(approx) << " mean=" << io::format_double(sol.moments.mean)
      << " variance=" << io::format_double(sol.moments.variance)
      << " mass_error=" << io::format_double(sol.mass_error) << '\n';
}

void cmd_converge(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const ConvergenceReport report = run_convergence(cfg, cfg.eps_list, dir);
  Json rec = header("converge", cfg);
  rec["report"] = report.to_json();
  io::write_json(dir / "run_report.json", rec);
  for (const auto& r : report.rows) {
    out << "eps=" << io::format_double(r.eps) << " tv=" << io::format_double(r.tv) << '\n';
  }
  if (!report.monotone) {
    for (const auto& v : report.violations) out << "non-monotone: " << v << '\n';
  }
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json j;
  j["setting"] = c.setting ? Json(std::string(to_string(*c.setting))) : Json(nullptr);
  j["gamma"] = c.scaled.gamma;
  j["gamma1"] = c.scaled.gamma1;
  j["nu"] = c.scaled.nu;
  j["eps"] = c.scaled.epsilon;
  j["n0"] = c.scaled.n0;
  j["m0"] = c.scaled.m0;
  j["tau"] = c.tau;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["method"] = c.method;
  j["kmax"] = c.kmax;
  j["approx"] = c.approx ? Json(std::string(to_string(*c.approx))) : Json(nullptr);
  j["cells"] = c.cells;
  j["dt"] = c.dt;
  j["points"] = c.points;
  j["eps_list"] = c.eps_list;
  j["oracle_samples"] = c.oracle_samples;
  j["workers"] = c.workers;
  return j;
}

RunConfig config_from_json(const Json& in, RunConfig c) {
  const Json& j = in.contains("config") && in["config"].is_object() ? in["config"] : in;
  detail::require(j.is_object(), "config", "must be a JSON object");
  auto get = [&](const char* key, auto& target) {
    if (!j.contains(key) || j[key].is_null()) return;
    try {
      j[key].get_to(target);
    } catch (const Json::exception& e) {
      detail::fail_validation(key, std::string("bad value in config: ") + e.what());
    }
  };
  static const char* known[] = {"setting", "gamma", "gamma1", "nu",     "eps",    "n0",     "m0",
                                "tau",     "samples", "seed",  "out",    "method", "kmax",   "approx",
                                "cells",   "dt",    "points",  "eps_list", "oracle_samples", "workers"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      detail::fail_validation(key, "unknown config key");
    }
  }
  if (j.contains("setting") && !j["setting"].is_null()) c.setting = parse_setting(j["setting"].get<std::string>());
  if (j.contains("approx") && !j["approx"].is_null()) c.approx = parse_approx(j["approx"].get<std::string>());
  get("gamma", c.scaled.gamma);
  get("gamma1", c.scaled.gamma1);
  get("nu", c.scaled.nu);
  get("eps", c.scaled.epsilon);
  get("n0", c.scaled.n0);
  get("m0", c.scaled.m0);
  get("tau", c.tau);
  get("samples", c.samples);
  get("seed", c.seed);
  get("out", c.out);
  get("method", c.method);
  get("kmax", c.kmax);
  get("cells", c.cells);
  get("dt", c.dt);
  get("points", c.points);
  get("eps_list", c.eps_list);
  get("oracle_samples", c.oracle_samples);
  get("workers", c.workers);
  return c;
}

Json ConvergenceReport::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    rows_json.push_back(Json{{"eps", r.eps},
                             {"tv", r.tv},
                             {"mean", r.mean},
                             {"variance", r.variance},
                             {"mean_exact", r.mean_exact},
                             {"variance_exact", r.variance_exact},
                             {"mean_error_se", r.mean_error},
                             {"variance_rel_error", r.variance_error}});
  }
  return Json{{"reference_method", reference_method},
              {"reference_residual", reference_residual},
              {"monotone", monotone},
              {"violations", violations},
              {"rows", rows_json}};
}

ConvergenceReport run_convergence(const RunConfig& cfg, std::span<const double> eps_list,
                                  const std::optional<fs::path>& out_dir) {
  RunConfig base = cfg;
  base.eps_list.assign(eps_list.begin(), eps_list.end());
  validate_config(base);
  const Setting setting = *cfg.setting;

  ConvergenceReport report;
  LatticePmf ref_pmf;
  EmpiricalDistribution ref_oracle;
  if (setting == Setting::LeaCoulson) {
    ref_oracle = clone_oracle(setting, cfg.scaled, cfg.tau, cfg.oracle_samples, cfg.seed, cfg.workers);
    report.reference_method = "oracle";
  } else {
    const CharFn cf = setting == Setting::LuriaDelbruck ? ld_characteristic_function(cfg.scaled, cfg.tau)
                                                        : simplified_characteristic_function(cfg.scaled, cfg.tau);
    ref_pmf = reference_pmf(cf, 1e-4, 256, std::size_t{1} << 20, cfg.workers);
    report.reference_method = "cf";
    report.reference_residual = ref_pmf.residual;
  }

  std::string plot = "set xlabel 'k'\nset ylabel 'probability'\nset xrange [0:*]\nplot 'reference.csv' every ::1 using 1:2 with lines lw 2 title 'reference'";
  for (double eps : eps_list) {
    ScaledParams s = cfg.scaled;
    s.epsilon = eps;
    const EmpiricalDistribution e = simulate_ensemble(setting, s, cfg.tau, cfg.samples, cfg.seed, cfg.workers);
    const std::vector<double> grid{0.0, cfg.tau};
    EpsilonResult r;
    r.eps = eps;
    r.tv = setting == Setting::LeaCoulson ? total_variation(e, ref_oracle)
                                          : total_variation(e, ref_pmf.probs, ref_pmf.residual);
    r.mean = e.mean;
    r.variance = e.variance;
    if (cfg.tau > 0.0) {
      const MomentCurve exact = variance_ode_scaled(setting, s, grid);
      r.mean_exact = exact.mean.back();
      r.variance_exact = exact.variance.back();
    } else {
      r.mean_exact = s.m0;
    }
    const double se = e.mean_standard_error();
    r.mean_error = se > 0.0 ? std::abs(r.mean - r.mean_exact) / se : std::abs(r.mean - r.mean_exact);
    r.variance_error = r.variance_exact > 0.0 ? std::abs(r.variance - r.variance_exact) / r.variance_exact
                                              : std::abs(r.variance - r.variance_exact);
    report.rows.push_back(r);
    if (out_dir) {
      const std::string name = "hist_eps_" + io::format_double(eps) + ".csv";
      io::write_pmf_csv(*out_dir / name, e);
      plot += ", \\\n     '" + name + "' every ::1 using 1:2 with points title 'eps=" + io::format_double(eps) + "'";
    }
  }

  // TV must not grow as eps decreases.
  std::vector<std::size_t> order(report.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return report.rows[a].eps > report.rows[b].eps; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& coarse = report.rows[order[i - 1]];
    const auto& fine = report.rows[order[i]];
    if (fine.eps < coarse.eps && fine.tv > coarse.tv) {
      report.monotone = false;
      report.violations.push_back("TV(" + io::format_double(fine.eps) + ") = " + io::format_double(fine.tv) +
                                  " > TV(" + io::format_double(coarse.eps) + ") = " + io::format_double(coarse.tv));
    }
  }

  if (out_dir) {
    if (setting == Setting::LeaCoulson) {
      io::write_pmf_csv(*out_dir / "reference.csv", ref_oracle);
    } else {
      io::write_pmf_csv(*out_dir / "reference.csv", ref_pmf);
    }
    Json rec{{"setting", std::string(to_string(setting))},
             {"scaled", io::to_json(cfg.scaled)},
             {"tau", cfg.tau},
             {"samples", cfg.samples},
             {"seed", cfg.seed}};
    rec["report"] = report.to_json();
    io::write_json(*out_dir / "convergence.json", rec);
    write_plot_script(*out_dir / "plot.gp", plot + "\n");
  }
  return report;
}

int run_subcommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mutant-distribution simulation and numerics"};
  app.require_subcommand(1);

  struct Flags {
    std::optional<std::string> setting, config, out, method, approx, eps_list;
    std::optional<double> gamma, gamma1, nu, eps, n0, m0, tau, dt;
    std::optional<std::size_t> samples, kmax, cells, points, oracle_samples;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
  } f;

  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--setting", f.setting, "ld | lc | simplified");
    sub->add_option("--gamma", f.gamma, "scaled mutant growth rate");
    sub->add_option("--gamma1", f.gamma1, "scaled net normal growth rate");
    sub->add_option("--nu", f.nu, "scaled mutation rate");
    sub->add_option("--eps", f.eps, "scaling parameter in (0, 1]");
    sub->add_option("--n0", f.n0, "initial normal population");
    sub->add_option("--m0", f.m0, "initial mutants");
    sub->add_option("--tau", f.tau, "scaled horizon");
    sub->add_option("--seed", f.seed, "64-bit RNG seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--config", f.config, "JSON config or run record; flags take precedence");
    sub->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  };

  auto* moments = app.add_subcommand("moments", "mean/variance curves");
  add_common(moments);
  moments->add_option("--method", f.method, "limit | exact");
  moments->add_option("--points", f.points, "number of tau samples");

  auto* simulate = app.add_subcommand("simulate", "kinetic Monte Carlo ensemble");
  add_common(simulate);
  simulate->add_option("--samples", f.samples, "ensemble size");

  auto* refdist = app.add_subcommand("refdist", "reference distribution");
  add_common(refdist);
  refdist->add_option("--method", f.method, "cf | oracle | recursion");
  refdist->add_option("--kmax", f.kmax, "truncation index (0 = automatic)");
  refdist->add_option("--samples", f.samples, "oracle samples");
  refdist->add_option("--oracle-samples", f.oracle_samples, "samples for the recursion gate");

  auto* pde = app.add_subcommand("pde", "diffusion approximation");
  add_common(pde);
  pde->add_option("--approx", f.approx, "fp1 | fp2 | fp3");
  pde->add_option("--cells", f.cells, "grid cells");
  pde->add_option("--dt", f.dt, "time step (0 = automatic)");

  auto* converge = app.add_subcommand("converge", "convergence experiment over eps");
  add_common(converge);
  converge->add_option("--eps-list", f.eps_list, "comma-separated eps values");
  converge->add_option("--samples", f.samples, "ensemble size per eps");
  converge->add_option("--oracle-samples", f.oracle_samples, "clone-oracle samples for lc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg;
    if (f.config) cfg = config_from_json(io::read_json(*f.config), cfg);
    if (f.setting) cfg.setting = parse_setting(*f.setting);
    if (f.gamma) cfg.scaled.gamma = *f.gamma;
    if (f.gamma1) cfg.scaled.gamma1 = *f.gamma1;
    if (f.nu) cfg.scaled.nu = *f.nu;
    if (f.eps) cfg.scaled.epsilon = *f.eps;
    if (f.n0) cfg.scaled.n0 = *f.n0;
    if (f.m0) cfg.scaled.m0 = *f.m0;
    if (f.tau) cfg.tau = *f.tau;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out = *f.out;
    if (f.method) cfg.method = *f.method;
    if (f.approx) cfg.approx = parse_approx(*f.approx);
    if (f.eps_list) cfg.eps_list = parse_eps_list(*f.eps_list);
    if (f.samples) cfg.samples = *f.samples;
    if (f.kmax) cfg.kmax = *f.kmax;
    if (f.cells) cfg.cells = *f.cells;
    if (f.points) cfg.points = *f.points;
    if (f.dt) cfg.dt = *f.dt;
    if (f.oracle_samples) cfg.oracle_samples = *f.oracle_samples;
    if (f.workers) cfg.workers = *f.workers;
    validate_config(cfg);

    const fs::path dir(cfg.out);
    io::ensure_writable_dir(dir);
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "moments") cmd_moments(cfg, dir, out);
    else if (name == "simulate") cmd_simulate(cfg, dir, out);
    else if (name == "refdist") cmd_refdist(cfg, dir, out, err);
    else if (name == "pde") cmd_pde(cfg, dir, out);
    else cmd_converge(cfg, dir, out);
    io::write_json(dir / "run.json", header(name.c_str(), cfg));
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mutdist::cli
