// Command-line front end: wires model configs to the numeric modules and
// emits machine-readable reports plus a manifest per run.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "qac/report.hpp"
#include "qac/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunPaths {
  fs::path out_dir;
  void ensure() const { fs::create_directories(out_dir); }
  fs::path file(const std::string& name) const { return out_dir / name; }
};

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) qac::fail_validation("cannot open output file: " + p.string());
  out << j.dump(2) << "\n";
}

void write_manifest(const RunPaths& paths, const qac::Config& cfg, std::uint64_t seed) {
  write_json(paths.file("manifest.json"), qac::run_manifest(cfg, seed));
}

qac::SchrodingerProblem problem_from(const qac::ModelSpec& spec, const qac::Config& cfg) {
  qac::SchrodingerProblem prob;
  prob.mass = spec.mass;
  prob.rigidity = spec.rigidity;
  prob.anharmonic = spec.potential;
  prob.n_keep = static_cast<int>(cfg.get_int("spectral", "n_keep", 64));
  prob.grid.n_points = static_cast<int>(cfg.get_int("spectral", "n_points", 0));
  prob.grid.x_max = cfg.get_num("spectral", "x_max", 0.0);
  return prob;
}

int run_criteria(const qac::Config& cfg, const RunPaths& paths, const std::string& table) {
  const qac::ModelSpec spec = qac::model_from_config(cfg);
  std::optional<qac::DecompositionSpec> dec;
  if (cfg.has("decomposition", "b") || cfg.has("decomposition", "delta")) {
    dec = qac::DecompositionSpec{cfg.get_num("decomposition", "b", 0.0),
                                 cfg.get_num("decomposition", "delta", 0.0)};
  }
  paths.ensure();
  write_manifest(paths, cfg, 0);

  if (table.empty()) {
    write_json(paths.file("criteria.json"), qac::to_json(qac::evaluate_criteria(spec, dec)));
    return 0;
  }
  // --table param:lo:hi:n sweeps one model parameter
  std::string name = table;
  double lo = 0, hi = 0;
  int n = 0;
  {
    auto p1 = table.find(':');
    auto p2 = table.find(':', p1 + 1);
    auto p3 = table.find(':', p2 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos)
      qac::fail_validation("--table expects param:lo:hi:n");
    name = table.substr(0, p1);
    lo = std::stod(table.substr(p1 + 1, p2 - p1 - 1));
    hi = std::stod(table.substr(p2 + 1, p3 - p2 - 1));
    n = std::stoi(table.substr(p3 + 1));
  }
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) {
    qac::ModelSpec s = spec;
    const double v = lo + (hi - lo) * (n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
    if (name == "J")
      s.couplings.strength = v;
    else if (name == "m")
      s.mass = v;
    else if (name == "beta")
      s.beta = v;
    else if (name == "b1" && !s.potential.even_coeffs.empty())
      s.potential.even_coeffs[0] = v;
    else if (name == "b2" && s.potential.even_coeffs.size() > 1)
      s.potential.even_coeffs[1] = v;
    else
      qac::fail_validation("unknown sweep parameter: " + name);
    const qac::CriterionReport r = qac::evaluate_criteria(s, dec);
    rows.push_back({v, r.theta_d, r.t_star.value_or(0.0), r.beta_star.value_or(0.0),
                    r.m_delta_sq, r.j_hat_zero, r.phase_transition_predicted ? 1.0 : 0.0,
                    r.quantum_stabilization ? 1.0 : 0.0});
  }
  qac::write_csv(paths.file("criteria_table.csv").string(),
                 {name, "theta_d", "t_star", "beta_star", "m_delta_sq", "j_hat_zero",
                  "phase_transition", "quantum_stabilization"},
                 rows);
  return 0;
}

int run_spectrum(const qac::Config& cfg, const RunPaths& paths, int tau_points) {
  const qac::ModelSpec spec = qac::model_from_config(cfg);
  {
    const qac::ValidationReport v = qac::validate_model(spec);
    if (!v.passes) qac::fail_validation("model validation failed: " + v.diagnostics.front());
  }
  const auto dec = qac::solve_schrodinger(problem_from(spec, cfg));
  const auto gap = qac::spectral_gap(dec);
  json rep;
  rep["energies"] = dec.energies;
  rep["gap"] = gap.value;
  rep["gap_index"] = gap.index;
  rep["gap_at_truncation_edge"] = gap.at_truncation_edge;
  rep["K_upp"] = qac::upp_correlator_integral(dec, spec.beta, spec.mass);
  rep["variance"] = qac::low_variance(dec, spec.beta);
  paths.ensure();
  write_manifest(paths, cfg, 0);
  write_json(paths.file("spectrum.json"), rep);
  if (tau_points > 0) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= tau_points; ++i) {
      const double tau = spec.beta * i / tau_points;
      rows.push_back({tau, qac::matsubara_two_point(dec, spec.beta, tau)});
    }
    qac::write_csv(paths.file("matsubara.csv").string(), {"tau", "gamma"}, rows);
  }
  return 0;
}

qac::McParams mc_from(const qac::Config& cfg, std::uint64_t seed_override, int threads) {
  qac::McParams mc;
  mc.n_sweeps = cfg.get_int("mc", "sweeps", 20000);
  mc.n_burnin = cfg.get_int("mc", "burnin", 2000);
  mc.n_chains = static_cast<int>(cfg.get_int("mc", "chains", 8));
  mc.master_seed = static_cast<std::uint64_t>(cfg.get_int("mc", "seed", 1));
  if (seed_override != 0) mc.master_seed = seed_override;
  mc.proposal_width = cfg.get_num("mc", "width", 0.5);
  mc.update_mix = cfg.get_num("mc", "mix", 0.8);
  mc.n_threads = threads;
  return mc;
}

int run_simulate(const qac::Config& cfg, const RunPaths& paths, std::uint64_t seed_override,
                 int threads, bool trace) {
  const qac::ModelSpec spec = qac::model_from_config(cfg);
  const int P = static_cast<int>(cfg.get_int("box", "P", 8));
  qac::DiscreteAction act;
  const std::string kind = cfg.get_str("box", "kind", "torus");
  if (kind == "torus") {
    act = qac::build_periodic_action(spec, static_cast<int>(cfg.get_int("box", "L", 1)), P);
  } else if (kind == "rect") {
    std::vector<int> shape;
    for (int i = 0; i < spec.d; ++i)
      shape.push_back(static_cast<int>(cfg.get_int("box", "n" + std::to_string(i), 2)));
    act = qac::build_action(spec, qac::Box::rectangular(shape), P);
  } else {
    qac::fail_validation("box kind must be torus or rect");
  }

  qac::McParams mc = mc_from(cfg, seed_override, threads);
  mc.keep_series = trace;

  std::vector<qac::ObservableSpec> obs;
  for (int l = 0; l < act.n_sites; ++l) {
    const qac::MomentFactor x1{l, 0, 1};
    obs.push_back(qac::ObservableSpec::product(qac::moment_name(std::span(&x1, 1)), {x1}));
  }
  const qac::MomentFactor x2{0, 0, 2};
  obs.push_back(qac::ObservableSpec::product(qac::moment_name(std::span(&x2, 1)), {x2}));
  obs.push_back(qac::ObservableSpec::block_mag_sq());

  const qac::ChainStats stats = qac::run_chains(act, obs, mc);
  json rep;
  rep["n_sites"] = act.n_sites;
  rep["P"] = act.P;
  json est = json::object();
  for (const auto& name : stats.names) est[name] = qac::to_json(stats.estimate(name));
  rep["estimates"] = est;
  json chains = json::array();
  for (const auto& [idx, rec] : stats.chains) {
    chains.push_back({{"chain", idx},
                      {"acceptance_single", rec.acceptance_single},
                      {"acceptance_shift", rec.acceptance_shift},
                      {"n_samples", rec.n_samples}});
  }
  rep["chains"] = chains;
  paths.ensure();
  write_manifest(paths, cfg, mc.master_seed);
  write_json(paths.file("simulate.json"), rep);

  if (trace) {
    const auto& rec = stats.chains.begin()->second;
    std::vector<std::vector<double>> rows;
    const long n = rec.n_samples;
    for (long i = 0; i < n; ++i) {
      std::vector<double> row{static_cast<double>(i)};
      for (const auto& s : rec.series) row.push_back(s[i]);
      rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"sweep"};
    for (const auto& nme : stats.names) header.push_back(nme);
    qac::write_csv(paths.file("trace.csv").string(), header, rows);
  }
  return 0;
}

int run_verify(const RunPaths& paths, int n_random, std::uint64_t seed) {
  auto reports = qac::run_exact_suite();
  if (n_random > 0) {
    auto extra = qac::run_random_suite(n_random, seed ? seed : 7);
    reports.insert(reports.end(), extra.begin(), extra.end());
  }
  int failures = 0;
  json cases = json::array();
  for (const auto& r : reports) {
    if (!r.ok()) ++failures;
    cases.push_back(qac::to_json(r));
  }
  json rep;
  rep["suite"] = "correlation-inequalities";
  rep["tests"] = reports.size();
  rep["failures"] = failures;
  rep["cases"] = cases;
  paths.ensure();
  write_json(paths.file("verify.json"), rep);
  std::cout << "inequalities: " << reports.size() - failures << "/" << reports.size()
            << " passed\n";
  return failures == 0 ? 0 : 3;
}

int run_leeyang(const qac::Config& cfg, const RunPaths& paths, int truncation) {
  const qac::ModelSpec spec = qac::model_from_config(cfg);
  json rep;
  // Laguerre condition on v' with shift threshold a/2
  const qac::LaguerreCheck check =
      qac::check_laguerre_condition(spec.potential.even_coeffs, spec.rigidity / 2.0);
  rep["laguerre_condition"] = qac::to_json(check);

  const int P = static_cast<int>(cfg.get_int("box", "P", 4));
  const int q = static_cast<int>(cfg.get_int("quadrature", "q", 16));
  std::vector<int> shape;
  for (int i = 0; i < spec.d; ++i)
    shape.push_back(static_cast<int>(cfg.get_int("box", "n" + std::to_string(i), 1)));
  const qac::Box box = qac::Box::rectangular(shape);
  const auto quad = qac::QuadratureScheme::gauss_hermite(q);

  qac::ModelSpec even = spec;
  even.potential.field = 0.0;
  rep["zeros"] = qac::to_json(qac::locate_partition_zeros(even, box, P, quad, truncation));

  std::vector<double> grid;
  const double hmax = cfg.get_num("leeyang", "hmax", 1.0);
  const int hn = static_cast<int>(cfg.get_int("leeyang", "hpoints", 21));
  for (int i = 0; i < hn; ++i) grid.push_back(-hmax + 2.0 * hmax * i / (hn - 1));
  const auto curve = qac::pressure_curve(even, box, P, grid, quad);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < curve.h.size(); ++i) rows.push_back({curve.h[i], curve.p[i]});
  paths.ensure();
  write_manifest(paths, cfg, 0);
  qac::write_csv(paths.file("pressure.csv").string(), {"h", "p"}, rows);
  write_json(paths.file("leeyang.json"), rep);
  return 0;
}

int run_pressure(const qac::Config& cfg, const RunPaths& paths) {
  const qac::ModelSpec spec = qac::model_from_config(cfg);
  const int P = static_cast<int>(cfg.get_int("box", "P", 4));
  const int q = static_cast<int>(cfg.get_int("quadrature", "q", 16));
  std::vector<int> shape;
  for (int i = 0; i < spec.d; ++i)
    shape.push_back(static_cast<int>(cfg.get_int("box", "n" + std::to_string(i), 1)));
  const double hmax = cfg.get_num("leeyang", "hmax", 1.0);
  const int hn = static_cast<int>(cfg.get_int("leeyang", "hpoints", 21));
  std::vector<double> grid;
  for (int i = 0; i < hn; ++i) grid.push_back(-hmax + 2.0 * hmax * i / (hn - 1));
  qac::ModelSpec even = spec;
  even.potential.field = 0.0;
  const auto curve = qac::pressure_curve(even, qac::Box::rectangular(shape), P, grid,
                                         qac::QuadratureScheme::gauss_hermite(q));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < curve.h.size(); ++i) rows.push_back({curve.h[i], curve.p[i]});
  paths.ensure();
  write_manifest(paths, cfg, 0);
  qac::write_csv(paths.file("pressure.csv").string(), {"h", "p"}, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum anharmonic crystal toolkit"};
  app.require_subcommand(0, 1);

  bool schema = false;
  app.add_flag("--schema", schema, "print JSON schemas for the emitted reports");

  std::string config_path, out_dir = ".", table;
  std::uint64_t seed = 0;
  int threads = 0, tau_points = 0, n_random = 0, truncation = 12;
  bool trace = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "model config file");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
  };

  auto* c_criteria = app.add_subcommand("criteria", "closed-form criteria report");
  add_common(c_criteria, true);
  c_criteria->add_option("--table", table, "sweep param:lo:hi:n into a CSV table");

  auto* c_spectrum = app.add_subcommand("spectrum", "one-site spectral quantities");
  add_common(c_spectrum, true);
  c_spectrum->add_option("--tau-points", tau_points, "emit Matsubara CSV on this tau grid");

  auto* c_simulate = app.add_subcommand("simulate", "path-integral Monte Carlo");
  add_common(c_simulate, true);
  c_simulate->add_option("--seed", seed, "master seed override");
  c_simulate->add_option("--threads", threads, "worker thread count");
  c_simulate->add_flag("--trace", trace, "write a per-sweep CSV trace");

  auto* c_verify = app.add_subcommand("verify", "correlation-inequality suite");
  add_common(c_verify, false);
  c_verify->add_option("--random", n_random, "random admissible instances per family");
  c_verify->add_option("--seed", seed, "random suite seed");

  auto* c_leeyang = app.add_subcommand("leeyang", "Lee-Yang condition and zeros");
  add_common(c_leeyang, true);
  c_leeyang->add_option("--truncation", truncation, "zero-location truncation order");

  auto* c_pressure = app.add_subcommand("pressure", "finite-volume pressure curve");
  add_common(c_pressure, true);

  CLI11_PARSE(app, argc, argv);

  if (schema) {
    std::cout << qac::output_schemas().dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    const RunPaths paths{fs::path(out_dir)};
    if (c_verify->parsed()) return run_verify(paths, n_random, seed);
    const qac::Config cfg = qac::Config::parse_file(config_path);
    if (c_criteria->parsed()) return run_criteria(cfg, paths, table);
    if (c_spectrum->parsed()) return run_spectrum(cfg, paths, tau_points);
    if (c_simulate->parsed()) return run_simulate(cfg, paths, seed, threads, trace);
    if (c_leeyang->parsed()) return run_leeyang(cfg, paths, truncation);
    if (c_pressure->parsed()) return run_pressure(cfg, paths);
  } catch (const qac::Error& e) {
    nlohmann::json err{{"error", e.message},
                       {"kind", e.kind == qac::Error::Kind::validation ? "validation" : "numeric"}};
    std::cerr << err.dump() << "\n";
    return e.kind == qac::Error::Kind::validation ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "internal"}}.dump() << "\n";
    return 2;
  }
  return 0;
}
