#include "qac/report.hpp"

#include <cstdio>
#include <fstream>

namespace qac {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const ValidationReport& r) {
  json j;
  j["passes"] = r.passes;
  j["lower_bound"] = {{"A", r.lower_A}, {"B", r.lower_B}, {"r", r.lower_r}};
  j["upper_envelope"] = {{"even_coeffs", r.upper_env_coeffs}, {"field", r.upper_env_field}};
  j["j_hat_zero"] = r.j_hat_zero;
  j["diagnostics"] = r.diagnostics;
  return j;
}

json to_json(const CriterionReport& r) {
  json j;
  j["theta_d"] = r.theta_d;
  j["theta_d_error"] = r.theta_d_error;
  if (r.t_star) j["t_star"] = *r.t_star;
  if (r.beta_star) j["beta_star"] = *r.beta_star;
  if (r.beta_star_residual) j["beta_star_residual"] = *r.beta_star_residual;
  j["delta_gap"] = r.delta_gap;
  j["m_delta_sq"] = r.m_delta_sq;
  j["j_hat_zero"] = r.j_hat_zero;
  j["phase_transition_predicted"] = r.phase_transition_predicted;
  j["phase_transition_threshold"] = r.phase_transition_threshold;
  j["quantum_stabilization"] = r.quantum_stabilization;
  if (r.nn_stabilization) j["nn_stabilization"] = *r.nn_stabilization;
  if (r.nn_threshold) j["nn_threshold"] = *r.nn_threshold;
  if (r.high_T_unique) j["high_T_unique"] = *r.high_T_unique;
  if (r.high_T_beta_max) j["high_T_beta_max"] = *r.high_T_beta_max;
  if (r.alpha_window) j["alpha_window"] = *r.alpha_window;
  return j;
}

json to_json(const InequalityReport& r) {
  static const char* status_names[] = {"pass", "fail", "invalid_input", "vacuous_pass"};
  json j;
  j["inequality"] = r.inequality;
  j["instance"] = r.instance;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["status"] = status_names[static_cast<int>(r.status)];
  j["method"] = r.method;
  if (r.method == "mc") j["mc_sigma"] = r.mc_sigma;
  return j;
}

json to_json(const Estimate& e) {
  return json{{"value", e.value}, {"std_error", e.std_error}, {"ess", e.ess},
              {"n_chains", e.n_chains}};
}

json to_json(const ZeroClassification& z) {
  static const char* verdicts[] = {"consistent", "violation", "vacuous"};
  json roots = json::array();
  for (const auto& r : z.roots) roots.push_back({{"re", r.real()}, {"im", r.imag()}});
  json in_trust = json::array();
  for (const auto& r : z.roots_in_trust) in_trust.push_back({{"re", r.real()}, {"im", r.imag()}});
  return json{{"verdict", verdicts[static_cast<int>(z.verdict)]},
              {"trust_radius", z.trust_radius},
              {"truncation_order", z.truncation_order},
              {"roots", roots},
              {"roots_in_trust", in_trust},
              {"moments", z.moments}};
}

json to_json(const LaguerreCheck& c) {
  json j;
  j["member"] = c.member;
  if (c.shift) j["shift"] = *c.shift;
  if (c.witness) {
    j["witness"] = {{"phi0", c.witness->phi0},
                    {"gamma0", c.witness->gamma0},
                    {"n", c.witness->n},
                    {"gammas", c.witness->gammas}};
  }
  if (c.offending_root)
    j["offending_root"] = {{"re", c.offending_root->real()}, {"im", c.offending_root->imag()}};
  return j;
}

json to_json(const VanHoveReport& v) {
  json entries = json::array();
  for (const auto& e : v.entries) {
    entries.push_back({{"n_sites", e.n_sites},
                       {"p", e.p},
                       {"p_decoupled", e.p_decoupled},
                       {"coupling_bound", e.coupling_bound},
                       {"monotone_ok", e.monotone_ok}});
  }
  return json{{"entries", entries}, {"pressures_nondecreasing", v.pressures_nondecreasing}};
}

json run_manifest(const Config& cfg, std::uint64_t seed) {
  return json{{"config_digest", cfg.digest()}, {"seed", seed}, {"version", kVersion}};
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) fail_validation("cannot open output file: " + path);
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << quote(header[i]);
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g17(row[i]);
    out << "\r\n";
  }
}

json output_schemas() {
  auto num = [] { return json{{"type", "number"}}; };
  auto boolean = [] { return json{{"type", "boolean"}}; };
  json criterion = {
      {"type", "object"},
      {"properties",
       {{"theta_d", num()},
        {"theta_d_error", num()},
        {"t_star", num()},
        {"beta_star", num()},
        {"beta_star_residual", num()},
        {"delta_gap", num()},
        {"m_delta_sq", num()},
        {"j_hat_zero", num()},
        {"phase_transition_predicted", boolean()},
        {"phase_transition_threshold", num()},
        {"quantum_stabilization", boolean()},
        {"nn_stabilization", boolean()},
        {"nn_threshold", num()},
        {"high_T_unique", boolean()},
        {"high_T_beta_max", num()},
        {"alpha_window", num()}}},
      {"required", json::array({"theta_d", "delta_gap", "j_hat_zero"})}};
  json spectrum = {{"type", "object"},
                   {"properties",
                    {{"energies", {{"type", "array"}, {"items", num()}}},
                     {"gap", num()},
                     {"gap_index", {{"type", "integer"}}},
                     {"K_upp", num()},
                     {"variance", num()}}},
                   {"required", json::array({"energies", "gap", "gap_index"})}};
  json estimate = {{"type", "object"},
                   {"properties",
                    {{"value", num()},
                     {"std_error", num()},
                     {"ess", num()},
                     {"n_chains", {{"type", "integer"}}}}}};
  json inequality = {{"type", "object"},
                     {"properties",
                      {{"inequality", {{"type", "string"}}},
                       {"instance", {{"type", "string"}}},
                       {"lhs", num()},
                       {"rhs", num()},
                       {"margin", num()},
                       {"tolerance", num()},
                       {"status", {{"type", "string"}}},
                       {"method", {{"type", "string"}}}}}};
  json manifest = {{"type", "object"},
                   {"properties",
                    {{"config_digest", {{"type", "string"}}},
                     {"seed", {{"type", "integer"}}},
                     {"version", {{"type", "string"}}}}},
                   {"required", json::array({"config_digest", "seed", "version"})}};
  return json{{"criteria", criterion},
              {"spectrum", spectrum},
              {"estimate", estimate},
              {"inequality", inequality},
              {"manifest", manifest}};
}

}  // namespace qac
