#pragma once

// JSON and CSV renderings of library results for knudsen_jump.

#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "knudsen/knudsen.hpp"

namespace knudsen::report {

using json = nlohmann::ordered_json;

/// Shortest round-trip text of a double; empty for NaN or a missing value.
inline std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string status_of(const JumpResult& jr) {
  if (jr.solvable) return "ok";
  if (jr.regime == Regime::NoSolution) return "no_solution";
  return "needs_free_parameters";
}

inline json jump_json(const JumpResult& jr) {
  json j;
  j["status"] = status_of(jr);
  j["U"] = jr.U;
  j["regime"] = std::string(to_string(jr.regime));
  j["eps_T"] = opt(jr.eps_T);
  j["eps_rho"] = opt(jr.eps_rho);
  j["K"] = opt(jr.K);
  j["R"] = opt(jr.R);
  j["c0"] = opt(jr.c0);
  j["c1"] = opt(jr.c1);
  j["c2"] = opt(jr.c2);
  json res = json::array();
  for (const auto& r : jr.residuals) res.push_back({{"root", r.root}, {"x_value", r.x_value}, {"residual", r.residual}});
  j["residuals"] = res;
  j["v1"] = opt(jr.v1);
  j["v_at_u"] = opt(jr.v_at_u);
  if (!jr.message.empty()) j["message"] = jr.message;
  if (!jr.diagnostics.empty()) {
    json d = json::object();
    for (const auto& [k, v] : jr.diagnostics) d[k] = v;
    j["diagnostics"] = d;
  }
  return j;
}

/// Failure record for errors raised before a result exists.
inline json error_json(const std::string& status, const std::string& message, std::optional<double> U = {}) {
  json j;
  j["status"] = status;
  if (U) j["U"] = *U;
  j["message"] = message;
  return j;
}

inline const char* scan_header = "U,regime,status,eps_T,eps_rho,K,R,max_residual,message";

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

struct ScanRow {
  double U = 0.0;
  std::optional<JumpResult> result;
  std::string status;  ///< set when result is absent (thrown error)
  std::string regime;
  std::string message;
};

inline std::string scan_csv_row(const ScanRow& r) {
  std::string s = num(r.U) + ",";
  if (r.result) {
    const JumpResult& jr = *r.result;
    s += std::string(to_string(jr.regime)) + "," + status_of(jr) + "," + num(jr.eps_T) + "," + num(jr.eps_rho) + "," +
         num(jr.K) + "," + num(jr.R) + "," + (jr.solvable ? num(jr.max_residual()) : std::string()) + "," +
         csv_field(jr.message);
  } else {
    s += r.regime + "," + r.status + ",,,,,," + csv_field(r.message);
  }
  return s;
}

inline json scan_json_row(const ScanRow& r) {
  if (r.result) return jump_json(*r.result);
  json j = error_json(r.status, r.message, r.U);
  j["regime"] = r.regime;
  return j;
}

inline const char* profile_header = "x,rho_ratio,u,t_ratio,identity1_residual,identity2_residual";

template <class Grid>
void profile_csv(std::ostream& os, const Grid& g) {
  os << profile_header << '\n';
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    os << num(g.x[i]) << ',' << num(g.rho_ratio[i]) << ',' << num(g.u[i]) << ',' << num(g.t_ratio[i]) << ','
       << num(g.identity1_residual[i]) << ',' << num(g.identity2_residual[i]) << '\n';
  }
}

template <class Grid>
json profile_json(double U, const Grid& g) {
  json j;
  j["status"] = "ok";
  j["U"] = U;
  j["x"] = g.x;
  j["rho_ratio"] = g.rho_ratio;
  j["u"] = g.u;
  j["t_ratio"] = g.t_ratio;
  j["identity1_residual"] = g.identity1_residual;
  j["identity2_residual"] = g.identity2_residual;
  return j;
}

inline const char* dispersion_header = "mu,lambda,s,theta";

inline void dispersion_csv(std::ostream& os, const std::vector<DispersionSample>& samples) {
  os << dispersion_header << '\n';
  for (const auto& s : samples)
    os << num(s.mu) << ',' << num(s.lambda_pv) << ',' << num(s.s) << ',' << num(s.theta) << '\n';
}

inline json dispersion_json(double U, const std::vector<DispersionSample>& samples) {
  json j;
  j["status"] = "ok";
  j["U"] = U;
  json rows = json::array();
  for (const auto& s : samples)
    rows.push_back({{"mu", s.mu}, {"lambda", s.lambda_pv}, {"s", s.s}, {"theta", std::isnan(s.theta) ? json(nullptr) : json(s.theta)}});
  j["samples"] = rows;
  return j;
}

inline json oracle_json(const OracleSolution& s) {
  json j;
  j["status"] = "ok";
  j["U"] = s.U;
  j["eps_T_fit"] = s.eps_T_fit;
  j["eps_rho_fit"] = s.eps_rho_fit;
  j["farfield_residual"] = s.farfield_residual;
  j["L"] = s.L;
  j["nodes"] = s.nodes;
  j["iterations"] = s.iterations;
  j["cells"] = s.cells;
  j["method"] = s.method;
  if (s.eps_T_2L != 0.0 || s.eps_rho_2L != 0.0) {
    j["doubled_L"] = {{"eps_T_fit", s.eps_T_2L}, {"eps_rho_fit", s.eps_rho_2L}, {"sensitivity", s.L_sensitivity}};
  }
  return j;
}

}  // namespace knudsen::report
