// knudsen_jump: jumps, sweeps, profiles, dispersion samples and slab-oracle
// runs for the linearized evaporation/condensation half-space problem.
//
// Exit codes: 0 ok, 1 bad flags, 2 regime error (no solution, boundary speed,
// missing free parameters), 3 numerical failure.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "report.hpp"

using namespace knudsen;
using report::json;

namespace {

struct Config {
  std::string command;
  std::string format = "auto";
  std::string output;

  std::optional<double> speed, eps_rho, eps_T;
  double mu_max = 0.0;  // 0: automatic
  double quad_tol = 1e-12;

  double from = 0.05, to = 0.70;
  int steps = 14;

  double xmax = 20.0;
  int points = 0;  // 0: 64 for profiles, 200 for dispersion
  std::optional<double> mu_min;

  OracleOptions oracle;
  std::string method = "direct";

  std::optional<double> velocity, temperature, gas_constant, collision_frequency, density, x, length;

  unsigned threads = 1;

  std::string resolved_format() const {
    if (format != "auto") return format;
    return command == "jumps" || command == "oracle" || command == "convert" ? "json" : "csv";
  }
  int resolved_points() const { return points > 0 ? points : command == "dispersion" ? 200 : 64; }

  FactorOptions factor() const {
    FactorOptions f;
    f.mu_max = mu_max;
    f.quad.abs_tol = quad_tol;
    f.quad.rel_tol = quad_tol;
    return f;
  }

  json to_json() const {
    json j;
    j["command"] = command.empty() ? json(nullptr) : json(command);
    j["format"] = resolved_format();
    j["output"] = output.empty() ? json(nullptr) : json(output);
    j["speed"] = report::opt(speed);
    j["eps_rho"] = report::opt(eps_rho);
    j["eps_t"] = report::opt(eps_T);
    j["mu_max"] = mu_max > 0.0 ? json(mu_max) : json("auto");
    j["quad_tol"] = quad_tol;
    j["quad_floor"] = factor().quad.floor;
    j["quad_max_panels"] = factor().quad.max_panels;
    j["scan"] = {{"from", from}, {"to", to}, {"steps", steps}};
    j["xmax"] = xmax;
    j["points"] = resolved_points();
    j["mu_min"] = mu_min ? json(*mu_min) : json("-U");
    j["oracle"] = {{"slab_length", oracle.L},
                   {"nodes", oracle.nodes},
                   {"cells", oracle.cells},
                   {"grading", oracle.grading},
                   {"mu_margin", oracle.mu_margin},
                   {"method", method},
                   {"max_iterations", oracle.max_iterations},
                   {"tolerance", oracle.tolerance},
                   {"max_condition", oracle.max_condition},
                   {"double_L", oracle.double_L}};
    j["threads"] = threads;
    return j;
  }
};

struct FlagError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("KNUDSEN_JUMP_THREADS");
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw FlagError("KNUDSEN_JUMP_THREADS must be a positive integer");
  return static_cast<unsigned>(std::min<long>(n, 4096));
}

double need_speed(const Config& c) {
  if (!c.speed) throw FlagError("--speed is required");
  if (!std::isfinite(*c.speed)) throw FlagError("--speed must be finite");
  return *c.speed;
}

JumpRequest request(const Config& c, double U) { return {U, c.eps_rho, c.eps_T}; }

// an output sink that either hits stdout or the --output file
struct Output {
  std::ostringstream buf;
  void flush(const Config& c) {
    if (c.output.empty()) {
      std::cout << buf.str();
      std::cout.flush();
      return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw FlagError("cannot open --output " + c.output);
    f << buf.str();
  }
};

void emit_json(Output& out, const json& j) { out.buf << j.dump(2) << '\n'; }

int run_jumps(const Config& c, Output& out) {
  const double U = need_speed(c);
  const JumpResult jr = solve_jumps(request(c, U), c.factor());
  if (c.resolved_format() == "json") {
    emit_json(out, report::jump_json(jr));
  } else {
    out.buf << report::scan_header << '\n' << report::scan_csv_row({U, jr, "", "", ""}) << '\n';
  }
  return jr.solvable ? 0 : 2;
}

report::ScanRow scan_row(const Config& c, double U) {
  report::ScanRow row;
  row.U = U;
  try {
    row.result = solve_jumps(request(c, U), c.factor());
  } catch (const RegimeError& e) {
    row.status = "regime_error";
    row.message = e.what();
  } catch (const NumericalError& e) {
    row.status = "numerical_error";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  if (!row.result) row.regime = std::string(to_string(classify_regime(U)));
  return row;
}

int run_scan(const Config& c, Output& out) {
  double from = c.from, to = c.to;
  int steps = c.steps;
  if (c.speed) {
    from = to = *c.speed;
    steps = 1;
  }
  if (steps < 1) throw FlagError("--steps must be at least 1");
  if (!std::isfinite(from) || !std::isfinite(to)) throw FlagError("scan bounds must be finite");
  std::vector<double> us(steps);
  for (int i = 0; i < steps; ++i) us[i] = steps == 1 ? from : i + 1 == steps ? to : from + (to - from) * i / (steps - 1);

  std::vector<report::ScanRow> rows(us.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < us.size();) rows[i] = scan_row(c, us[i]);
  };
  const unsigned n = std::min<unsigned>(c.threads, static_cast<unsigned>(us.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (c.resolved_format() == "json") {
    json j;
    j["status"] = "ok";
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(report::scan_json_row(r));
    j["rows"] = arr;
    emit_json(out, j);
  } else {
    out.buf << report::scan_header << '\n';
    for (const auto& r : rows) out.buf << report::scan_csv_row(r) << '\n';
  }
  return 0;
}

int run_profiles(const Config& c, Output& out) {
  const double U = need_speed(c);
  const JumpResult jr = solve_jumps(request(c, U), c.factor());
  if (!jr.solvable) {
    if (c.resolved_format() == "json") emit_json(out, report::error_json(report::status_of(jr), jr.message, U));
    std::cerr << "knudsen_jump: " << jr.message << '\n';
    return 2;
  }
  const auto tab = build_continuum_table(jr);
  const auto g = compute_profiles(default_profile_x(c.xmax, c.resolved_points()), tab);
  if (c.resolved_format() == "json") {
    emit_json(out, report::profile_json(U, g));
  } else {
    report::profile_csv(out.buf, g);
  }
  return 0;
}

int run_dispersion(const Config& c, Output& out) {
  const double U = need_speed(c);
  const double mm = c.mu_max > 0.0 ? c.mu_max : default_mu_max(U);
  const auto samples =
      dispersion_samples(U, mm, c.resolved_points(), c.mu_min.value_or(std::numeric_limits<double>::quiet_NaN()));
  if (c.resolved_format() == "json") {
    emit_json(out, report::dispersion_json(U, samples));
  } else {
    report::dispersion_csv(out.buf, samples);
  }
  return 0;
}

int run_oracle(const Config& c, Output& out) {
  const double U = need_speed(c);
  OracleOptions o = c.oracle;
  if (c.method == "direct") {
    o.method = OracleMethod::Direct;
  } else if (c.method == "source-iteration") {
    o.method = OracleMethod::SourceIteration;
  } else {
    throw FlagError("--method must be direct or source-iteration");
  }
  const Regime reg = classify_regime(U);
  if (reg == Regime::NoSolution) throw RegimeError("oracle: no decaying solution exists for U > sqrt(3/2)");
  OracleSolution s;
  if (c.eps_rho && c.eps_T) {
    s = check_pair(U, *c.eps_T, *c.eps_rho, o);
  } else if (U > 0.0) {
    s = fit_jumps(U, o);
  } else if (reg == Regime::OneParameterCondensation && c.eps_rho) {
    s = fit_eps_T(U, *c.eps_rho, o);
  } else if (reg == Regime::DiscreteBoundary) {
    throw RegimeError("oracle: U = " + std::to_string(U) + " is a regime boundary");
  } else {
    const std::string msg = reg == Regime::OneParameterCondensation
                                ? "one-parameter condensation family: eps_rho must be supplied"
                                : "two-parameter condensation family: eps_T and eps_rho must be supplied";
    if (c.resolved_format() == "json") emit_json(out, report::error_json("needs_free_parameters", msg, U));
    std::cerr << "knudsen_jump: " << msg << '\n';
    return 2;
  }
  if (c.resolved_format() == "json") {
    emit_json(out, report::oracle_json(s));
  } else {
    report::profile_csv(out.buf, oracle_profiles(s));
  }
  return 0;
}

int run_convert(const Config& c, Output& out) {
  if (!c.temperature || !c.gas_constant) throw FlagError("convert needs --temperature and --gas-constant");
  if (c.speed.has_value() == c.velocity.has_value()) throw FlagError("convert needs exactly one of --speed, --velocity");
  if ((c.x || c.length) && !c.collision_frequency) throw FlagError("--x and --length need --collision-frequency");
  if (c.x && c.length) throw FlagError("give at most one of --x, --length");
  PhysicalScales ps;
  ps.T_inf = *c.temperature;
  ps.R_gas = *c.gas_constant;
  ps.nu = c.collision_frequency.value_or(1.0);
  ps.rho_inf = c.density.value_or(1.0);
  ps.v_inf = c.velocity ? *c.velocity : u_to_speed(*c.speed, ps.R_gas, ps.T_inf);
  ps.validate();

  json j;
  j["status"] = "ok";
  j["U"] = ps.dimensionless_speed();
  j["v_inf"] = ps.v_inf;
  j["T_inf"] = ps.T_inf;
  j["R_gas"] = ps.R_gas;
  j["thermal_speed"] = ps.thermal_speed();
  if (c.density) j["rho_inf"] = ps.rho_inf;
  if (c.collision_frequency) {
    j["nu"] = ps.nu;
    j["length_unit"] = ps.length_unit();
  }
  if (c.x) {
    j["x"] = *c.x;
    j["x_phys"] = ps.physical_x(*c.x);
  }
  if (c.length) {
    j["x"] = ps.dimensionless_x(*c.length);
    j["x_phys"] = *c.length;
  }
  if (c.resolved_format() == "json") {
    emit_json(out, j);
  } else {
    std::string head, row;
    for (const auto& [k, v] : j.items()) {
      if (k == "status") continue;
      head += (head.empty() ? "" : ",") + k;
      row += (row.empty() ? "" : ",") + report::num(v.get<double>());
    }
    out.buf << head << '\n' << row << '\n';
  }
  return 0;
}

// errors keep a status field in JSON output; CSV output stays empty
int fail(const Config& c, const std::string& status, const std::string& what, int code) {
  std::cerr << "knudsen_jump: " << what << '\n';
  if (c.resolved_format() == "json") {
    Output err;
    emit_json(err, report::error_json(status, what, c.speed));
    try {
      err.flush(c);
    } catch (const std::exception&) {
    }
  }
  return code;
}

void add_speed(CLI::App* s, Config& c, const char* what = "dimensionless drift speed U") {
  s->add_option("--speed", c.speed, what);
}

void add_eps(CLI::App* s, Config& c) {
  s->add_option("--eps-rho", c.eps_rho, "density jump (free parameter in condensation)");
  s->add_option("--eps-t", c.eps_T, "temperature jump (free parameter for U < -sqrt(3/2))");
}

void add_factor(CLI::App* s, Config& c) {
  s->add_option("--mu-max", c.mu_max, "cut truncation (0 = automatic)")->check(CLI::NonNegativeNumber);
  s->add_option("--quad-tol", c.quad_tol, "absolute and relative quadrature tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  bool print_config = false;

  CLI::App app{"Temperature and density jumps for the linearized evaporation/condensation problem"};
  app.add_option("--format", c.format, "csv or json (default depends on the command)")
      ->check(CLI::IsMember({"auto", "csv", "json"}));
  app.add_option("--output", c.output, "write to PATH instead of stdout");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  auto* jumps = app.add_subcommand("jumps", "jumps at one speed (JSON)");
  add_speed(jumps, c);
  add_eps(jumps, c);
  add_factor(jumps, c);

  auto* scan = app.add_subcommand("scan", "jumps over a range of speeds (CSV)");
  scan->add_option("--from", c.from, "first speed");
  scan->add_option("--to", c.to, "last speed");
  scan->add_option("--steps", c.steps, "number of speeds");
  add_speed(scan, c, "single speed (overrides --from/--to/--steps)");
  add_eps(scan, c);
  add_factor(scan, c);

  auto* profiles = app.add_subcommand("profiles", "density, velocity and temperature profiles (CSV)");
  add_speed(profiles, c);
  add_eps(profiles, c);
  add_factor(profiles, c);
  profiles->add_option("--xmax", c.xmax, "last x (mean free paths)")->check(CLI::PositiveNumber);
  profiles->add_option("--points", c.points, "number of log-spaced x values from 1e-3")->check(CLI::Range(2, 1000000));

  auto* dispersion = app.add_subcommand("dispersion", "lambda, s and theta along the real axis (CSV)");
  add_speed(dispersion, c);
  dispersion->add_option("--mu-max", c.mu_max, "last mu (0 = automatic)")->check(CLI::NonNegativeNumber);
  dispersion->add_option("--mu-min", c.mu_min, "first mu (default -U)");
  dispersion->add_option("--points", c.points, "number of samples")->check(CLI::Range(2, 10000000));

  auto* oracle = app.add_subcommand("oracle", "discrete-ordinates slab fit of the jumps (JSON)");
  add_speed(oracle, c);
  add_eps(oracle, c);
  oracle->add_option("--slab-length", c.oracle.L, "slab length L")->check(CLI::PositiveNumber);
  oracle->add_option("--nodes", c.oracle.nodes, "mu ordinates (multiple of 4)")->check(CLI::Range(8, 100000));
  oracle->add_option("--cells", c.oracle.cells, "x cells")->check(CLI::Range(4, 100000));
  oracle->add_option("--method", c.method, "direct or source-iteration")
      ->check(CLI::IsMember({"direct", "source-iteration"}));
  oracle->add_option("--max-iterations", c.oracle.max_iterations, "source-iteration cap")->check(CLI::PositiveNumber);
  oracle->add_option("--tolerance", c.oracle.tolerance, "source-iteration tolerance")->check(CLI::PositiveNumber);
  bool single_L = false;
  oracle->add_flag("--no-double-l", single_L, "skip the 2L sensitivity rerun");

  auto* convert = app.add_subcommand("convert", "physical scales to U and back (JSON)");
  add_speed(convert, c, "dimensionless speed U to convert to m/s");
  convert->add_option("--velocity", c.velocity, "drift speed in m/s to convert to U");
  convert->add_option("--temperature", c.temperature, "T_inf in K");
  convert->add_option("--gas-constant", c.gas_constant, "specific gas constant R in J/(kg K)");
  convert->add_option("--collision-frequency", c.collision_frequency, "nu in 1/s");
  convert->add_option("--density", c.density, "rho_inf (carried through)");
  convert->add_option("--x", c.x, "dimensionless distance to convert to metres");
  convert->add_option("--length", c.length, "distance in metres to convert to mean free paths");

  // --format, --output and --print-config may follow the subcommand
  for (auto* s : app.get_subcommands({})) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "knudsen_jump: " << e.what() << '\n';
    return 1;
  }
  c.oracle.double_L = !single_L;
  for (auto* s : app.get_subcommands()) c.command = s->get_name();

  Output out;
  try {
    c.threads = thread_cap();
    if (print_config) {
      emit_json(out, c.to_json());
      out.flush(c);
      return 0;
    }
    if (c.command.empty()) throw FlagError("a subcommand is required (jumps, scan, profiles, dispersion, oracle, convert)");
    int code = 0;
    if (c.command == "jumps") code = run_jumps(c, out);
    if (c.command == "scan") code = run_scan(c, out);
    if (c.command == "profiles") code = run_profiles(c, out);
    if (c.command == "dispersion") code = run_dispersion(c, out);
    if (c.command == "oracle") code = run_oracle(c, out);
    if (c.command == "convert") code = run_convert(c, out);
    out.flush(c);
    return code;
  } catch (const RegimeError& e) {
    return fail(c, "regime_error", e.what(), 2);
  } catch (const NumericalError& e) {
    return fail(c, "numerical_error", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    std::cerr << "knudsen_jump: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "knudsen_jump: " << e.what() << '\n';
    return 1;
  }
}
