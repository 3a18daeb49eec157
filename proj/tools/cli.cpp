#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cda/expansion.hpp"
#include "cda/mc.hpp"

namespace cda_cli {

using nlohmann::json;
using namespace cda;

namespace {

struct RunConfig {
  std::string command;
  std::string dist;
  int order = 5;
  int nmax = 4, jmax = 4;
  double tol = 1e-10;
  double direct_tol = 1e-8;
  double lambda0 = 0.25;
  double lambda_max = 50.0;
  int taylor_order = 48;
  double delta = 0.0;
  double theta = -1.0;
  double theta0 = 0.0;
  double mu = 0.0;
  double b = 0.0;
  double x = 0.0;
  double theta1 = 0.0;
  std::uint64_t mc = 100000;
  std::uint64_t seed = 12345;
  std::string format = "text";
  std::string out_path;
  std::string config_path;
};

ExpansionConfig expansion_config(const RunConfig& rc) {
  ExpansionConfig cfg;
  cfg.quad_tol = rc.tol;
  cfg.direct_tol = rc.direct_tol;
  cfg.lambda0 = rc.lambda0;
  cfg.taylor_order = rc.taylor_order;
  cfg.split = rc.lambda_max;
  return cfg;
}

QuadOptions direct_options(const RunConfig& rc) {
  QuadOptions o;
  o.tol = rc.direct_tol;
  o.split = rc.lambda_max;
  return o;
}

void check_bounds(const RunConfig& rc) {
  auto fail = [](const std::string& m) { throw CLI::ValidationError("config", m); };
  if (rc.tol < 1e-14 || rc.tol > 1e-2) fail("--tol must lie in [1e-14, 1e-2]");
  if (rc.direct_tol < 1e-14 || rc.direct_tol > 1e-2)
    fail("--direct-tol must lie in [1e-14, 1e-2]");
  if (rc.lambda0 <= 0.0 || rc.lambda0 > 2.0) fail("--lambda0 must lie in (0, 2]");
  if (rc.lambda_max < 10.0 || rc.lambda_max > 6400.0)
    fail("--lambda-max must lie in [10, 6400]");
  if (rc.taylor_order < 16 || rc.taylor_order > 96)
    fail("--taylor-order must lie in [16, 96]");
  if (rc.order < 1 || rc.order > 12) fail("--order must lie in [1, 12]");
  if (rc.nmax < 1 || rc.nmax > 8 || rc.jmax < 0 || rc.jmax > 8)
    fail("--nmax/--jmax must lie in [1,8] / [0,8]");
  if (rc.mc < 100) fail("--mc must be at least 100");
}

json config_json(const RunConfig& rc) {
  json c;
  c["command"] = rc.command;
  c["dist"] = rc.dist;
  c["order"] = rc.order;
  c["nmax"] = rc.nmax;
  c["jmax"] = rc.jmax;
  c["tol"] = rc.tol;
  c["direct_tol"] = rc.direct_tol;
  c["lambda0"] = rc.lambda0;
  c["lambda_max"] = rc.lambda_max;
  c["taylor_order"] = rc.taylor_order;
  c["delta"] = rc.delta;
  c["theta"] = rc.theta;
  c["theta0"] = rc.theta0;
  c["mu"] = rc.mu;
  c["b"] = rc.b;
  c["x"] = rc.x;
  c["theta1"] = rc.theta1;
  c["mc"] = rc.mc;
  c["seed"] = rc.seed;
  c["format"] = rc.format;
  return c;
}

json report_skeleton(const RunConfig& rc) {
  json r;
  r["command"] = rc.command;
  r["coefficients"] = json::array();
  r["error_bounds"] = json::array();
  r["config"] = config_json(rc);
  r["diagnostics"] = json::object();
  return r;
}

void put_expansion(json& r, const ExpansionReport& rep) {
  r["coefficients"] = rep.coefficients;
  r["error_bounds"] = rep.error_bounds;
  for (const auto& [k, v] : rep.diagnostics) r["diagnostics"][k] = v;
}

// --- command implementations -----------------------------------------------

json cmd_expand(const RunConfig& rc) {
  auto model = IncrementModel::make(rc.dist);
  auto rep = beta_series(model, rc.order, expansion_config(rc));
  json r = report_skeleton(rc);
  put_expansion(r, rep);
  r["diagnostics"]["nonlattice_gate_min"] = model.nonlattice_gate_min();
  return r;
}

json cmd_cumulants(const RunConfig& rc) {
  auto model = IncrementModel::make(rc.dist);
  auto table = kappa_table(model, rc.nmax, rc.jmax, expansion_config(rc));
  json r = report_skeleton(rc);
  json rows = json::array();
  std::vector<double> coef, err;
  for (int n = 1; n <= table.n_max; ++n) {
    coef.push_back(table.at(n, 0).value);
    err.push_back(table.at(n, 0).error);
    for (int j = 0; j <= table.j_max; ++j) {
      json row;
      row["n"] = n;
      row["j"] = j;
      row["value"] = table.at(n, j).value;
      row["error"] = table.at(n, j).error;
      rows.push_back(row);
    }
  }
  r["coefficients"] = coef;  // kappa_n(0)
  r["error_bounds"] = err;
  r["table"] = rows;
  return r;
}

json cmd_mean_max(const RunConfig& rc) {
  auto model = IncrementModel::make(rc.dist);
  auto rep = mean_max_series(model, rc.order, expansion_config(rc));
  json r = report_skeleton(rc);
  put_expansion(r, rep);
  if (rc.delta > 0.0) {
    r["diagnostics"]["eval_delta"] = rc.delta;
    r["diagnostics"]["eval_mean_max"] = mean_max_eval(rep, rc.delta);
  }
  return r;
}

json cmd_ladder(const RunConfig& rc) {
  auto model = IncrementModel::make(rc.dist);
  auto rep = ladder_series(model, rc.order, expansion_config(rc));
  json r = report_skeleton(rc);
  put_expansion(r, rep);
  if (rc.theta1 > 0.0) {
    r["diagnostics"]["eval_theta1"] = rc.theta1;
    r["diagnostics"]["eval_ladder_mean"] = ladder_eval(rep, rc.theta1);
  }
  return r;
}

json cmd_tail(const RunConfig& rc, bool has_delta, bool has_theta0, bool has_mu) {
  if (int(has_delta) + int(has_theta0) + int(has_mu) != 1)
    throw CLI::ValidationError("tail", "give exactly one of --delta, --theta0, --mu");
  auto model = IncrementModel::make(rc.dist);
  DriftSpec drift;
  if (has_delta) {
    drift = {DriftKind::delta, rc.delta};
  } else if (has_theta0) {
    drift = {DriftKind::theta0, rc.theta0};
  } else {
    drift = {DriftKind::mu, rc.mu};
  }
  auto t = tail_approx(model, drift, rc.x, rc.order, expansion_config(rc));
  json r = report_skeleton(rc);
  r["coefficients"] = t.r;
  r["error_bounds"] = t.r_err;
  json a;
  a["diffusion"] = t.diffusion;
  a["corrected_order1"] = t.corrected_order1;
  a["corrected_orderN"] = t.corrected_orderN;
  r["approximations"] = a;
  r["diagnostics"]["delta"] = t.delta;
  r["diagnostics"]["theta0"] = t.theta0;
  r["diagnostics"]["theta1"] = t.theta1;
  r["diagnostics"]["mu"] = t.mu;
  r["diagnostics"]["sigma2"] = t.sigma2;
  r["diagnostics"]["delta_max_validated"] = t.delta_max;
  r["diagnostics"]["radius_warning"] = t.radius_warning ? 1.0 : 0.0;
  return r;
}

json cmd_rho(const RunConfig& rc) {
  if (rc.theta < 0.0) throw CLI::ValidationError("rho", "--theta must be >= 0");
  if (!(rc.b > 0.0)) throw CLI::ValidationError("rho", "--b must be > 0");
  auto model = IncrementModel::make(rc.dist);
  QuadOptions qo = direct_options(rc);
  KernelConfig kc{rc.lambda0, rc.taylor_order};
  auto rho = rho_direct(model, rc.theta, rc.b, qo, kc);
  json r = report_skeleton(rc);
  r["value"] = rho.value;
  r["error"] = rho.error;
  r["diagnostics"]["evaluations"] = double(rho.evals);
  r["diagnostics"]["lambda_split"] = rho.lambda_max;
  if (rc.theta > 0.0) {
    auto s = s_direct(model, rc.b, qo, kc);
    auto i = i_direct(model, rc.theta, rc.b, qo, kc);
    r["diagnostics"]["s_direct"] = s.value;
    r["diagnostics"]["i_direct"] = i.value;
    r["diagnostics"]["identity_residual"] = rho.value - s.value - i.value;
    auto resid = j0_imag_residue(rc.b, log_rho_kernel(model, rc.theta, kc), qo);
    r["diagnostics"]["imag_residue"] = resid.value;
  }
  return r;
}

json cmd_validate(const RunConfig& rc) {
  if (!(rc.delta > 0.0)) throw CLI::ValidationError("validate", "--delta must be > 0");
  auto model = IncrementModel::make(rc.dist);
  ExpansionConfig cfg = expansion_config(rc);
  QuadOptions qo = direct_options(rc);
  KernelConfig kc = cfg.kernel_config();
  auto beta = beta_series(model, rc.order, cfg);

  std::vector<double> grid{0.05, 0.1, 0.2};
  if (std::find(grid.begin(), grid.end(), rc.delta) == grid.end()) {
    grid.push_back(rc.delta);
    std::sort(grid.begin(), grid.end());
  }

  json r = report_skeleton(rc);
  r["coefficients"] = beta.coefficients;
  r["error_bounds"] = beta.error_bounds;
  for (const auto& [k, v] : beta.diagnostics) r["diagnostics"][k] = v;

  json rows = json::array();
  std::vector<double> errs, deltas;
  for (double d : grid) {
    double th1 = model.conjugate_theta1(d);
    auto rho = rho_direct(model, th1, d, qo, kc);
    auto s = s_direct(model, d, qo, kc);
    auto i = i_direct(model, th1, d, qo, kc);
    double series = 0.0, dp = 1.0;
    for (int n = 1; n <= rc.order; ++n) {
      dp *= d;
      series += beta.coefficients[n] * dp;
    }
    json row;
    row["delta"] = d;
    row["theta1"] = th1;
    row["rho_direct"] = rho.value;
    row["rho_error"] = rho.error;
    row["series"] = series;
    row["abs_diff"] = std::fabs(rho.value - series);
    row["identity_residual"] = rho.value - s.value - i.value;
    rows.push_back(row);
    errs.push_back(std::fabs(rho.value - series));
    deltas.push_back(d);
  }
  r["grid"] = rows;

  json conv = json::array();
  bool conv_ok = true;
  for (size_t i = 0; i + 1 < deltas.size(); ++i) {
    double dhi = deltas[i + 1], dlo = deltas[i];
    double ehi = errs[i + 1], elo = errs[i];
    double floor_hi = 0.0, floor_lo = 0.0, dp = 1.0, dq = 1.0;
    for (int n = 1; n <= rc.order; ++n) {
      dp *= dhi;
      dq *= dlo;
      floor_hi += beta.error_bounds[n] * dp;
      floor_lo += beta.error_bounds[n] * dq;
    }
    floor_hi = 3.0 * (floor_hi + 2.0 * rc.direct_tol);
    floor_lo = 3.0 * (floor_lo + 2.0 * rc.direct_tol);
    bool below = ehi <= floor_hi && elo <= floor_lo;
    double order = std::log2(ehi / std::max(elo, 1e-300)) /
                   std::log2(dhi / dlo);
    bool pass = below || order >= rc.order + 0.5;
    conv_ok = conv_ok && pass;
    json c;
    c["delta_hi"] = dhi;
    c["delta_lo"] = dlo;
    c["order"] = order;
    c["below_noise_floor"] = below;
    c["pass"] = pass;
    conv.push_back(c);
  }
  r["convergence"] = conv;

  double th1 = model.conjugate_theta1(rc.delta);
  auto ov = overshoot_transform(model, th1, rc.delta, 50.0, rc.mc, rc.seed);
  auto ov2 = overshoot_transform(model, th1, rc.delta, 100.0, rc.mc, rc.seed + 1);
  auto rho_here = rho_direct(model, th1, rc.delta, qo, kc);
  double target = std::exp(rho_here.value);
  json mc;
  mc["overshoot_mean"] = ov.mean;
  mc["overshoot_se"] = ov.std_error;
  mc["overshoot_target"] = target;
  mc["overshoot_z"] = std::fabs(ov.mean - target) / ov.std_error;
  mc["overshoot_x100_mean"] = ov2.mean;  // stationarity diagnostic
  mc["overshoot_x100_shift_z"] =
      std::fabs(ov.mean - ov2.mean) /
      std::sqrt(ov.std_error * ov.std_error + ov2.std_error * ov2.std_error);
  auto mm = mean_max_series(model, rc.order, cfg);
  auto lind = lindley_mean(model, th1 - rc.delta, std::max<std::uint64_t>(rc.mc / 10, 1000),
                           rc.seed + 2);
  double mm_val = mean_max_eval(mm, rc.delta);
  mc["lindley_mean"] = lind.mean;
  mc["lindley_se"] = lind.std_error;
  mc["mean_max_series"] = mm_val;
  mc["lindley_z"] = std::fabs(lind.mean - mm_val) / lind.std_error;
  r["mc"] = mc;

  bool z_ok = mc["overshoot_z"].get<double>() <= 3.0 && mc["lindley_z"].get<double>() <= 3.0;
  r["pass"] = json::object();
  r["pass"]["convergence"] = conv_ok;
  r["pass"]["mc_z"] = z_ok;
  r["pass"]["all"] = conv_ok && z_ok;
  return r;
}

// --- rendering ---------------------------------------------------------------

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void render_text(const json& r, std::ostream& os) {
  const std::string cmd = r["command"].get<std::string>();
  os << "command: " << cmd << "\n";
  os << "dist:    " << r["config"]["dist"].get<std::string>() << "\n";
  if (r.contains("value")) {
    os << "value:   " << fmt(r["value"].get<double>())
       << "   (error estimate " << fmt(r["error"].get<double>()) << ")\n";
  }
  const auto& coef = r["coefficients"];
  if (!coef.empty()) {
    os << "n  coefficient          error_bound\n";
    for (size_t n = 0; n < coef.size(); ++n) {
      os << n << "  " << fmt(coef[n].get<double>()) << "  "
         << fmt(r["error_bounds"][n].get<double>()) << "\n";
    }
  }
  if (r.contains("approximations")) {
    for (auto& [k, v] : r["approximations"].items())
      os << k << ": " << fmt(v.get<double>()) << "\n";
  }
  if (r.contains("table")) {
    os << "n  j  kappa_n^(j)(0)     error\n";
    for (const auto& row : r["table"])
      os << row["n"].get<int>() << "  " << row["j"].get<int>() << "  "
         << fmt(row["value"].get<double>()) << "  " << fmt(row["error"].get<double>())
         << "\n";
  }
  if (r.contains("grid")) {
    os << "delta  rho_direct        series            abs_diff   identity_residual\n";
    for (const auto& row : r["grid"])
      os << fmt(row["delta"].get<double>()) << "  " << fmt(row["rho_direct"].get<double>())
         << "  " << fmt(row["series"].get<double>()) << "  "
         << fmt(row["abs_diff"].get<double>()) << "  "
         << fmt(row["identity_residual"].get<double>()) << "\n";
  }
  if (r.contains("convergence")) {
    for (const auto& c : r["convergence"])
      os << "order(" << fmt(c["delta_hi"].get<double>()) << "->"
         << fmt(c["delta_lo"].get<double>()) << ") = " << fmt(c["order"].get<double>())
         << (c["below_noise_floor"].get<bool>() ? " (below noise floor)" : "")
         << (c["pass"].get<bool>() ? " pass" : " FAIL") << "\n";
  }
  if (r.contains("mc")) {
    for (auto& [k, v] : r["mc"].items()) os << k << ": " << fmt(v.get<double>()) << "\n";
  }
  if (r.contains("pass"))
    os << "all checks: " << (r["pass"]["all"].get<bool>() ? "pass" : "FAIL") << "\n";
  if (!r["diagnostics"].empty()) {
    os << "diagnostics:\n";
    for (auto& [k, v] : r["diagnostics"].items())
      os << "  " << k << ": " << fmt(v.get<double>()) << "\n";
  }
}

void render_csv(const json& r, std::ostream& os) {
  if (r.contains("table")) {
    os << "n,j,value,error\n";
    for (const auto& row : r["table"])
      os << row["n"].get<int>() << "," << row["j"].get<int>() << ","
         << fmt(row["value"].get<double>()) << "," << fmt(row["error"].get<double>())
         << "\n";
    return;
  }
  if (r.contains("approximations")) {
    os << "name,value\n";
    for (auto& [k, v] : r["approximations"].items())
      os << k << "," << fmt(v.get<double>()) << "\n";
    return;
  }
  if (r.contains("value")) {
    os << "name,value\n";
    os << "value," << fmt(r["value"].get<double>()) << "\n";
    os << "error," << fmt(r["error"].get<double>()) << "\n";
    return;
  }
  os << "index,coefficient,error_bound\n";
  const auto& coef = r["coefficients"];
  for (size_t n = 0; n < coef.size(); ++n)
    os << n << "," << fmt(coef[n].get<double>()) << ","
       << fmt(r["error_bounds"][n].get<double>()) << "\n";
}

void emit(const json& r, const RunConfig& rc, std::ostream& out) {
  std::ostringstream buf;
  if (rc.format == "json") {
    buf << r.dump(2) << "\n";
  } else if (rc.format == "csv") {
    render_csv(r, buf);
  } else {
    render_text(r, buf);
  }
  if (!rc.out_path.empty()) {
    std::ofstream f(rc.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output path: " + rc.out_path);
    f << buf.str();
  } else {
    out << buf.str();
  }
}

std::string json_to_flag_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;

  CLI::App app{"corrected diffusion approximations for random-walk maxima"};
  app.require_subcommand(1);

  // Optional JSON config file; explicit flags take precedence.
  std::vector<std::string> argv = args;
  for (size_t i = 0; i + 1 < argv.size(); ++i) {
    if (argv[i] == "--config") {
      rc.config_path = argv[i + 1];
      break;
    }
  }
  if (!rc.config_path.empty() && !argv.empty()) {
    std::ifstream f(rc.config_path);
    if (!f) {
      err << "cannot read config file: " << rc.config_path << "\n";
      return 4;
    }
    json conf;
    try {
      f >> conf;
    } catch (const std::exception& e) {
      err << "config parse error: " << e.what() << "\n";
      return 4;
    }
    std::vector<std::string> merged{argv[0]};
    for (auto& [k, v] : conf.items()) {
      merged.push_back("--" + k);
      merged.push_back(json_to_flag_value(v));
    }
    merged.insert(merged.end(), argv.begin() + 1, argv.end());
    argv = std::move(merged);
  }

  auto add_common = [&](CLI::App* cmd, bool needs_dist = true) {
    auto* d = cmd->add_option("--dist", rc.dist,
                              "distribution spec, e.g. gaussian, centered_exponential, "
                              "laplace, centered_uniform, shifted_gamma:shape=4");
    if (needs_dist) d->required();
    d->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    for (auto* o : {cmd->add_option("--tol", rc.tol, "coefficient quadrature tolerance"),
                    cmd->add_option("--direct-tol", rc.direct_tol,
                                    "direct-evaluation quadrature tolerance"),
                    cmd->add_option("--lambda0", rc.lambda0, "kernel Taylor switch radius"),
                    cmd->add_option("--lambda-max", rc.lambda_max,
                                    "direct panel span before the compactified tail")})
      o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--taylor-order", rc.taylor_order, "kernel Taylor order")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--seed", rc.seed, "base seed for all randomness")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--mc", rc.mc, "Monte Carlo sample count")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--format", rc.format, "output format: json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--out", rc.out_path, "write the report to this path")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", rc.config_path, "JSON config file (flags override)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto take_last = [](CLI::Option* o) {
    o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    return o;
  };

  auto* expand = app.add_subcommand("expand", "r(Delta) expansion coefficients");
  add_common(expand);
  take_last(expand->add_option("--order", rc.order, "expansion order (default 5)"));

  auto* cumulants = app.add_subcommand("cumulants", "overshoot cumulant table kappa_n^(j)(0)");
  add_common(cumulants);
  take_last(cumulants->add_option("--nmax", rc.nmax, "max cumulant order"));
  take_last(cumulants->add_option("--jmax", rc.jmax, "max theta-derivative order"));

  auto* meanmax = app.add_subcommand("mean-max", "expansion of E M = 1/Delta + c0 + c1 Delta + ...");
  add_common(meanmax);
  take_last(meanmax->add_option("--order", rc.order, "series order (default 4)"));
  take_last(meanmax->add_option("--delta", rc.delta, "optional evaluation point"));

  auto* ladder = app.add_subcommand("ladder", "ladder-height mean series (symmetric families)");
  add_common(ladder);
  take_last(ladder->add_option("--order", rc.order, "series order (default 5)"));
  take_last(ladder->add_option("--theta1", rc.theta1, "optional evaluation point"));

  auto* tail = app.add_subcommand("tail", "tail approximations at level x");
  add_common(tail);
  take_last(tail->add_option("--order", rc.order, "correction order (default 4)"));
  auto* tdelta = take_last(tail->add_option("--delta", rc.delta, "drift via Delta > 0"));
  auto* ttheta0 = take_last(tail->add_option("--theta0", rc.theta0, "drift via theta0 < 0"));
  auto* tmu = take_last(tail->add_option("--mu", rc.mu, "drift via mu = -psi'(theta0) > 0"));
  take_last(tail->add_option("--x", rc.x, "level x > 0")->required());

  auto* rho = app.add_subcommand("rho", "direct quadrature of rho(theta, b)");
  add_common(rho);
  take_last(rho->add_option("--theta", rc.theta, "tilt theta >= 0")->required());
  take_last(rho->add_option("--b", rc.b, "transform argument b > 0")->required());

  auto* validate = app.add_subcommand("validate", "three-tier comparison table");
  add_common(validate);
  take_last(validate->add_option("--order", rc.order, "expansion order (default 4)"));
  take_last(validate->add_option("--delta", rc.delta, "MC comparison point (default 0.1)"));

  try {
    std::vector<const char*> cargv;
    cargv.push_back("cda");
    for (const auto& a : argv) cargv.push_back(a.c_str());
    app.parse(int(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    app.exit(e, out, err);
    return 4;
  }

  try {
    json r;
    if (app.got_subcommand(expand)) {
      rc.command = "expand";
      if (expand->count("--order") == 0) rc.order = 5;
      check_bounds(rc);
      r = cmd_expand(rc);
    } else if (app.got_subcommand(cumulants)) {
      rc.command = "cumulants";
      check_bounds(rc);
      r = cmd_cumulants(rc);
    } else if (app.got_subcommand(meanmax)) {
      rc.command = "mean-max";
      if (meanmax->count("--order") == 0) rc.order = 4;
      check_bounds(rc);
      r = cmd_mean_max(rc);
    } else if (app.got_subcommand(ladder)) {
      rc.command = "ladder";
      if (ladder->count("--order") == 0) rc.order = 5;
      check_bounds(rc);
      r = cmd_ladder(rc);
    } else if (app.got_subcommand(tail)) {
      rc.command = "tail";
      if (tail->count("--order") == 0) rc.order = 4;
      check_bounds(rc);
      r = cmd_tail(rc, tdelta->count() > 0, ttheta0->count() > 0, tmu->count() > 0);
    } else if (app.got_subcommand(rho)) {
      rc.command = "rho";
      check_bounds(rc);
      r = cmd_rho(rc);
    } else if (app.got_subcommand(validate)) {
      rc.command = "validate";
      if (validate->count("--order") == 0) rc.order = 4;
      if (validate->count("--delta") == 0) rc.delta = 0.1;
      check_bounds(rc);
      r = cmd_validate(rc);
    }
    emit(r, rc, out);
    return 0;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 4;
  } catch (const ModelError& e) {
    err << "rejected distribution: " << e.what() << "\n";
    return 2;
  } catch (const ContractionError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const McBudgetError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cda_cli
