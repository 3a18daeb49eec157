#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cda/expansion.hpp"
#include "cli.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cda_cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("expand on the exact family") {
  auto r = run_cli({"expand", "--dist", "centered_exponential", "--order", "4",
                    "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["coefficients"].size() == 5);
  CHECK(j["coefficients"][1].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  for (int n = 2; n <= 4; ++n)
    CHECK(std::fabs(j["coefficients"][n].get<double>()) <= 1e-6);
  CHECK(j["config"]["dist"] == "centered_exponential");
  CHECK(j["config"]["order"] == 4);
  CHECK(j["diagnostics"].contains("beta1_first_order"));
}

TEST_CASE("expand JSON round-trips and matches the library bit-for-bit") {
  auto r = run_cli({"expand", "--dist", "gaussian", "--order", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  auto rep = cda::beta_series(cda::IncrementModel::make("gaussian"), 3);
  for (int n = 0; n <= 3; ++n)
    CHECK(j["coefficients"][n].get<double>() == rep.coefficients[n]);
  // serialization identity
  json again = json::parse(j.dump(2));
  CHECK(again == j);
}

TEST_CASE("rho command emits value plus identity diagnostics") {
  auto r = run_cli({"rho", "--dist", "laplace", "--theta", "0.1", "--b", "0.2",
                    "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["coefficients"].empty());
  CHECK(j["error_bounds"].empty());
  CHECK(j.contains("value"));
  CHECK(std::fabs(j["diagnostics"]["identity_residual"].get<double>()) < 1e-7);
  CHECK(std::fabs(j["diagnostics"]["imag_residue"].get<double>()) < 1e-7);
}

TEST_CASE("usage and rejection exit codes") {
  CHECK(run_cli({"tail", "--dist", "gaussian", "--delta", "0", "--x", "3"}).code == 4);
  CHECK(run_cli({"tail", "--dist", "gaussian", "--x", "3"}).code == 4);
  CHECK(run_cli({"tail", "--dist", "gaussian", "--delta", "0.1", "--mu", "0.1",
                 "--x", "3"}).code == 4);
  CHECK(run_cli({"expand", "--dist", "poisson"}).code == 2);
  CHECK(run_cli({"expand", "--dist", "shifted_gamma:shape=0.2"}).code == 2);
  CHECK(run_cli({"expand", "--dist", "gaussian", "--no-such-flag", "1"}).code == 4);
  CHECK(run_cli({"expand", "--dist", "gaussian", "--order", "40"}).code == 4);
  CHECK(run_cli({"nosuchcommand"}).code == 4);
}

TEST_CASE("tail command output") {
  auto r = run_cli({"tail", "--dist", "centered_exponential", "--delta", "0.2",
                    "--x", "10", "--order", "4", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["approximations"]["corrected_orderN"].get<double>() ==
        doctest::Approx(std::exp(-2.2)).epsilon(1e-5));
  CHECK(j["approximations"].contains("diffusion"));
  CHECK(j["diagnostics"]["radius_warning"].get<double>() == 0.0);
}

TEST_CASE("cumulants csv has one row per (n, j)") {
  auto r = run_cli({"cumulants", "--dist", "gaussian", "--nmax", "2", "--jmax", "1",
                    "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "n,j,value,error");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("mean-max and ladder evaluation hooks") {
  auto r = run_cli({"mean-max", "--dist", "centered_exponential", "--order", "4",
                    "--delta", "0.1", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["diagnostics"]["eval_mean_max"].get<double>() ==
        doctest::Approx(std::exp(-0.1) / 0.1).epsilon(1e-6));
  auto l = run_cli({"ladder", "--dist", "gaussian", "--order", "4", "--theta1",
                    "0.05", "--format", "json"});
  REQUIRE(l.code == 0);
  json lj = json::parse(l.out);
  CHECK(lj["diagnostics"]["eval_ladder_mean"].get<double>() ==
        doctest::Approx(0.728).epsilon(1e-2));
  CHECK(run_cli({"ladder", "--dist", "centered_exponential"}).code == 4);
}

TEST_CASE("validate reports three tiers and passes") {
  auto r = run_cli({"validate", "--dist", "laplace", "--delta", "0.1", "--order", "4",
                    "--mc", "20000", "--seed", "42", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["grid"].size() == 3);
  CHECK(j["convergence"].size() == 2);
  CHECK(j["pass"]["all"].get<bool>());
  CHECK(j["mc"]["overshoot_z"].get<double>() <= 3.0);
  CHECK(j["mc"]["lindley_z"].get<double>() <= 3.0);
  for (const auto& row : j["grid"])
    CHECK(std::fabs(row["identity_residual"].get<double>()) <= 2e-8);
}

TEST_CASE("byte-identical reports for identical flags and seed") {
  std::vector<std::string> args{"validate", "--dist",  "centered_uniform",
                                "--delta",  "0.1",     "--order",
                                "4",        "--mc",    "5000",
                                "--seed",   "7",       "--format",
                                "json"};
  auto a = run_cli(args);
  auto b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("config file supplies defaults, flags override") {
  std::string path = "cda_test_config.json";
  {
    std::ofstream f(path);
    f << "{\"dist\": \"centered_exponential\", \"order\": 3, \"format\": \"json\"}\n";
  }
  auto r = run_cli({"expand", "--config", path});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["order"] == 3);
  CHECK(j["config"]["dist"] == "centered_exponential");
  auto o = run_cli({"expand", "--config", path, "--order", "2"});
  REQUIRE(o.code == 0);
  CHECK(json::parse(o.out)["config"]["order"] == 2);
  std::remove(path.c_str());
}

TEST_CASE("--out writes the report to a file") {
  std::string path = "cda_test_out.json";
  auto r = run_cli({"expand", "--dist", "gaussian", "--order", "2", "--format",
                    "json", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  REQUIRE(f.good());
  json j;
  f >> j;
  CHECK(j["config"]["dist"] == "gaussian");
  std::remove(path.c_str());
}

TEST_CASE("text format renders the coefficient table") {
  auto r = run_cli({"expand", "--dist", "gaussian", "--order", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("command: expand") != std::string::npos);
  CHECK(r.out.find("coefficient") != std::string::npos);
}

TEST_SUITE_END();
