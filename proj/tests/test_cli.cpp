#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "digitprime/serialize.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string tmp = (fs::temp_directory_path() / "digitprime_cli_out.txt").string();
  std::string cmd = std::string(DIGITPRIME_CLI_PATH) + " " + args + " >" + tmp + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream f(tmp);
  std::stringstream ss;
  ss << f.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli count: success, contradiction, size guard") {
  auto ok = run_cli("count --n 14 --A 0:1");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("ratio=") != std::string::npos);

  CHECK(run_cli("count --n 14 --A 0:0").exit_code == 2);
  CHECK(run_cli("count --n 40 --A 0:1").exit_code == 1);
  CHECK(run_cli("count --n 26 --A 0:1").exit_code == 1);   // sieve/theorem guard
  CHECK(run_cli("count --n 14").exit_code == 2);           // missing required flag
}

TEST_CASE("cli lemma: ids, pass states, bad id") {
  CHECK(run_cli("lemma --id 1 --n 16 --A 0:1,5:1 --C 4").exit_code == 0);
  CHECK(run_cli("lemma --id 4 --n 25 --A 0:1 --q 3 --a 1").exit_code == 0);
  CHECK(run_cli("lemma --id 3 --n 16 --A 0:1 --Q 2").exit_code == 0);
  CHECK(run_cli("lemma --id 5 --n 16 --A 0:1").exit_code == 2);
  CHECK(run_cli("lemma --id 2 --n 8 --A 0:1 --grid 128").exit_code == 2);
}

TEST_CASE("cli characters: identity sweep summary") {
  auto r = run_cli("characters --q 45");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("max discrepancies") != std::string::npos);
  CHECK(run_cli("characters --q 20000").exit_code == 1);
}

TEST_CASE("cli pipeline: report, config echo, plot data") {
  fs::path dir = fs::temp_directory_path() / "digitprime_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path out = dir / "run.json";

  auto r = run_cli("pipeline --n 12 --A 0:1 --samples 5 --out " + out.string());
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(out));
  auto j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.contains("rows"));
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0]["pipeline"]["n"] == 12);
  CHECK(j["rows"][0]["theorem"].contains("ratio"));
  CHECK(j["rows"][0]["assumption_a"]["pass"] == j["rows"][0]["assumption_a"]["total"]);

  REQUIRE(fs::exists(out.string() + ".config.json"));
  auto cfg = nlohmann::json::parse(slurp(out.string() + ".config.json"));
  CHECK(cfg["command"] == "pipeline");
  CHECK(cfg.contains("seed"));
  CHECK(cfg["params"]["n"] == 12);

  // sweep: csv report plus a plot file with #-prefixed headers
  fs::path sweep_out = dir / "sweep.csv";
  auto rs = run_cli("pipeline --sweep 10:12 --A 0:1 --samples 0 --format csv --out " +
                    sweep_out.string());
  CHECK(rs.exit_code == 0);
  std::string csv = slurp(sweep_out);
  CHECK(csv.rfind("n,r,A,B,direct,main,residual,rel_residual,kappa_sum,"
                  "exact_count,asymptotic,ratio", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 3);
  std::string plot = slurp(sweep_out.string() + ".plot.txt");
  CHECK(plot.rfind("# ", 0) == 0);
  CHECK(plot.find("\n10 ") != std::string::npos);
  CHECK(plot.find("\n12 ") != std::string::npos);

  // missing output directory
  CHECK(run_cli("pipeline --n 10 --A 0:1 --samples 0 --out " +
                (dir / "missing" / "x.json").string()).exit_code == 2);
  fs::remove_all(dir);
}

TEST_CASE("report json schemas are stable") {
  using digitprime::json;

  auto c = digitprime::make_constraint(12, {0, 3}, {1, 1});
  json jc = c;
  for (const char* key : {"text", "n", "positions", "assignments", "r", "rho"})
    CHECK(jc.contains(key));

  json jl = digitprime::lemma1_check(c, 4.0);
  for (const char* key :
       {"lemma", "n", "rho", "params", "computed", "bound", "C", "min_constant", "pass", "flags"})
    CHECK(jl.contains(key));

  json jch = digitprime::character_group(12)[1];
  for (const char* key : {"q", "conductor", "exponent_vector", "primitive"})
    CHECK(jch.contains(key));

  json jt = digitprime::verify_gauss_factorization(digitprime::character_group(12)[1]);
  for (const char* key : {"identity", "q", "q1", "q2", "k", "vanishing_case", "max_discrepancy"})
    CHECK(jt.contains(key));

  auto t = digitprime::build_sieve(1 << 12);
  json jp = digitprime::main_term_pipeline(c, t);
  for (const char* key : {"n", "r", "constraint", "B", "direct", "main_term", "residual",
                          "rel_residual", "kappa_sum", "major_arc_measure", "arcs_disjoint"})
    CHECK(jp.contains(key));

  json ja = digitprime::assumption_a_check(c, 3, t);
  for (const char* key : {"q0", "count", "expected", "actual", "kappa", "bound", "pass"})
    CHECK(ja.contains(key));
}

TEST_CASE("cli count emits stable csv columns") {
  fs::path dir = fs::temp_directory_path() / "digitprime_cli_test2";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path out = dir / "count.csv";
  auto r = run_cli("count --n 12 --A 0:1 --format csv --out " + out.string());
  CHECK(r.exit_code == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("n,r,A,B,", 0) == 0);
  CHECK(csv.find("\"n=12;A=0:1\"") != std::string::npos);
  fs::remove_all(dir);
}
