// End-to-end tests of the command-line tool. The last command-line argument
// (passed by CTest) is the path of the tool binary under test.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;  // tool binary under test
std::string g_dir;  // scratch directory for this test run

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string tmp_path(const std::string& name) { return g_dir + "/" + name; }

bool file_exists(const std::string& path) {
  return std::ifstream(path).good();
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

struct ToolRun {
  int code = -1;
  std::string out;
  std::string err;
};

ToolRun run_tool(const std::string& args) {
  static int seq = 0;
  const std::string out_path = tmp_path("cap_out_" + std::to_string(seq));
  const std::string err_path = tmp_path("cap_err_" + std::to_string(seq));
  ++seq;
  const std::string cmd =
      "'" + g_cli + "' " + args + " >'" + out_path + "' 2>'" + err_path + "'";
  const int status = std::system(cmd.c_str());
  ToolRun r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

nlohmann::json parse_json(const std::string& text) {
  return nlohmann::json::parse(text);
}

}  // namespace

TEST_CASE("--version reports the toolkit version") {
  const ToolRun r = run_tool("--version");
  CHECK(r.code == 0);
  CHECK(r.out == "1.0.0\n");
}

TEST_CASE("--help lists the subcommands") {
  const ToolRun r = run_tool("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("gamma") != std::string::npos);
  CHECK(r.out.find("simulate") != std::string::npos);
  CHECK(r.out.find("max-h") != std::string::npos);
}

TEST_CASE("invoking without a subcommand is an input error") {
  const ToolRun r = run_tool("");
  CHECK(r.code == 2);
}

TEST_CASE("gamma computes the residue gain and is byte-deterministic") {
  const std::string f1 = tmp_path("gamma1.json");
  const std::string f2 = tmp_path("gamma2.json");
  const ToolRun r1 =
      run_tool("gamma --q 0.1 --sigma 0.2 --N 3 --json-out '" + f1 + "'");
  const ToolRun r2 =
      run_tool("gamma --q 0.1 --sigma 0.2 --N 3 --json-out '" + f2 + "'");
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(f1) == slurp(f2));
  const nlohmann::json j = parse_json(slurp(f1));
  CHECK(j.at("gamma").get<double>() ==
        doctest::Approx(0.25531026929332773).epsilon(1e-11));
  CHECK(j.at("method") == "harmonic");
  CHECK(j.at("mu_rule").at("first_residual_mode") == 3);
}

TEST_CASE("gamma supports the Sobolev-bound method") {
  const ToolRun r = run_tool("gamma --q 1.1 --sigma 0 --N 20 --method sobolev");
  REQUIRE(r.code == 0);
  const nlohmann::json j = parse_json(r.out);
  CHECK(j.at("gamma").get<double>() ==
        doctest::Approx(0.10107372746599096).epsilon(1e-11));
  CHECK(j.at("mu_rule").at("Gamma").get<double>() == 20.0);
}

TEST_CASE("input errors exit with code 2") {
  CHECK(run_tool("gamma --q 0.1").code == 2);             // missing --N
  CHECK(run_tool("gamma --q 0.1 --N 3 --bogus 7").code == 2);
  const ToolRun r = run_tool("gamma --q 5 --sigma 0 --N 1");  // N^2 <= q
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("unwritable output paths exit with code 3") {
  const ToolRun r = run_tool(
      "gamma --q 0.1 --sigma 0.2 --N 3 --json-out "
      "/nonexistent-heatctrl-dir/out.json");
  CHECK(r.code == 3);
  CHECK(r.err.find("cannot write") != std::string::npos);
}

TEST_CASE("a config file reproduces the flag-based invocation exactly") {
  const std::string cfg = tmp_path("gamma.ini");
  spit(cfg, "[gamma]\nq=0.1\nsigma=0.2\nN=3\n");
  const ToolRun flags = run_tool("gamma --q 0.1 --sigma 0.2 --N 3");
  const ToolRun from_cfg = run_tool("--config '" + cfg + "' gamma");
  REQUIRE(flags.code == 0);
  REQUIRE(from_cfg.code == 0);
  CHECK(flags.out == from_cfg.out);
}

TEST_CASE("tables writes a CSV and a manifest that replays byte-identically") {
  const std::string csv = tmp_path("sigma.csv");
  const std::string manifest = tmp_path("sigma_manifest.json");
  const ToolRun r = run_tool("tables --kind sigma-table --q 0.1 --N-max 3 --out '" +
                             csv + "' --manifest '" + manifest + "'");
  REQUIRE(r.code == 0);
  REQUIRE(file_exists(csv));
  const std::string original = slurp(csv);
  CHECK(line_count(original) == 4);  // header + N = 1, 2, 3
  CHECK(original.rfind("N,sigma_max,gamma\n", 0) == 0);

  const nlohmann::json m = parse_json(slurp(manifest));
  CHECK(m.at("command") == "tables");
  CHECK(m.at("version") == "1.0.0");
  CHECK(m.at("parameters").at("kind") == "sigma-table");
  CHECK(m.at("duration_seconds").get<double>() >= 0.0);
  REQUIRE(m.at("outputs").size() == 1);
  CHECK(m.at("outputs")[0] == csv);

  std::remove(csv.c_str());
  REQUIRE_FALSE(file_exists(csv));
  const ToolRun replay = run_tool("replay --manifest '" + manifest + "'");
  REQUIRE(replay.code == 0);
  CHECK(slurp(csv) == original);
}

TEST_CASE("tables rejects an empty mode range") {
  const ToolRun r = run_tool(
      "tables --kind gamma-curve --q 1.1 --N-min 5 --N-max 3 --out '" +
      tmp_path("unused.csv") + "'");
  CHECK(r.code == 2);
}

TEST_CASE("tables gamma-curve lists both gain bounds") {
  const std::string csv = tmp_path("curve.csv");
  const ToolRun r = run_tool(
      "tables --kind gamma-curve --q 1.1 --sigma 0 --N-min 2 --N-max 4 --out '" +
      csv + "'");
  REQUIRE(r.code == 0);
  const std::string text = slurp(csv);
  CHECK(line_count(text) == 4);
  CHECK(text.rfind("N,gamma_harmonic,gamma_sobolev,ratio\n", 0) == 0);
  // Second line is the N = 2 row; its third field is the Sobolev bound.
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream fields(line);
  double N, gh, gs, ratio;
  REQUIRE((fields >> N >> gh >> gs >> ratio));
  CHECK(N == 2.0);
  CHECK(gs == doctest::Approx(1.4890723745461347).epsilon(1e-8));
  CHECK(ratio == doctest::Approx(gs / gh).epsilon(1e-8));
}

TEST_CASE("max-h finds a certified sampling period on a small interval") {
  const std::string out = tmp_path("maxh.json");
  const ToolRun r = run_tool(
      "max-h --q 0.1 --q-lmi 0.08 --sigma 0.2 --N 3 --tol 5e-3 --h-hi 0.02 "
      "--json-out '" + out + "'");
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const nlohmann::json j = parse_json(slurp(out));
  REQUIRE(j.at("feasible_design") == true);
  const double h_star = j.at("h_star").get<double>();
  CHECK(h_star >= 0.01);
  CHECK(h_star <= 0.02 + 1e-12);
  REQUIRE_FALSE(j.at("certificate").is_null());
  CHECK(j.at("certificate").at("lambda_max").get<double>() <= 1e-8);
  CHECK(j.at("certificate").at("min_eig_P_z").get<double>() > 0.0);
}

TEST_CASE("max-h warns when the reduced reaction coefficient is not reduced") {
  const ToolRun r = run_tool(
      "max-h --q 0.1 --q-lmi 0.2 --sigma 0.2 --N 3 --tol 5e-3 --h-hi 0.005");
  CHECK(r.code == 0);
  CHECK(r.err.find("strictly below") != std::string::npos);
}

TEST_CASE("simulate reports an infeasible design instead of failing") {
  const std::string csv = tmp_path("infeasible_trace.csv");
  const ToolRun r = run_tool(
      "simulate --q 0.1 --sigma 2 --N 3 --trace-out '" + csv + "'");
  REQUIRE(r.code == 0);
  const nlohmann::json j = parse_json(r.out);
  CHECK(j.at("feasible") == false);
  CHECK_FALSE(j.at("reason").get<std::string>().empty());
  CHECK_FALSE(file_exists(csv));
}

TEST_CASE("simulate accepts a tabulated initial condition") {
  const std::string ic = tmp_path("flat_ic.txt");
  spit(ic, "0, 1\n3.2, 1\n");
  const std::string trace = tmp_path("flat_trace.csv");
  const std::string snaps = tmp_path("flat_snaps.csv");
  const ToolRun r = run_tool(
      "simulate --q 0.1 --sigma 0.2 --N 3 --M 16 --P 64 --dt 1e-4 --T 0.01 "
      "--ic file --ic-file '" + ic + "' --snapshot-times 0 0.005 "
      "--trace-out '" + trace + "' --snapshots-out '" + snaps + "'");
  REQUIRE(r.code == 0);
  const nlohmann::json j = parse_json(r.out);
  CHECK(j.at("feasible") == true);
  CHECK(j.at("aborted") == false);
  // A constant unit field has mode norm sqrt(pi).
  CHECK(j.at("initial_state_norm").get<double>() ==
        doctest::Approx(std::sqrt(std::acos(-1.0))).epsilon(1e-9));
  const std::string trace_text = slurp(trace);
  CHECK(trace_text.rfind("t,state_norm,err_norm,u,y,zeta,V\n", 0) == 0);
  CHECK(line_count(trace_text) == 102);  // header + 101 samples
  CHECK(line_count(slurp(snaps)) == 1 + 2 * 101);  // two snapshots, 101 points
}

TEST_CASE("simulate rejects an initial-condition file with too few samples") {
  const std::string ic = tmp_path("short_ic.txt");
  spit(ic, "0 1\n");
  const ToolRun r = run_tool(
      "simulate --q 0.1 --sigma 0.2 --N 3 --T 0.01 --ic file --ic-file '" +
      ic + "' --trace-out '" + tmp_path("unused_trace.csv") + "'");
  CHECK(r.code == 2);
}

TEST_CASE("replay failure modes") {
  const std::string garbled = tmp_path("garbled.json");
  spit(garbled, "this is not json");
  CHECK(run_tool("replay --manifest '" + garbled + "'").code == 3);

  const std::string keyless = tmp_path("keyless.json");
  spit(keyless, "{\"parameters\": {}}");
  const ToolRun missing = run_tool("replay --manifest '" + keyless + "'");
  CHECK(missing.code == 3);
  CHECK(missing.err.find("malformed manifest") != std::string::npos);

  const std::string unknown = tmp_path("unknown_cmd.json");
  spit(unknown, "{\"command\": \"bogus\", \"parameters\": {}}");
  CHECK(run_tool("replay --manifest '" + unknown + "'").code == 2);

  CHECK(run_tool("replay --manifest '" + tmp_path("absent.json") + "'").code ==
        3);
}

int main(int argc, char** argv) {
  if (argc > 1 && argv[argc - 1][0] != '-') {
    g_cli = argv[argc - 1];
    --argc;
  }
  if (g_cli.empty()) {
    std::cerr << "usage: test_cli [doctest options] <path-to-tool>\n";
    return 1;
  }
  char dir_template[] = "/tmp/heatctrl_cli_test_XXXXXX";
  if (mkdtemp(dir_template) == nullptr) {
    std::cerr << "cannot create scratch directory\n";
    return 1;
  }
  g_dir = dir_template;
  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
