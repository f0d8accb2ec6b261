// Command-line front end for the boundary-control synthesis toolkit.
//
// Subcommands: gamma, synthesize, tables, simulate, max-h, replay.
// Exit codes: 0 = computed (an infeasible design is a result, not a
// failure), 2 = invalid input, 3 = I/O failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "heatctrl/io.hpp"
#include "heatctrl/lmi.hpp"
#include "heatctrl/modal.hpp"
#include "heatctrl/residue_gain.hpp"
#include "heatctrl/riccati.hpp"
#include "heatctrl/sim.hpp"
#include "heatctrl/synthesis.hpp"

namespace {

using heatctrl::GainMethod;
using heatctrl::kGammaDigits;
using heatctrl::kMatrixDigits;
using heatctrl::PlantParams;
using heatctrl::round_sig;
using heatctrl::RunManifest;
using nlohmann::ordered_json;

GainMethod parse_method(const std::string& name) {
  if (name == "harmonic") return GainMethod::harmonic;
  if (name == "sobolev") return GainMethod::sobolev;
  throw std::invalid_argument("unknown gain method: " + name);
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

class ManifestTimer {
 public:
  ManifestTimer(std::string command, ordered_json parameters)
      : start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.parameters = std::move(parameters);
  }
  void add_output(const std::string& path) { manifest_.outputs.push_back(path); }
  void write(const std::string& path) {
    if (path.empty()) return;
    manifest_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    heatctrl::write_manifest(path, manifest_);
  }

 private:
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- gamma --

struct GammaArgs {
  double q = 0.0;
  double sigma = 0.0;
  int N = 1;
  std::string method = "harmonic";
  std::string json_out;
  std::string manifest;
};

ordered_json gamma_params(const GammaArgs& a) {
  return {{"q", a.q},
          {"sigma", a.sigma},
          {"N", a.N},
          {"method", a.method},
          {"json_out", a.json_out}};
}

GammaArgs gamma_from_params(const ordered_json& p) {
  GammaArgs a;
  a.q = p.at("q");
  a.sigma = p.at("sigma");
  a.N = p.at("N");
  a.method = p.at("method");
  a.json_out = p.value("json_out", std::string());
  return a;
}

int run_gamma(const GammaArgs& a) {
  ManifestTimer timer("gamma", gamma_params(a));
  const heatctrl::GainBreakdown g = a.method == "sobolev"
                                        ? heatctrl::gamma_sobolev(a.q, a.sigma, a.N)
                                        : heatctrl::gamma_harmonic(a.q, a.sigma, a.N);
  ordered_json j;
  j["command"] = "gamma";
  j["q"] = a.q;
  j["sigma"] = a.sigma;
  j["N"] = a.N;
  j["gamma"] = round_sig(g.gamma, kGammaDigits);
  j["method"] = heatctrl::to_string(g.method);
  if (g.method == GainMethod::harmonic) {
    j["mu_rule"] = {{"form", "mu_n = gamma*(pi/2)*(n^2 - q - sigma)"},
                    {"q_plus_sigma", round_sig(g.q_plus_sigma, kGammaDigits)},
                    {"first_residual_mode", g.N}};
  } else {
    j["mu_rule"] = {{"form", "mu_n = (pi/2)*(1/pi + Gamma + n^2/Gamma)"},
                    {"Gamma", round_sig(g.big_gamma, kGammaDigits)},
                    {"first_residual_mode", g.N}};
  }
  print_json(j);
  if (!a.json_out.empty()) {
    heatctrl::write_json(a.json_out, j);
    timer.add_output(a.json_out);
  }
  timer.write(a.manifest);
  return 0;
}

// ----------------------------------------------------------- synthesize --

struct SynthArgs {
  double q = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  int N = 1;
  std::string method = "harmonic";
  std::string json_out;
  std::string manifest;
};

ordered_json synth_params(const SynthArgs& a) {
  return {{"q", a.q},     {"sigma", a.sigma},   {"alpha", a.alpha},
          {"N", a.N},     {"method", a.method}, {"json_out", a.json_out}};
}

SynthArgs synth_from_params(const ordered_json& p) {
  SynthArgs a;
  a.q = p.at("q");
  a.sigma = p.at("sigma");
  a.alpha = p.value("alpha", 0.0);
  a.N = p.at("N");
  a.method = p.at("method");
  a.json_out = p.value("json_out", std::string());
  return a;
}

ordered_json synthesis_json(const heatctrl::FeasibilityReport& report) {
  const heatctrl::SynthesisResult& r = report.result;
  ordered_json j;
  j["feasible"] = r.feasible;
  j["reason"] = heatctrl::to_string(r.reason);
  j["gamma"] = round_sig(r.gamma, kGammaDigits);
  j["rho_xz"] = r.rho_xz > 0.0 ? ordered_json(round_sig(r.rho_xz, kMatrixDigits))
                               : ordered_json(nullptr);
  if (r.feasible) {
    j["K"] = heatctrl::vector_json(r.K.transpose());
    j["L"] = heatctrl::vector_json(r.L);
    j["X"] = heatctrl::matrix_json(r.X);
    j["Z"] = heatctrl::matrix_json(r.Z);
    j["Y"] = heatctrl::matrix_json(r.Y);
    try {
      j["M_constant"] = round_sig(
          heatctrl::stability_constant(r.X, r.Y, r.gamma), kGammaDigits);
    } catch (const std::invalid_argument&) {
      j["M_constant"] = nullptr;  // sigma = 0: padded Y is only PSD
    }
  } else {
    j["K"] = nullptr;
    j["L"] = nullptr;
    j["X"] = nullptr;
    j["Z"] = nullptr;
    j["Y"] = nullptr;
    j["M_constant"] = nullptr;
  }
  return j;
}

int run_synthesize(const SynthArgs& a) {
  ManifestTimer timer("synthesize", synth_params(a));
  PlantParams params;
  params.q = a.q;
  params.sigma = a.sigma;
  params.alpha = a.alpha;
  const heatctrl::FeasibilityReport report =
      heatctrl::synthesize(params, a.N, parse_method(a.method));
  ordered_json j;
  j["command"] = "synthesize";
  j["q"] = a.q;
  j["sigma"] = a.sigma;
  j["alpha"] = a.alpha;
  j["N"] = a.N;
  j["method"] = a.method;
  j.update(synthesis_json(report));
  print_json(j);
  if (!a.json_out.empty()) {
    heatctrl::write_json(a.json_out, j);
    timer.add_output(a.json_out);
  }
  timer.write(a.manifest);
  return 0;
}

// --------------------------------------------------------------- tables --

struct TablesArgs {
  std::string kind;
  double q = 0.0;
  double sigma = 0.0;
  int N_min = 2;
  int N_max = 6;
  std::string out;
  std::string manifest;
};

ordered_json tables_params(const TablesArgs& a) {
  return {{"kind", a.kind}, {"q", a.q},         {"sigma", a.sigma},
          {"N_min", a.N_min}, {"N_max", a.N_max}, {"out", a.out}};
}

TablesArgs tables_from_params(const ordered_json& p) {
  TablesArgs a;
  a.kind = p.at("kind");
  a.q = p.at("q");
  a.sigma = p.value("sigma", 0.0);
  a.N_min = p.value("N_min", 2);
  a.N_max = p.at("N_max");
  a.out = p.at("out");
  return a;
}

int run_tables(const TablesArgs& a) {
  ManifestTimer timer("tables", tables_params(a));
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  if (a.kind == "sigma-table") {
    header = {"N", "sigma_max", "gamma"};
    for (const auto& row : heatctrl::sigma_table(a.q, a.N_max)) {
      rows.push_back({static_cast<double>(row.N), row.sigma_max, row.gamma});
    }
  } else if (a.kind == "gamma-curve") {
    header = {"N", "gamma_harmonic", "gamma_sobolev", "ratio"};
    if (a.N_min > a.N_max) {
      throw std::invalid_argument("N_min must not exceed N_max");
    }
    for (int N = a.N_min; N <= a.N_max; ++N) {
      const double gh = heatctrl::gamma_harmonic(a.q, a.sigma, N).gamma;
      const double gs = heatctrl::gamma_sobolev(a.q, a.sigma, N).gamma;
      rows.push_back({static_cast<double>(N), gh, gs, gs / gh});
    }
  } else {
    throw std::invalid_argument("unknown table kind: " + a.kind);
  }
  heatctrl::write_csv(a.out, header, rows);
  timer.add_output(a.out);
  timer.write(a.manifest);
  ordered_json j;
  j["command"] = "tables";
  j["kind"] = a.kind;
  j["rows"] = rows.size();
  j["out"] = a.out;
  print_json(j);
  return 0;
}

// ------------------------------------------------------------- simulate --

struct SimArgs {
  double q = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  int N = 1;
  std::string method = "harmonic";
  int M = 64;
  double dt = 1e-4;
  double T = 20.0;
  double h = 0.0;
  int P = 512;
  std::string ic = "polynomial";
  std::string ic_file;
  std::vector<double> snapshot_times;
  std::string trace_out;
  std::string snapshots_out;
  std::string manifest;
};

ordered_json sim_params(const SimArgs& a) {
  return {{"q", a.q},
          {"sigma", a.sigma},
          {"alpha", a.alpha},
          {"N", a.N},
          {"method", a.method},
          {"M", a.M},
          {"dt", a.dt},
          {"T", a.T},
          {"h", a.h},
          {"P", a.P},
          {"ic", a.ic},
          {"ic_file", a.ic_file},
          {"snapshot_times", a.snapshot_times},
          {"trace_out", a.trace_out},
          {"snapshots_out", a.snapshots_out}};
}

SimArgs sim_from_params(const ordered_json& p) {
  SimArgs a;
  a.q = p.at("q");
  a.sigma = p.at("sigma");
  a.alpha = p.value("alpha", 0.0);
  a.N = p.at("N");
  a.method = p.value("method", std::string("harmonic"));
  a.M = p.value("M", 64);
  a.dt = p.value("dt", 1e-4);
  a.T = p.value("T", 20.0);
  a.h = p.value("h", 0.0);
  a.P = p.value("P", 512);
  a.ic = p.value("ic", std::string("polynomial"));
  a.ic_file = p.value("ic_file", std::string());
  a.snapshot_times = p.value("snapshot_times", std::vector<double>{});
  a.trace_out = p.at("trace_out");
  a.snapshots_out = p.value("snapshots_out", std::string());
  return a;
}

// Tabulated initial condition: two numeric columns (position, value),
// comma or whitespace separated, linearly interpolated.
std::function<double(double)> load_tabulated_ic(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read initial-condition file: " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, v;
    if (ls >> x >> v) pts.emplace_back(x, v);
  }
  if (pts.size() < 2) {
    throw std::invalid_argument(
        "initial-condition file needs at least two (x, value) samples");
  }
  std::sort(pts.begin(), pts.end());
  return [pts](double x) {
    if (x <= pts.front().first) return pts.front().second;
    if (x >= pts.back().first) return pts.back().second;
    const auto hi = std::upper_bound(
        pts.begin(), pts.end(), std::make_pair(x, 0.0),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto lo = hi - 1;
    const double t = (x - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
}

int run_simulate(const SimArgs& a) {
  ManifestTimer timer("simulate", sim_params(a));
  PlantParams params;
  params.q = a.q;
  params.sigma = a.sigma;
  params.alpha = a.alpha;
  const heatctrl::FeasibilityReport report =
      heatctrl::synthesize(params, a.N, parse_method(a.method));
  if (!report.feasible()) {
    ordered_json j;
    j["command"] = "simulate";
    j["feasible"] = false;
    j["reason"] = heatctrl::to_string(report.reason());
    j["note"] = "no simulation performed: synthesis infeasible";
    print_json(j);
    timer.write(a.manifest);
    return 0;
  }

  heatctrl::SimConfig cfg;
  cfg.M = a.M;
  cfg.dt = a.dt;
  cfg.T = a.T;
  cfg.h = a.h;
  cfg.P = a.P;
  cfg.sigma = a.sigma;
  cfg.snapshot_times = a.snapshot_times;
  if (a.ic == "polynomial") {
    cfg.ic = heatctrl::polynomial_ic;
  } else if (a.ic == "file") {
    if (a.ic_file.empty()) {
      throw std::invalid_argument("--ic file requires --ic-file");
    }
    cfg.ic = load_tabulated_ic(a.ic_file);
  } else {
    throw std::invalid_argument("unknown initial condition kind: " + a.ic);
  }

  const heatctrl::ModalSystem sys = heatctrl::build_modal_system(params, a.N);
  const heatctrl::SimTrace trace =
      heatctrl::simulate_closed_loop(sys, report.result, cfg);

  std::vector<std::vector<double>> rows;
  rows.reserve(trace.t.size());
  for (Eigen::Index i = 0; i < trace.t.size(); ++i) {
    rows.push_back({trace.t(i), trace.state_norm(i), trace.err_norm(i),
                    trace.u(i), trace.y(i), trace.zeta(i), trace.V(i)});
  }
  heatctrl::write_csv(a.trace_out,
                      {"t", "state_norm", "err_norm", "u", "y", "zeta", "V"},
                      rows);
  timer.add_output(a.trace_out);

  if (!a.snapshots_out.empty()) {
    std::vector<std::vector<double>> srows;
    for (size_t s = 0; s < trace.snapshots.size(); ++s) {
      for (Eigen::Index i = 0; i < trace.snapshot_x.size(); ++i) {
        srows.push_back(
            {trace.snapshot_x(i), trace.snapshot_t[s], trace.snapshots[s](i)});
      }
    }
    heatctrl::write_csv(a.snapshots_out, {"x", "t", "value"}, srows);
    timer.add_output(a.snapshots_out);
  }
  timer.write(a.manifest);

  ordered_json j;
  j["command"] = "simulate";
  j["feasible"] = true;
  j["rows"] = rows.size();
  j["initial_state_norm"] = round_sig(trace.state_norm(0), kGammaDigits);
  j["final_state_norm"] =
      round_sig(trace.state_norm(trace.state_norm.size() - 1), kGammaDigits);
  j["aborted"] = trace.aborted;
  if (trace.aborted) j["abort_time"] = round_sig(trace.abort_time, kGammaDigits);
  j["trace_out"] = a.trace_out;
  print_json(j);
  return 0;
}

// ---------------------------------------------------------------- max-h --

struct MaxHArgs {
  double q = 0.0;
  double q_lmi = 0.0;
  double sigma = 0.0;
  int N = 1;
  double tol = 1e-3;
  double h_hi = 0.5;
  std::string json_out;
  std::string manifest;
};

ordered_json maxh_params(const MaxHArgs& a) {
  return {{"q", a.q},     {"q_lmi", a.q_lmi}, {"sigma", a.sigma}, {"N", a.N},
          {"tol", a.tol}, {"h_hi", a.h_hi},   {"json_out", a.json_out}};
}

MaxHArgs maxh_from_params(const ordered_json& p) {
  MaxHArgs a;
  a.q = p.at("q");
  a.q_lmi = p.at("q_lmi");
  a.sigma = p.at("sigma");
  a.N = p.at("N");
  a.tol = p.value("tol", 1e-3);
  a.h_hi = p.value("h_hi", 0.5);
  a.json_out = p.value("json_out", std::string());
  return a;
}

int run_max_h(const MaxHArgs& a) {
  ManifestTimer timer("max-h", maxh_params(a));
  if (!(a.q_lmi >= 0.0)) {
    throw std::invalid_argument("q_lmi must be nonnegative");
  }
  if (a.q_lmi >= a.q) {
    std::cerr << "warning: q_lmi should be strictly below q (the sampled-data "
                 "certificate expects a reduced reaction coefficient)\n";
  }
  PlantParams params;
  params.q = a.q;
  params.sigma = a.sigma;
  const heatctrl::FeasibilityReport report =
      heatctrl::synthesize(params, a.N, GainMethod::harmonic);
  ordered_json j;
  j["command"] = "max-h";
  j["q"] = a.q;
  j["q_lmi"] = a.q_lmi;
  j["sigma"] = a.sigma;
  j["N"] = a.N;
  j["tol"] = a.tol;
  if (!report.feasible()) {
    j["feasible_design"] = false;
    j["reason"] = heatctrl::to_string(report.reason());
    print_json(j);
    timer.write(a.manifest);
    return 0;
  }
  j["feasible_design"] = true;

  const heatctrl::ModalSystem sys = heatctrl::build_modal_system(params, a.N);
  heatctrl::SampledSetup setup;
  setup.A = (a.q_lmi - sys.lambda.array()).matrix().asDiagonal();
  setup.B = sys.B;
  setup.C = sys.C;
  setup.K = report.result.K;
  setup.L = report.result.L;
  setup.X = report.result.X;
  setup.Y = report.result.Y;
  setup.gamma = report.result.gamma;
  setup.sigma = a.sigma;

  heatctrl::SampledCert cert;
  const double h_star = heatctrl::max_h(setup, a.h_hi, a.tol, &cert);
  j["h_star"] = round_sig(h_star, kGammaDigits);
  if (h_star > 0.0) {
    const auto min_eig = [](const Eigen::MatrixXd& S) {
      return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                 S, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
    };
    j["certificate"] = {
        {"h", round_sig(cert.h, kGammaDigits)},
        {"lambda_max", round_sig(cert.lambda_max, 6)},
        {"min_eig_P_z", round_sig(min_eig(cert.P_z), 6)},
        {"min_eig_P_e", round_sig(min_eig(cert.P_e), 6)},
        {"min_eig_W_z", round_sig(min_eig(cert.W_z), 6)},
        {"min_eig_W_e", round_sig(min_eig(cert.W_e), 6)}};
  } else {
    j["certificate"] = nullptr;
    j["note"] =
        "no certificate found even at h = tol; the search is heuristic, so "
        "this is not a proof of infeasibility";
  }
  print_json(j);
  if (!a.json_out.empty()) {
    heatctrl::write_json(a.json_out, j);
    timer.add_output(a.json_out);
  }
  timer.write(a.manifest);
  return 0;
}

// --------------------------------------------------------------- replay --

int run_replay(const std::string& manifest_path) {
  const RunManifest m = heatctrl::read_manifest(manifest_path);
  if (m.command == "gamma") return run_gamma(gamma_from_params(m.parameters));
  if (m.command == "synthesize") {
    return run_synthesize(synth_from_params(m.parameters));
  }
  if (m.command == "tables") return run_tables(tables_from_params(m.parameters));
  if (m.command == "simulate") return run_simulate(sim_from_params(m.parameters));
  if (m.command == "max-h") return run_max_h(maxh_from_params(m.parameters));
  throw std::invalid_argument("manifest references unknown command: " +
                              m.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis and verification toolkit for finite-dimensional "
               "output-feedback boundary control of the 1-D semilinear heat "
               "equation"};
  // Single-letter long options such as --h and --q mirror the mathematical
  // symbols, so the help flag is --help only (no -h short form).
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", heatctrl::kToolkitVersion);
  app.set_config("--config", "", "Read options from a config file "
                 "(INI/TOML; sections mirror subcommands, keys mirror flags)");
  app.require_subcommand(1);

  GammaArgs ga;
  CLI::App* gamma = app.add_subcommand(
      "gamma", "Compute the L2 input-to-residue gain");
  gamma->set_help_flag("--help", "Print this help message and exit");
  gamma->add_option("--q", ga.q, "Reaction coefficient")->required();
  gamma->add_option("--sigma", ga.sigma, "Nonlinearity Lipschitz bound");
  gamma->add_option("--N", ga.N, "Number of designed modes")->required();
  gamma->add_option("--method", ga.method, "Gain method")
      ->check(CLI::IsMember({"harmonic", "sobolev"}));
  gamma->add_option("--json-out", ga.json_out, "Also write the JSON here");
  gamma->add_option("--manifest", ga.manifest, "Write a run manifest here");

  SynthArgs sa;
  CLI::App* synth = app.add_subcommand(
      "synthesize", "Solve the coupled Riccati design for K and L");
  synth->set_help_flag("--help", "Print this help message and exit");
  synth->add_option("--q", sa.q, "Reaction coefficient")->required();
  synth->add_option("--sigma", sa.sigma, "Nonlinearity Lipschitz bound");
  synth->add_option("--alpha", sa.alpha, "Required exponential decay rate");
  synth->add_option("--N", sa.N, "Number of designed modes")->required();
  synth->add_option("--method", sa.method, "Gain method")
      ->check(CLI::IsMember({"harmonic", "sobolev"}));
  synth->add_option("--json-out", sa.json_out, "Also write the JSON here");
  synth->add_option("--manifest", sa.manifest, "Write a run manifest here");

  TablesArgs ta;
  CLI::App* tables = app.add_subcommand(
      "tables", "Generate the sigma-table or gamma-curve CSV");
  tables->set_help_flag("--help", "Print this help message and exit");
  tables->add_option("--kind", ta.kind, "Table kind")
      ->required()
      ->check(CLI::IsMember({"sigma-table", "gamma-curve"}));
  tables->add_option("--q", ta.q, "Reaction coefficient")->required();
  tables->add_option("--sigma", ta.sigma,
                     "Lipschitz bound (gamma-curve only)");
  tables->add_option("--N-min", ta.N_min, "First mode count (gamma-curve)");
  tables->add_option("--N-max", ta.N_max, "Last mode count")->required();
  tables->add_option("--out", ta.out, "Output CSV path")->required();
  tables->add_option("--manifest", ta.manifest, "Write a run manifest here");

  SimArgs ma;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the closed-loop spectral simulation");
  sim->set_help_flag("--help", "Print this help message and exit");
  sim->add_option("--q", ma.q, "Reaction coefficient")->required();
  sim->add_option("--sigma", ma.sigma, "Nonlinearity Lipschitz bound");
  sim->add_option("--alpha", ma.alpha, "Required exponential decay rate");
  sim->add_option("--N", ma.N, "Number of designed modes")->required();
  sim->add_option("--method", ma.method, "Gain method")
      ->check(CLI::IsMember({"harmonic", "sobolev"}));
  sim->add_option("--M", ma.M, "Plant truncation mode count");
  sim->add_option("--dt", ma.dt, "Integration step");
  sim->add_option("--T", ma.T, "Horizon");
  sim->add_option("--h", ma.h, "Sampling period (0 = continuous)");
  sim->add_option("--P", ma.P, "Quadrature points");
  sim->add_option("--ic", ma.ic, "Initial condition kind")
      ->check(CLI::IsMember({"polynomial", "file"}));
  sim->add_option("--ic-file", ma.ic_file, "Tabulated (x, value) samples");
  sim->add_option("--snapshot-times", ma.snapshot_times,
                  "Times at which to record field snapshots");
  sim->add_option("--trace-out", ma.trace_out, "Trace CSV path")->required();
  sim->add_option("--snapshots-out", ma.snapshots_out, "Snapshot CSV path");
  sim->add_option("--manifest", ma.manifest, "Write a run manifest here");

  MaxHArgs ha;
  CLI::App* maxh = app.add_subcommand(
      "max-h", "Largest certified sampling period");
  maxh->set_help_flag("--help", "Print this help message and exit");
  maxh->add_option("--q", ha.q, "Reaction coefficient (gains synthesized here)")
      ->required();
  maxh->add_option("--q-lmi", ha.q_lmi,
                   "Reduced reaction coefficient used in the certificate")
      ->required();
  maxh->add_option("--sigma", ha.sigma, "Nonlinearity Lipschitz bound");
  maxh->add_option("--N", ha.N, "Number of designed modes")->required();
  maxh->add_option("--tol", ha.tol, "Bisection resolution");
  maxh->add_option("--h-hi", ha.h_hi, "Upper end of the search interval");
  maxh->add_option("--json-out", ha.json_out, "Also write the JSON here");
  maxh->add_option("--manifest", ha.manifest, "Write a run manifest here");

  std::string replay_manifest;
  CLI::App* replay = app.add_subcommand(
      "replay", "Re-run a command from its manifest");
  replay->set_help_flag("--help", "Print this help message and exit");
  replay->add_option("--manifest", replay_manifest, "Manifest to replay")
      ->required();

  try {
    app.parse(argc, argv);
    if (gamma->parsed()) return run_gamma(ga);
    if (synth->parsed()) return run_synthesize(sa);
    if (tables->parsed()) return run_tables(ta);
    if (sim->parsed()) return run_simulate(ma);
    if (maxh->parsed()) return run_max_h(ha);
    if (replay->parsed()) return run_replay(replay_manifest);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
