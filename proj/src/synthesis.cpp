#include "heatctrl/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace heatctrl {

namespace {

bool feasible_at(double q, double sigma, int N, GainMethod method) {
  PlantParams params;
  params.q = q;
  params.sigma = sigma;
  if (static_cast<double>(N) * N <= q + sigma) return false;
  return synthesize(params, N, method).feasible();
}

int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("HEATCTRL_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = std::min(cap, requested);
  }
  return cap;
}

}  // namespace

FeasibilityReport synthesize(const PlantParams& params, int N,
                             GainMethod method) {
  params.validate();
  FeasibilityReport report;
  report.params = params;
  report.N = N;
  const double q_eff = params.effective_q();
  report.gain = method == GainMethod::harmonic
                    ? gamma_harmonic(q_eff, params.sigma, N)
                    : gamma_sobolev(q_eff, params.sigma, N);
  const ModalSystem sys = build_modal_system(params, N);
  report.result = synthesize_gains(sys, params.sigma, report.gain.gamma);
  return report;
}

double max_sigma(double q, int N, double tol, bool paranoid) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  PlantParams at_zero;
  at_zero.q = q;
  if (N < min_modes(at_zero)) {
    throw std::invalid_argument("N below min_modes at sigma = 0");
  }
  if (!feasible_at(q, tol, N, GainMethod::harmonic)) return 0.0;
  double lo = tol;
  double hi = static_cast<double>(N) * N - q - 1e-9;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(q, mid, N, GainMethod::harmonic)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (paranoid) {
    for (int k = 1; k <= 10; ++k) {
      const double s = lo * k / 11.0;
      if (s > 0.0 && !feasible_at(q, s, N, GainMethod::harmonic)) {
        throw std::runtime_error(
            "feasibility is not monotone in sigma on [0, sigma*]: "
            "infeasible interior point found");
      }
    }
  }
  return lo;
}

std::vector<SigmaTableRow> sigma_table(double q, int N_max) {
  PlantParams at_zero;
  at_zero.q = q;
  const int N_lo = min_modes(at_zero);
  if (N_max < N_lo) {
    throw std::invalid_argument("N_max below min_modes at sigma = 0");
  }
  std::vector<SigmaTableRow> rows(N_max - N_lo + 1);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next.fetch_add(1); i < static_cast<int>(rows.size());
         i = next.fetch_add(1)) {
      const int N = N_lo + i;
      SigmaTableRow row;
      row.N = N;
      row.sigma_max = max_sigma(q, N);
      row.gamma = gamma_harmonic(q, row.sigma_max, N).gamma;
      rows[i] = row;
    }
  };
  const int n_threads =
      std::min<int>(thread_cap(), static_cast<int>(rows.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

int min_feasible_N(double q, double sigma, GainMethod method) {
  PlantParams params;
  params.q = q;
  params.sigma = sigma;
  params.validate();
  constexpr int kCap = 64;
  for (int N = min_modes(params); N <= kCap; ++N) {
    if (feasible_at(q, sigma, N, method)) return N;
  }
  throw std::runtime_error(
      "no feasible mode count found up to the scan cap N = 64");
}

double stability_constant(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const Eigen::VectorXd wx =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(X, Eigen::EigenvaluesOnly)
          .eigenvalues();
  const Eigen::VectorXd wy =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Y, Eigen::EigenvaluesOnly)
          .eigenvalues();
  if (!(wx.minCoeff() > 0.0) || !(wy.minCoeff() > 0.0)) {
    throw std::invalid_argument("X and Y must be positive definite");
  }
  const double inv_g = 1.0 / gamma;
  const double c1 = std::min({wx.minCoeff(), wy.minCoeff(), inv_g});
  const double c2 = std::max({wx.maxCoeff(), wy.maxCoeff(), inv_g});
  return 2.0 * c2 / c1;
}

}  // namespace heatctrl
