#include "heatctrl/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace heatctrl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kAxisMargin = 1e-9;       // Hamiltonian distance to imaginary axis
constexpr double kCondLimit = 1e12;        // conditioning of the subspace basis
constexpr double kHurwitzMargin = 1e-9;    // closed-loop real-part margin
constexpr double kPdMargin = 1e-10;        // relative PD margin

double residual_norm(const MatrixXd& A, const MatrixXd& R, const MatrixXd& Q,
                     const MatrixXd& X) {
  return (X * A + A.transpose() * X - X * R * X + Q).norm();
}

double min_eig_sym(const MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double max_real_eig(const MatrixXd& M) {
  return Eigen::EigenSolver<MatrixXd>(M, false).eigenvalues().real().maxCoeff();
}

// Solves the Lyapunov equation Ac' P + P Ac = -Q via the Kronecker-product
// linear system (problem sizes here are tiny, N <= 16).
bool lyapunov_solve(const MatrixXd& Ac, const MatrixXd& Q, MatrixXd* P) {
  const int n = static_cast<int>(Ac.rows());
  MatrixXd M = MatrixXd::Zero(n * n, n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int row = i + j * n;
      for (int k = 0; k < n; ++k) {
        M(row, k + j * n) += Ac(k, i);  // (Ac' P)_{ij} term
        M(row, i + k * n) += Ac(k, j);  // (P Ac)_{ij} term
      }
    }
  }
  VectorXd rhs(n * n);
  for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = -Q.col(j);
  VectorXd v = M.colPivHouseholderQr().solve(rhs);
  if (!v.allFinite()) return false;
  P->resize(n, n);
  for (int j = 0; j < n; ++j) P->col(j) = v.segment(j * n, n);
  *P = 0.5 * (*P + P->transpose());
  return true;
}

// Final certificates shared by both solution paths.
CareSolution certify(const MatrixXd& A, const MatrixXd& R, const MatrixXd& Q,
                     MatrixXd X) {
  CareSolution out;
  X = 0.5 * (X + X.transpose());
  const double res = residual_norm(A, R, Q, X);
  if (!(res <= 1e-8 * (1.0 + X.norm()))) {
    out.status = CareStatus::no_stabilizing_solution;
    out.detail = "ARE residual above certificate threshold";
    out.residual = res;
    return out;
  }
  if (!(max_real_eig(A - R * X) < -kHurwitzMargin)) {
    out.status = CareStatus::no_stabilizing_solution;
    out.detail = "closed loop not Hurwitz with margin";
    return out;
  }
  out.status = CareStatus::ok;
  out.X = std::move(X);
  out.residual = res;
  return out;
}

CareSolution solve_by_hamiltonian(const MatrixXd& A, const MatrixXd& R,
                                  const MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  MatrixXd H(2 * n, 2 * n);
  H << A, -R, -Q, -A.transpose();

  Eigen::EigenSolver<MatrixXd> es(H);
  const Eigen::VectorXcd w = es.eigenvalues();
  const Eigen::MatrixXcd V = es.eigenvectors();

  CareSolution out;
  if (w.real().cwiseAbs().minCoeff() < kAxisMargin) {
    out.status = CareStatus::no_stabilizing_solution;
    out.detail = "Hamiltonian eigenvalue on the imaginary axis";
    return out;
  }
  int stable = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (w(i).real() < 0.0) ++stable;
  }
  if (stable != n) {
    out.status = CareStatus::no_stabilizing_solution;
    out.detail = "stable subspace has wrong dimension";
    return out;
  }
  Eigen::MatrixXcd V1(n, n), V2(n, n);
  int found = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (w(i).real() < 0.0) {
      V1.col(found) = V.block(0, i, n, 1);
      V2.col(found) = V.block(n, i, n, 1);
      ++found;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V1);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > kCondLimit) {
    out.status = CareStatus::degenerate_subspace;
    out.detail = "invariant subspace basis numerically singular";
    return out;
  }
  MatrixXd X = (V2 * V1.inverse()).real();
  X = 0.5 * (X + X.transpose());

  // One Newton refinement step (kept only if it reduces the residual).
  const MatrixXd Ac = A - R * X;
  const MatrixXd Res = X * A + A.transpose() * X - X * R * X + Q;
  MatrixXd delta;
  if (lyapunov_solve(Ac, Res, &delta)) {
    const MatrixXd Xn = X + delta;
    if (residual_norm(A, R, Q, Xn) < Res.norm()) X = Xn;
  }
  return certify(A, R, Q, X);
}

CareSolution solve_by_newton_kleinman(const MatrixXd& A, const MatrixXd& R,
                                      const MatrixXd& Q, MatrixXd X) {
  X = 0.5 * (X + X.transpose());
  for (int it = 0; it < 50; ++it) {
    const MatrixXd Ac = A - R * X;
    MatrixXd Xn;
    if (!lyapunov_solve(Ac, Q + X * R * X, &Xn) || !Xn.allFinite()) {
      CareSolution out;
      out.status = CareStatus::degenerate_subspace;
      out.detail = "Newton-Kleinman Lyapunov solve failed";
      return out;
    }
    const double step = (Xn - X).norm();
    X = Xn;
    if (step <= 1e-12 * (1.0 + X.norm())) break;
  }
  return certify(A, R, Q, X);
}

// Index count of unstable modes: number of n >= 0 with n^2 < q.
int unstable_mode_count(double q) {
  int n0 = 0;
  while (static_cast<double>(n0) * n0 < q) ++n0;
  return n0;
}

void require_nonresonant(double q) {
  const double d = std::sqrt(std::max(q, 0.0));
  const double nearest = std::round(d);
  if (std::abs(q - nearest * nearest) <= 1e-9) {
    throw std::invalid_argument(
        "resonant reaction coefficient: q equals an eigenvalue n^2 "
        "(shift it via the decay-rate parameter)");
  }
}

}  // namespace

const char* to_string(InfeasibilityReason r) {
  switch (r) {
    case InfeasibilityReason::none: return "none";
    case InfeasibilityReason::no_stabilizing_x: return "no-stabilizing-X";
    case InfeasibilityReason::no_stabilizing_z: return "no-stabilizing-Z";
    case InfeasibilityReason::spectral_condition_failed:
      return "spectral-condition-failed";
  }
  return "unknown";
}

CareSolution solve_care_stabilizing(const MatrixXd& A, const MatrixXd& R,
                                    const MatrixXd& Q,
                                    const MatrixXd* newton_seed) {
  if (A.rows() != A.cols() || R.rows() != R.cols() || Q.rows() != Q.cols() ||
      A.rows() != R.rows() || A.rows() != Q.rows()) {
    throw std::invalid_argument("ARE matrices must be square and same size");
  }
  if (newton_seed != nullptr) {
    return solve_by_newton_kleinman(A, R, Q, *newton_seed);
  }
  return solve_by_hamiltonian(A, R, Q);
}

std::pair<double, bool> spectral_condition(const MatrixXd& X, const MatrixXd& Z,
                                           double gamma) {
  const double rho =
      Eigen::EigenSolver<MatrixXd>(X * Z, false).eigenvalues().cwiseAbs().maxCoeff();
  return {rho, rho < 1.0 / (gamma * gamma)};
}

SynthesisResult synthesize_gains(const ModalSystem& sys, double sigma,
                                 double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  const int N = sys.N;
  const MatrixXd I = MatrixXd::Identity(N, N);
  const MatrixXd A = sys.A;
  const MatrixXd Rx = sys.B * sys.B.transpose() - gamma * sigma * I;
  const MatrixXd Rz = sys.C.transpose() * sys.C - gamma * sigma * I;
  const MatrixXd Q = (sigma / gamma) * I;

  SynthesisResult out;
  out.gamma = gamma;

  // Pads the sigma = 0 Gramian solution to N x N; used only as a
  // Newton-Kleinman seed when the eigenvector path degenerates.
  const auto padded_gramian_seed = [&](bool observer) -> MatrixXd {
    const int N0 = unstable_mode_count(sys.q_eff);
    auto [X0, Z0] = gramian_solution_linear(sys.q_eff, N0);
    MatrixXd seed = MatrixXd::Zero(N, N);
    seed.topLeftCorner(N0, N0) = observer ? Z0 : X0;
    return seed;
  };
  const auto solve_with_fallback = [&](const MatrixXd& Aeq, const MatrixXd& Req,
                                       bool observer) -> CareSolution {
    CareSolution sol = solve_care_stabilizing(Aeq, Req, Q);
    if (sol.status == CareStatus::degenerate_subspace) {
      try {
        const MatrixXd seed = padded_gramian_seed(observer);
        sol = solve_care_stabilizing(Aeq, Req, Q, &seed);
      } catch (const std::invalid_argument&) {
        // resonant q: no Gramian seed available, keep the original failure
      }
    }
    return sol;
  };

  const CareSolution solX = solve_with_fallback(A, Rx, false);
  if (!solX.ok()) {
    out.reason = InfeasibilityReason::no_stabilizing_x;
    return out;
  }
  out.X = solX.X;
  const CareSolution solZ = solve_with_fallback(A.transpose(), Rz, true);
  if (!solZ.ok()) {
    out.reason = InfeasibilityReason::no_stabilizing_z;
    return out;
  }
  out.Z = solZ.X;

  // Definiteness of the Riccati solutions.  For sigma > 0 the feasibility
  // certificate needs strict PD; for sigma = 0 the stabilizing solutions
  // are PSD with an exact zero block beyond the unstable modes.
  if (sigma > 0.0) {
    if (min_eig_sym(out.X) <= kPdMargin * out.X.operatorNorm() ||
        min_eig_sym(out.Z) <= kPdMargin * out.Z.operatorNorm()) {
      out.reason = min_eig_sym(out.X) <= kPdMargin * out.X.operatorNorm()
                       ? InfeasibilityReason::no_stabilizing_x
                       : InfeasibilityReason::no_stabilizing_z;
      return out;
    }
  } else {
    const double tol_x = kPdMargin * std::max(1.0, out.X.operatorNorm());
    const double tol_z = kPdMargin * std::max(1.0, out.Z.operatorNorm());
    if (min_eig_sym(out.X) < -tol_x) {
      out.reason = InfeasibilityReason::no_stabilizing_x;
      return out;
    }
    if (min_eig_sym(out.Z) < -tol_z) {
      out.reason = InfeasibilityReason::no_stabilizing_z;
      return out;
    }
  }

  const auto [rho, rho_ok] = spectral_condition(out.X, out.Z, gamma);
  out.rho_xz = rho;
  if (!rho_ok) {
    out.reason = InfeasibilityReason::spectral_condition_failed;
    return out;
  }

  // Coupling matrix Y = gamma^{-2} Z^{-1} - X; restricted to the unstable
  // block when sigma = 0 (Z is singular beyond it), then zero-padded.
  const double inv_g2 = 1.0 / (gamma * gamma);
  if (sigma > 0.0) {
    out.Y = inv_g2 * out.Z.inverse() - out.X;
  } else {
    const int N0 = unstable_mode_count(sys.q_eff);
    const MatrixXd Z0 = out.Z.topLeftCorner(N0, N0);
    const MatrixXd Y0 = inv_g2 * Z0.inverse() - out.X.topLeftCorner(N0, N0);
    out.Y = MatrixXd::Zero(N, N);
    out.Y.topLeftCorner(N0, N0) = Y0;
    if (min_eig_sym(Y0) <= kPdMargin * std::max(1.0, Y0.operatorNorm())) {
      out.reason = InfeasibilityReason::spectral_condition_failed;
      return out;
    }
  }
  if (sigma > 0.0 &&
      min_eig_sym(out.Y) <= kPdMargin * out.Y.operatorNorm()) {
    out.reason = InfeasibilityReason::spectral_condition_failed;
    return out;
  }

  out.K = sys.B.transpose() * out.X;
  out.L = (I - gamma * gamma * out.X * out.Z)
              .partialPivLu()
              .solve(sys.C.transpose());
  out.L = out.Z * out.L;
  out.feasible = true;
  return out;
}

std::pair<MatrixXd, MatrixXd> gramian_solution_linear(double q, int N0) {
  if (N0 < 1) throw std::invalid_argument("N0 must be >= 1");
  require_nonresonant(q);
  const double lo = static_cast<double>(N0 - 1) * (N0 - 1);
  const double hi = static_cast<double>(N0) * N0;
  if (!(lo < q && q < hi)) {
    throw std::invalid_argument(
        "N0 inconsistent with q: need lambda_{N0-1} < q < lambda_{N0}");
  }
  PlantParams params;
  params.q = q;
  const ModalSystem sys = build_modal_system(params, N0);
  MatrixXd GB(N0, N0), GC(N0, N0);
  for (int i = 0; i < N0; ++i) {
    for (int j = 0; j < N0; ++j) {
      const double denom = (q - sys.lambda(i)) + (q - sys.lambda(j));
      GB(i, j) = sys.B(i) * sys.B(j) / denom;
      GC(i, j) = sys.C(i) * sys.C(j) / denom;
    }
  }
  const MatrixXd I0 = MatrixXd::Identity(N0, N0);
  return {GB.llt().solve(I0), GC.llt().solve(I0)};
}

std::pair<Eigen::RowVectorXd, VectorXd> linear_gain_structure(double q, int N,
                                                              double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  require_nonresonant(q);
  const int N0 = unstable_mode_count(q);
  if (N < N0) {
    throw std::invalid_argument("N must cover all unstable modes (N >= N0)");
  }
  auto [X0, Z0] = gramian_solution_linear(q, N0);
  const auto [rho, rho_ok] = spectral_condition(X0, Z0, gamma);
  if (!rho_ok) {
    throw std::invalid_argument(
        "spectral-radius condition fails for the linear Gramian solution");
  }
  PlantParams params;
  params.q = q;
  const ModalSystem sys0 = build_modal_system(params, N0);
  Eigen::RowVectorXd K = Eigen::RowVectorXd::Zero(N);
  VectorXd L = VectorXd::Zero(N);
  K.head(N0) = sys0.B.transpose() * X0;
  const MatrixXd I0 = MatrixXd::Identity(N0, N0);
  L.head(N0) = Z0 * (I0 - gamma * gamma * X0 * Z0)
                        .partialPivLu()
                        .solve(sys0.C.transpose());
  return {K, L};
}

}  // namespace heatctrl
