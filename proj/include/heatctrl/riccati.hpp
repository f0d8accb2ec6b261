#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "heatctrl/modal.hpp"

namespace heatctrl {

enum class CareStatus {
  ok,
  no_stabilizing_solution,  // axis eigenvalue / bad certificate
  degenerate_subspace,      // stable invariant subspace numerically singular
};

// Outcome of a stabilizing continuous-time algebraic Riccati solve for
//   X A + A' X - X R X + Q = 0.
struct CareSolution {
  CareStatus status = CareStatus::no_stabilizing_solution;
  Eigen::MatrixXd X;       // valid only when status == ok
  double residual = 0.0;   // Frobenius norm of the ARE residual
  std::string detail;      // which certificate failed, for diagnostics

  bool ok() const { return status == CareStatus::ok; }
};

// Solves X A + A' X - X R X + Q = 0 for the stabilizing solution (A - R X
// Hurwitz).  Method: eigendecomposition of the Hamiltonian [[A, -R], [-Q,
// -A']], selection of the n eigenvectors with Re < 0, X = Re(V2 V1^{-1}),
// symmetrization, one Newton refinement step.  "Stabilizing" is certified a
// posteriori, never assumed from the selection:
//   - every Hamiltonian eigenvalue at least 1e-9 from the imaginary axis,
//   - cond(V1) <= 1e12,
//   - residual <= 1e-8 * (1 + ||X||_F),
//   - eigenvalues of A - R X have real part < -1e-9.
// When `newton_seed` is given the eigenvector path is skipped and the
// solution is found by Newton-Kleinman iteration from the seed (used as a
// fallback when the eigen path reports a degenerate subspace); the same
// certificates apply.
CareSolution solve_care_stabilizing(const Eigen::MatrixXd& A,
                                    const Eigen::MatrixXd& R,
                                    const Eigen::MatrixXd& Q,
                                    const Eigen::MatrixXd* newton_seed = nullptr);

enum class InfeasibilityReason {
  none,
  no_stabilizing_x,
  no_stabilizing_z,
  spectral_condition_failed,
};

const char* to_string(InfeasibilityReason r);

// Output-feedback synthesis data: the two Riccati solutions, the coupling
// matrix Y = gamma^{-2} Z^{-1} - X, the gains, and the verdict.
//
// For sigma = 0 the equations are solved with Q = 0 and the stabilizing
// solutions are only positive semidefinite: X and Z vanish beyond the
// number N0 of unstable modes, and Y is computed from the leading N0 x N0
// blocks (zero-padded back to N x N).  Feasibility then means rho(X Z) <
// gamma^{-2} together with that restricted Y being positive definite.
struct SynthesisResult {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  Eigen::MatrixXd Y;
  Eigen::RowVectorXd K;    // controller gain, u = -K zhat
  Eigen::VectorXd L;       // observer gain
  double gamma = 0.0;
  double rho_xz = 0.0;     // spectral radius of X Z
  bool feasible = false;
  InfeasibilityReason reason = InfeasibilityReason::none;
};

// Solves the coupled design equations for the N-mode system:
//   X A + A' X - X (B B' - gamma sigma I) X + (sigma/gamma) I = 0,
//   Z A' + A Z - Z (C' C - gamma sigma I) Z + (sigma/gamma) I = 0,
// checks rho(X Z) < gamma^{-2}, and forms K = B' X and
// L = Z (I - gamma^2 X Z)^{-1} C'.  Gains are populated only when feasible.
SynthesisResult synthesize_gains(const ModalSystem& sys, double sigma,
                                 double gamma);

// Spectral radius of X Z and whether it clears gamma^{-2}.
std::pair<double, bool> spectral_condition(const Eigen::MatrixXd& X,
                                           const Eigen::MatrixXd& Z,
                                           double gamma);

// Closed-form solutions of the sigma = 0 Riccati equations on the unstable
// N0-dimensional subsystem (lambda_{N0-1} < q < lambda_{N0}): inverses of
// the controllability/observability Gramians with entries
//   (G_B)_{ij} = b_i b_j / (a_i + a_j),  a_i = q - lambda_i > 0,
// and analogously with c for G_C.  Throws on a resonant q (within 1e-9 of
// an eigenvalue) or an inconsistent N0.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gramian_solution_linear(double q,
                                                                    int N0);

// Linear-case (sigma = 0) gain structure on N >= N0 modes: the Gramian
// gains on the unstable block, exact zeros beyond it.  Requires
// rho(X0 Z0) < gamma^{-2}.
std::pair<Eigen::RowVectorXd, Eigen::VectorXd> linear_gain_structure(
    double q, int N, double gamma);

}  // namespace heatctrl
