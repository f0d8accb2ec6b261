#pragma once

#include <Eigen/Dense>
#include <optional>

#include "heatctrl/modal.hpp"

namespace heatctrl {

// Everything the sampled-data stability matrix depends on besides the
// decision variables: the design model evaluated at the (possibly reduced)
// reaction coefficient q_lmi, the gains, the controller Riccati solution X
// entering the coupling terms, and the scalar parameters.  Y is carried
// for the warm start of the certificate search only.
struct SampledSetup {
  Eigen::MatrixXd A;     // diag(q_lmi - lambda_n); q_lmi is explicit, never derived
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  Eigen::RowVectorXd K;
  Eigen::VectorXd L;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  double gamma = 0.0;
  double sigma = 0.0;
};

// Decision variables of the sampled-data feasibility problem.
struct PsiVars {
  Eigen::MatrixXd P_z;
  Eigen::MatrixXd P_e;
  Eigen::MatrixXd W_z;
  Eigen::MatrixXd W_e;
};

// Certificate that the sampled-data stability matrix is negative
// semidefinite at sampling period h.
struct SampledCert {
  Eigen::MatrixXd P_z;
  Eigen::MatrixXd P_e;
  Eigen::MatrixXd W_z;
  Eigen::MatrixXd W_e;
  double h = 0.0;
  double lambda_max = 0.0;  // achieved maximum eigenvalue (<= 1e-8)
};

// Assembles the symmetric sampled-data stability matrix.  Block order:
// state | estimation error | scaled nonlinearity | residue (scalar) |
// state sampling error | observer sampling error | two slack blocks;
// size 7N+1.  For sigma = 0 the nonlinearity block row/column is
// eliminated and the size is 6N+1.  The result is affine in the decision
// variables for fixed (setup, h).
Eigen::MatrixXd assemble_psi(const SampledSetup& setup, double h,
                             const PsiVars& vars);

// Searches for a certificate at sampling period h.  Stage 1: warm start
// P_z = X, P_e = Y with W_z, W_e scalar multiples of I swept over a 60x60
// logarithmic grid on [1e-3, 1e6].  Stage 2: projected subgradient descent
// on the convex function lambda_max(Psi) over all four matrices, projected
// onto {M >= 1e-9 I}, up to `budget` iterations.  An optional `seed` is
// tried before the grid (continuation between nearby h values).  Absence
// of a certificate is NOT a proof of infeasibility.
std::optional<SampledCert> feasibility_search(const SampledSetup& setup,
                                              double h, int budget = 1000,
                                              const PsiVars* seed = nullptr);

// Largest h in [0, h_hi] with a found certificate, by bisection to
// resolution tol.  Each probe is seeded with the certificate from the
// previous successful h (the subgradient stage alone stalls from cold
// starts at larger h).  Certified feasibility is assumed monotone in h.
// Returns 0 when even h = tol yields no certificate.  The certificate at
// the returned h is stored in *cert when given.
double max_h(const SampledSetup& setup, double h_hi, double tol = 1e-3,
             SampledCert* cert = nullptr);

}  // namespace heatctrl
