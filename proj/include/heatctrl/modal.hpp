#pragma once

#include <Eigen/Dense>

namespace heatctrl {

// Parameters of the controlled plant
//   z_t = z_xx + q z + f(z),   x in [0, pi],
// with Neumann boundary actuation at x = pi and a boundary measurement at
// x = 0.  The nonlinearity f is only known through its Lipschitz/sector
// bound sigma.  A required exponential decay rate alpha is absorbed as a
// constant shift of the reaction coefficient: every downstream computation
// sees effective_q() = q + alpha and nothing else.
struct PlantParams {
  double q = 0.0;      // reaction coefficient, must be > 0
  double sigma = 0.0;  // Lipschitz bound of the nonlinearity, >= 0
  double alpha = 0.0;  // enforced exponential decay rate, >= 0

  double effective_q() const { return q + alpha; }

  // Throws std::invalid_argument if any field is non-finite or out of range.
  void validate() const;
};

// Truncated N-mode model of the plant in the Neumann cosine eigenbasis
// phi_0 = 1/sqrt(pi), phi_n(x) = sqrt(2/pi) cos(n x).  The eigenvalues of
// -d^2/dx^2 are lambda_n = n^2; the boundary actuation and measurement
// enter through b_n = phi_n(pi) and c_n = phi_n(0).
struct ModalSystem {
  int N = 0;              // number of retained modes (n = 0..N-1)
  double q_eff = 0.0;     // effective reaction coefficient on the diagonal
  Eigen::VectorXd lambda; // lambda_n = n^2
  Eigen::MatrixXd A;      // diag(q_eff - lambda_n)
  Eigen::VectorXd B;      // input column, B(n) = phi_n(pi)
  Eigen::RowVectorXd C;   // output row,   C(n) = phi_n(0)
};

// Smallest N whose first residual eigenvalue clears the reaction strength:
// N^2 > q + alpha + sigma.  This is the minimum truncation for which the
// residue machinery (and hence any synthesis) can work.
int min_modes(const PlantParams& params);

// Builds the N-mode truncation.  Throws std::invalid_argument when N is
// below min_modes(params), i.e. when the mode-count condition fails.
ModalSystem build_modal_system(const PlantParams& params, int N);

// Eigenfunction phi_n evaluated at x in [0, pi].  Throws on x outside the
// domain or negative n.
double eval_eigenfunction(int n, double x);

}  // namespace heatctrl
