#pragma once

#include <vector>

#include "heatctrl/modal.hpp"
#include "heatctrl/residue_gain.hpp"
#include "heatctrl/riccati.hpp"

namespace heatctrl {

// End-to-end synthesis outcome: residue gain, Riccati solutions, gains, and
// the feasibility verdict with its reason code.
struct FeasibilityReport {
  PlantParams params;
  int N = 0;
  GainBreakdown gain;
  SynthesisResult result;

  bool feasible() const { return result.feasible; }
  InfeasibilityReason reason() const { return result.reason; }
};

// Composes residue gain -> coupled Riccati solve -> spectral condition for
// the N-mode design.  Throws std::invalid_argument on invalid params or
// N < min_modes.
FeasibilityReport synthesize(const PlantParams& params, int N,
                             GainMethod method = GainMethod::harmonic);

// Largest Lipschitz bound sigma for which the N-mode harmonic design stays
// feasible, found by binary search on [0, N^2 - q) to resolution tol.
// Monotonicity of feasibility in sigma is assumed (the search contract);
// `paranoid` re-verifies feasibility at 10 interior points and throws
// std::runtime_error if the assumption is violated.  Returns 0 when even
// sigma = tol is infeasible.
double max_sigma(double q, int N, double tol = 1e-3, bool paranoid = false);

struct SigmaTableRow {
  int N = 0;
  double sigma_max = 0.0;
  double gamma = 0.0;  // harmonic gain evaluated at (q, sigma_max, N)
};

// max_sigma per N = 1..N_max (rows computed in parallel; thread count is
// capped by the HEATCTRL_THREADS environment variable).
std::vector<SigmaTableRow> sigma_table(double q, int N_max);

// Smallest N >= min_modes with a feasible synthesis; linear scan capped at
// N = 64 (throws std::runtime_error when the cap is exceeded).
int min_feasible_N(double q, double sigma, GainMethod method);

// Exponential-bound amplitude M = 2 c2 / c1 with
//   c1 = min{lambda_min(X), lambda_min(Y), 1/gamma},
//   c2 = max{lambda_max(X), lambda_max(Y), 1/gamma}.
// Requires X, Y positive definite.
double stability_constant(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          double gamma);

}  // namespace heatctrl
