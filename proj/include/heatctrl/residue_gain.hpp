#pragma once

#include <Eigen/Dense>

namespace heatctrl {

// How the residue weights mu_n (and with them the L2 residue gain gamma)
// are allocated over the residual modes n >= N.
enum class GainMethod {
  harmonic,  // optimal allocation via the weighted harmonic inequality
  sobolev,   // classical Sobolev-inequality baseline
};

const char* to_string(GainMethod m);

// L2 input-to-residue gain together with the weight rule that produced it.
//
// harmonic:  mu_n = gamma * (pi/2) * (lambda_n - q - sigma)
// sobolev:   mu_n = (pi/2) * (1/pi + Gamma + lambda_n / Gamma),  Gamma = N
struct GainBreakdown {
  double gamma = 0.0;
  GainMethod method = GainMethod::harmonic;
  int N = 0;                // first residual mode index
  double q_plus_sigma = 0.0;
  double big_gamma = 0.0;   // sqrt(lambda_N) = N; used by the sobolev rule

  // Weight for residual mode n (requires n >= N).
  double mu(int n) const;
};

// Whether (sum z_i)^2 <= sum mu_i z_i^2 holds for the given finite vectors.
// Throws std::invalid_argument on length mismatch or nonpositive weights.
bool harmonic_bound_holds(const Eigen::VectorXd& z, const Eigen::VectorXd& mu);

// The weighted harmonic condition sum 1/mu_i <= 1 (necessary and sufficient
// for the bound above to hold for every summable sequence).
bool check_harmonic_condition(const Eigen::VectorXd& mu);

// Verified enclosure of a positive series: partial sum plus integral tail
// bounds.  The true value lies in [lower, upper] up to summation rounding.
struct SeriesBracket {
  double lower = 0.0;
  double upper = 0.0;
  double value() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  bool contains(double x, double slack = 0.0) const {
    return lower - slack <= x && x <= upper + slack;
  }
};

// Enclosure of gamma = (2/pi) * sum_{n>=N} 1/(n^2 - q - sigma) from the
// first `terms` terms plus a closed-form integral tail bracket.  Serves as
// the independent oracle for the closed form below.  Requires N^2 > q+sigma
// and terms >= 1.
SeriesBracket gamma_harmonic_series(double q, double sigma, int N, long terms);

// Optimal residue gain via the cotangent closed form
//   gamma = (1/(pi d^2)) [1 - pi d cot(pi d) + 2 sum_{n=1}^{N-1} d^2/(d^2-n^2)]
// with d = sqrt(q+sigma).  Near-integer d (removable singularities of the
// expression, where cot loses precision) falls back to the series oracle.
// Requires N^2 > q + sigma; q + sigma may be zero or negative.
GainBreakdown gamma_harmonic(double q, double sigma, int N);

// Sobolev-inequality baseline gamma = (2N + 1/pi) / (N^2 - q - sigma).
GainBreakdown gamma_sobolev(double q, double sigma, int N);

}  // namespace heatctrl
