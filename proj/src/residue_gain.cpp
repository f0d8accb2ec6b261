#include "heatctrl/residue_gain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatctrl {

namespace {

constexpr double kPi = std::numbers::pi;

void require_mode_count(double q, double sigma, int N) {
  if (N < 1) throw std::invalid_argument("mode count N must be >= 1");
  if (!(static_cast<double>(N) * N > q + sigma)) {
    throw std::invalid_argument(
        "mode-count condition violated: need N^2 > q + sigma");
  }
}

// Compensated accumulator; the series brackets are only honest enclosures
// if summation error stays below the bracket width (~1/terms^2).
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Closed form of the tail integral int_M^inf dx / (x^2 - s), M > sqrt(max(s,0)).
double tail_integral(double M, double s) {
  if (s > 1e-12) {
    const double d = std::sqrt(s);
    return std::atanh(d / M) / d;
  }
  if (s < -1e-12) {
    const double e = std::sqrt(-s);
    return std::atan(e / M) / e;
  }
  return 1.0 / M;
}

}  // namespace

const char* to_string(GainMethod m) {
  return m == GainMethod::harmonic ? "harmonic" : "sobolev";
}

double GainBreakdown::mu(int n) const {
  if (n < N) throw std::invalid_argument("mu is defined for residual modes n >= N");
  const double lam = static_cast<double>(n) * n;
  if (method == GainMethod::harmonic) {
    return gamma * (kPi / 2.0) * (lam - q_plus_sigma);
  }
  return (kPi / 2.0) * (1.0 / kPi + big_gamma + lam / big_gamma);
}

bool harmonic_bound_holds(const Eigen::VectorXd& z, const Eigen::VectorXd& mu) {
  if (z.size() != mu.size()) {
    throw std::invalid_argument("z and mu must have equal length");
  }
  if (mu.size() > 0 && mu.minCoeff() <= 0.0) {
    throw std::invalid_argument("weights mu must be positive");
  }
  const double lhs = z.sum() * z.sum();
  const double rhs = mu.dot(z.cwiseProduct(z));
  return lhs <= rhs;
}

bool check_harmonic_condition(const Eigen::VectorXd& mu) {
  if (mu.size() > 0 && mu.minCoeff() <= 0.0) {
    throw std::invalid_argument("weights mu must be positive");
  }
  return mu.cwiseInverse().sum() <= 1.0;
}

SeriesBracket gamma_harmonic_series(double q, double sigma, int N, long terms) {
  require_mode_count(q, sigma, N);
  if (terms < 1) throw std::invalid_argument("terms must be >= 1");
  const double s = q + sigma;
  KahanSum partial;
  for (long n = N; n < N + terms; ++n) {
    partial.add(1.0 / (static_cast<double>(n) * n - s));
  }
  const double M0 = static_cast<double>(N) + terms;  // first discarded index
  const double tail_lo = tail_integral(M0, s);
  const double tail_hi = tail_lo + 1.0 / (M0 * M0 - s);
  SeriesBracket b;
  b.lower = (2.0 / kPi) * (partial.sum + tail_lo);
  b.upper = (2.0 / kPi) * (partial.sum + tail_hi);
  return b;
}

GainBreakdown gamma_harmonic(double q, double sigma, int N) {
  require_mode_count(q, sigma, N);
  const double s = q + sigma;

  GainBreakdown out;
  out.method = GainMethod::harmonic;
  out.N = N;
  out.q_plus_sigma = s;

  // d = sqrt(s) within 1e-6 of an integer: the cotangent expression has a
  // removable singularity there and loses all precision, so evaluate the
  // defining series instead (10^7 terms leave a ~1e-14 bracket).
  const double d = std::sqrt(std::abs(s));
  const bool near_integer = s >= 0.0 ? std::abs(d - std::round(d)) < 1e-6
                                     : d < 1e-6;
  if (near_integer) {
    out.gamma = gamma_harmonic_series(q, sigma, N, 10'000'000L).value();
    return out;
  }

  // 1 - pi*d*cot(pi*d), analytically continued to s < 0 via coth.
  const double head = s > 0.0 ? 1.0 - kPi * d / std::tan(kPi * d)
                              : 1.0 - kPi * d / std::tanh(kPi * d);
  double poles = 0.0;
  for (int n = 1; n < N; ++n) {
    poles += 2.0 * s / (s - static_cast<double>(n) * n);
  }
  out.gamma = (head + poles) / (kPi * s);
  return out;
}

GainBreakdown gamma_sobolev(double q, double sigma, int N) {
  require_mode_count(q, sigma, N);
  GainBreakdown out;
  out.method = GainMethod::sobolev;
  out.N = N;
  out.q_plus_sigma = q + sigma;
  out.big_gamma = static_cast<double>(N);  // sqrt(lambda_N)
  out.gamma = (2.0 * N + 1.0 / kPi) /
              (static_cast<double>(N) * N - q - sigma);
  return out;
}

}  // namespace heatctrl
