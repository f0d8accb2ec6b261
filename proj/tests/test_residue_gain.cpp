#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "heatctrl/residue_gain.hpp"

using heatctrl::check_harmonic_condition;
using heatctrl::GainBreakdown;
using heatctrl::GainMethod;
using heatctrl::gamma_harmonic;
using heatctrl::gamma_harmonic_series;
using heatctrl::gamma_sobolev;
using heatctrl::harmonic_bound_holds;
using heatctrl::SeriesBracket;

namespace {
constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}
}  // namespace

TEST_CASE("closed-form harmonic gain matches independently computed values") {
  // Reference values were produced with an arbitrary-precision evaluation of
  // the residue series, truncated at 10^7 terms with integral tail bounds.
  CHECK(rel_err(gamma_harmonic(0.1, 0.2, 3).gamma, 0.25531026929332773) < 1e-12);
  CHECK(rel_err(gamma_harmonic(0.1, 0.0, 1).gamma, 1.1232870113007833) < 1e-12);

  const double sigma_star[] = {0.037, 0.193, 0.278, 0.327, 0.360, 0.382};
  const double gamma_star[] = {1.155654128659444,   0.42695167509920756,
                               0.2563555508569912,  0.18276112742457562,
                               0.14195838944040917, 0.11604438476524932};
  for (int N = 1; N <= 6; ++N) {
    CHECK(rel_err(gamma_harmonic(0.1, sigma_star[N - 1], N).gamma,
                  gamma_star[N - 1]) < 1e-9);
  }
}

TEST_CASE("dissipativity-based gain matches its closed form") {
  CHECK(rel_err(gamma_sobolev(1.1, 0.0, 2).gamma, 1.4890723745461347) < 1e-12);
  CHECK(rel_err(gamma_sobolev(1.1, 0.0, 20).gamma, 0.10107372746599096) < 1e-12);
  const GainBreakdown g = gamma_sobolev(1.1, 0.0, 2);
  CHECK(g.method == GainMethod::sobolev);
  CHECK(g.big_gamma == 2.0);
  // mu_n = (pi/2) * (1/pi + Gamma + n^2 / Gamma) for residual modes n >= N.
  CHECK(g.mu(5) == doctest::Approx((kPi / 2.0) * (1.0 / kPi + 2.0 + 25.0 / 2.0))
                       .epsilon(1e-14));
}

TEST_CASE("harmonic gain weight rule") {
  const GainBreakdown g = gamma_harmonic(0.1, 0.2, 3);
  CHECK(g.method == GainMethod::harmonic);
  CHECK(g.q_plus_sigma == doctest::Approx(0.3));
  CHECK(g.mu(3) ==
        doctest::Approx(g.gamma * (kPi / 2.0) * (9.0 - 0.3)).epsilon(1e-14));
  CHECK(g.mu(7) ==
        doctest::Approx(g.gamma * (kPi / 2.0) * (49.0 - 0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(g.mu(2), std::invalid_argument);  // designed, not residual
}

TEST_CASE("mode-count requirement is enforced") {
  CHECK_THROWS_AS(gamma_harmonic(9.0, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(gamma_harmonic(0.9, 0.2, 1), std::invalid_argument);
  CHECK_THROWS_AS(gamma_harmonic(1.0, 0.0, 1), std::invalid_argument);  // equality
  CHECK_THROWS_AS(gamma_sobolev(9.0, 0.0, 3), std::invalid_argument);
  CHECK_NOTHROW(gamma_harmonic(0.99, 0.0, 1));
}

TEST_CASE("summed-weights inequality holds whenever the weight budget is met") {
  // If sum(1/mu_n) <= 1 then (sum z_n)^2 <= sum mu_n z_n^2 for every
  // absolutely summable z.  Fuzz over random weights and directions.
  std::mt19937 rng(20240817u);
  std::uniform_int_distribution<int> n_modes(1, 30);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::uniform_real_distribution<double> budget(0.05, 0.95);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = n_modes(rng);
    Eigen::VectorXd mu(K);
    double inv_sum = 0.0;
    for (int i = 0; i < K; ++i) {
      mu(i) = unif(rng);
      inv_sum += 1.0 / mu(i);
    }
    // Rescale so that sum(1/mu) equals a random value strictly below 1.
    const double target = budget(rng);
    mu *= inv_sum / target;
    Eigen::VectorXd z(K);
    for (int i = 0; i < K; ++i) z(i) = gauss(rng);
    CHECK(harmonic_bound_holds(z, mu));
  }
}

TEST_CASE("summed-weights inequality fails when the budget is exceeded") {
  // With sum(1/mu) = 1.1 > 1 the direction z_n = 1/mu_n violates the bound:
  // (sum z)^2 = 1.21 while sum mu z^2 = 1.1.
  const int K = 7;
  const Eigen::VectorXd mu = Eigen::VectorXd::Constant(K, K / 1.1);
  const Eigen::VectorXd z = Eigen::VectorXd::Constant(K, 1.1 / K);
  CHECK_FALSE(harmonic_bound_holds(z, mu));
  CHECK_FALSE(check_harmonic_condition(mu));

  // The budget condition is closed: exact equality is admissible.
  CHECK(check_harmonic_condition(Eigen::Vector2d(2.0, 2.0)));
  CHECK_FALSE(check_harmonic_condition(Eigen::Vector2d(2.0, 1.9)));
  CHECK_THROWS_AS(check_harmonic_condition(Eigen::Vector2d(2.0, -1.0)),
                  std::invalid_argument);
}

TEST_CASE("series evaluation brackets the closed form") {
  const double closed = gamma_harmonic(0.1, 0.2, 3).gamma;
  const SeriesBracket b = gamma_harmonic_series(0.1, 0.2, 3, 1000000L);
  CHECK(b.lower <= b.upper);
  CHECK(b.width() < 1e-9);
  CHECK(b.contains(closed, 1e-12));
  CHECK(rel_err(b.value(), closed) < 1e-10);
}

TEST_CASE("gain decreases with the number of designed modes") {
  double prev = gamma_harmonic(1.1, 0.0, 2).gamma;
  for (int N = 3; N <= 30; ++N) {
    const double g = gamma_harmonic(1.1, 0.0, N).gamma;
    CHECK(g < prev);
    prev = g;
  }
  CHECK(gamma_harmonic(1.1, 0.0, 1000).gamma < 1e-3);
}

TEST_CASE("weight budget is saturated by the harmonic allocation") {
  // The harmonic gain is defined so that sum_{n>=N} 1/mu_n = 1.  Check the
  // partial sum plus an integral tail bound reproduces the budget.
  const GainBreakdown g = gamma_harmonic(0.1, 0.2, 3);
  long double acc = 0.0L;
  const long M = 10000000L;
  for (long n = 3; n < M; ++n) {
    acc += 1.0L / static_cast<long double>(g.mu(static_cast<int>(n)));
  }
  // Remaining tail: sum_{n>=M} 1/mu_n ~ 2/(gamma*pi) * 1/M.
  const double tail = 2.0 / (g.gamma * kPi) / static_cast<double>(M);
  CHECK(std::abs(static_cast<double>(acc) + tail - 1.0) < 1e-6);
}

TEST_CASE("stable plants with negative shifted reaction are handled") {
  // q + sigma < 0 switches the closed form onto its hyperbolic branch.
  const double g = gamma_harmonic(-5.0, 0.0, 1).gamma;
  CHECK(g > 0.0);
  const SeriesBracket b = gamma_harmonic_series(-5.0, 0.0, 1, 1000000L);
  CHECK(b.contains(g, 1e-12));
}

TEST_CASE("near-resonant shifted reaction falls back to the series") {
  // s = q + sigma exactly at a squared integer makes the closed form's
  // cotangent singular; the implementation must still produce the (finite)
  // series value.
  const double exact = gamma_harmonic(3.8, 0.2, 3).gamma;  // s = 4
  CHECK(std::isfinite(exact));
  const SeriesBracket b = gamma_harmonic_series(3.8, 0.2, 3, 1000000L);
  CHECK(b.contains(exact, 1e-9 * exact));

  // Just outside the fallback window the closed form must agree with the
  // series despite the nearby pole.
  const double closed = gamma_harmonic(3.801, 0.2, 3).gamma;  // s = 4.001
  const SeriesBracket near_pole = gamma_harmonic_series(3.801, 0.2, 3, 1000000L);
  CHECK(rel_err(closed, near_pole.value()) < 1e-6);
}
