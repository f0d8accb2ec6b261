#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "heatctrl/modal.hpp"

using heatctrl::build_modal_system;
using heatctrl::eval_eigenfunction;
using heatctrl::min_modes;
using heatctrl::ModalSystem;
using heatctrl::PlantParams;

namespace {
constexpr double kPi = std::numbers::pi;

PlantParams make_params(double q, double sigma = 0.0, double alpha = 0.0) {
  PlantParams p;
  p.q = q;
  p.sigma = sigma;
  p.alpha = alpha;
  return p;
}
}  // namespace

TEST_CASE("parameter validation rejects non-physical plants") {
  CHECK_THROWS_AS(make_params(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_params(-1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_params(0.1, -0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_params(0.1, 0.0, -0.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_params(std::nan("")).validate(), std::invalid_argument);
  CHECK_NOTHROW(make_params(0.1, 0.2).validate());
}

TEST_CASE("decay requirement folds into the effective reaction coefficient") {
  const PlantParams p = make_params(0.1, 0.2, 0.9);
  CHECK(p.effective_q() == 0.1 + 0.9);
  // Designing for decay rate alpha at reaction q must be bitwise identical
  // to designing for no decay at reaction q + alpha.
  const ModalSystem with_alpha = build_modal_system(p, 3);
  const ModalSystem folded = build_modal_system(make_params(1.0, 0.2), 3);
  CHECK((with_alpha.A.array() == folded.A.array()).all());
  CHECK((with_alpha.B.array() == folded.B.array()).all());
  CHECK((with_alpha.C.array() == folded.C.array()).all());
  CHECK(with_alpha.q_eff == folded.q_eff);
}

TEST_CASE("mode-count rule returns the smallest admissible dimension") {
  CHECK(min_modes(make_params(0.1, 0.2)) == 1);      // 1 > 0.3
  CHECK(min_modes(make_params(1.1)) == 2);           // 1 <= 1.1 < 4
  CHECK(min_modes(make_params(0.1, 0.2, 0.9)) == 2); // threshold 1.2
  CHECK(min_modes(make_params(4.0)) == 3);           // 4 <= 4 (strict)
  CHECK(min_modes(make_params(99.5, 0.4)) == 10);    // 81 <= 99.9 < 100
}

TEST_CASE("state matrices have the spectral structure of the heat operator") {
  const ModalSystem sys = build_modal_system(make_params(0.1, 0.2), 3);
  REQUIRE(sys.N == 3);
  REQUIRE(sys.lambda.size() == 3);
  CHECK(sys.lambda(0) == 0.0);
  CHECK(sys.lambda(1) == 1.0);
  CHECK(sys.lambda(2) == 4.0);

  // A = diag(q_eff - n^2), exactly diagonal.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        CHECK(sys.A(i, j) == doctest::Approx(0.1 - i * i).epsilon(1e-15));
      } else {
        CHECK(sys.A(i, j) == 0.0);
      }
    }
  }

  // Input vector: eigenfunction traces at the controlled end x = pi, with
  // the exact alternating sign (no cosine round-off).
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  const double sqrt_2_pi = std::sqrt(2.0 / kPi);
  CHECK(sys.B(0) == inv_sqrt_pi);
  CHECK(sys.B(1) == -sqrt_2_pi);
  CHECK(sys.B(2) == sqrt_2_pi);

  // Output vector: traces at the measured end x = 0, all positive.
  CHECK(sys.C(0) == inv_sqrt_pi);
  CHECK(sys.C(1) == sqrt_2_pi);
  CHECK(sys.C(2) == sqrt_2_pi);
}

TEST_CASE("requesting fewer modes than admissible is refused") {
  CHECK_THROWS_AS(build_modal_system(make_params(1.1), 1),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_modal_system(make_params(99.5, 0.4), 9),
                       doctest::Contains("N >= 10"), std::invalid_argument);
  CHECK_NOTHROW(build_modal_system(make_params(1.1), 2));
}

TEST_CASE("eigenfunctions are orthonormal under the trapezoid inner product") {
  // Trapezoid quadrature integrates products of these cosines exactly for
  // the frequencies involved, so the Gram matrix should be the identity to
  // rounding accuracy.
  constexpr int P = 512;
  constexpr int n_max = 20;
  const double dx = kPi / (P - 1);
  for (int m = 0; m <= n_max; ++m) {
    for (int n = m; n <= n_max; ++n) {
      double acc = 0.0;
      for (int j = 0; j < P; ++j) {
        const double x = j * dx;
        const double w = (j == 0 || j == P - 1) ? 0.5 : 1.0;
        acc += w * eval_eigenfunction(m, x) * eval_eigenfunction(n, x);
      }
      acc *= dx;
      const double expect = (m == n) ? 1.0 : 0.0;
      CHECK(std::abs(acc - expect) < 1e-10);
    }
  }
}

TEST_CASE("eigenfunction evaluation rejects out-of-range arguments") {
  CHECK_THROWS_AS(eval_eigenfunction(-1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(eval_eigenfunction(1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(eval_eigenfunction(1, kPi + 0.1), std::invalid_argument);
  CHECK(eval_eigenfunction(0, 1.0) == doctest::Approx(1.0 / std::sqrt(kPi)));
  CHECK(eval_eigenfunction(2, 0.0) == doctest::Approx(std::sqrt(2.0 / kPi)));
}
