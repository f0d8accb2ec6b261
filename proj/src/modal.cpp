#include "heatctrl/modal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatctrl {

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvSqrtPi = 1.0 / std::sqrt(kPi);
const double kSqrt2OverPi = std::sqrt(2.0 / kPi);
}  // namespace

void PlantParams::validate() const {
  if (!std::isfinite(q) || !std::isfinite(sigma) || !std::isfinite(alpha)) {
    throw std::invalid_argument("plant parameters must be finite");
  }
  if (q <= 0.0) {
    throw std::invalid_argument("reaction coefficient q must be positive");
  }
  if (sigma < 0.0) {
    throw std::invalid_argument("Lipschitz bound sigma must be nonnegative");
  }
  if (alpha < 0.0) {
    throw std::invalid_argument("decay rate alpha must be nonnegative");
  }
}

int min_modes(const PlantParams& params) {
  params.validate();
  const double threshold = params.effective_q() + params.sigma;
  int N = 1;
  while (static_cast<double>(N) * N <= threshold) ++N;
  return N;
}

ModalSystem build_modal_system(const PlantParams& params, int N) {
  const int N_min = min_modes(params);
  if (N < N_min) {
    throw std::invalid_argument(
        "mode count too small: need N^2 > q + alpha + sigma (N >= " +
        std::to_string(N_min) + ")");
  }
  ModalSystem sys;
  sys.N = N;
  sys.q_eff = params.effective_q();
  sys.lambda.resize(N);
  sys.B.resize(N);
  sys.C.resize(N);
  for (int n = 0; n < N; ++n) {
    sys.lambda(n) = static_cast<double>(n) * n;
    if (n == 0) {
      sys.B(n) = kInvSqrtPi;
      sys.C(n) = kInvSqrtPi;
    } else {
      sys.B(n) = (n % 2 == 0 ? 1.0 : -1.0) * kSqrt2OverPi;  // cos(n*pi)
      sys.C(n) = kSqrt2OverPi;
    }
  }
  sys.A = (sys.q_eff - sys.lambda.array()).matrix().asDiagonal();
  return sys;
}

double eval_eigenfunction(int n, double x) {
  if (n < 0) throw std::invalid_argument("mode index must be nonnegative");
  if (!(x >= 0.0 && x <= kPi)) {
    throw std::invalid_argument("position outside [0, pi]");
  }
  if (n == 0) return kInvSqrtPi;
  return kSqrt2OverPi * std::cos(n * x);
}

}  // namespace heatctrl
