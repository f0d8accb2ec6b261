#include "heatctrl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatctrl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;

// Uniform grid on [0, pi] with half-weighted endpoints: trapezoid
// quadrature that is spectrally accurate for cosine expansions.
struct QuadGrid {
  VectorXd xs;    // P points, endpoints included
  MatrixXd Phi;   // P x M eigenfunction values
  MatrixXd PhiW;  // M x P projection (quadrature-weighted transpose)

  QuadGrid(int P, int M) {
    if (M < 1) throw std::invalid_argument("mode count must be >= 1");
    if (P < 2 * M) {
      throw std::invalid_argument(
          "quadrature too coarse: need P >= 2M to avoid aliasing");
    }
    const double dx = kPi / (P - 1);
    xs.resize(P);
    VectorXd w(P);
    for (int j = 0; j < P; ++j) {
      xs(j) = j * dx;
      w(j) = (j == 0 || j == P - 1) ? 0.5 * dx : dx;
    }
    Phi.resize(P, M);
    const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    const double sqrt_2_pi = std::sqrt(2.0 / kPi);
    for (int j = 0; j < P; ++j) {
      Phi(j, 0) = inv_sqrt_pi;
      for (int n = 1; n < M; ++n) Phi(j, n) = sqrt_2_pi * std::cos(n * xs(j));
    }
    PhiW = Phi.transpose() * w.asDiagonal();
  }
};

// Boundary traces of the eigenfunctions, with exact signs (cos(n pi) is
// evaluated symbolically, not through std::cos).
void boundary_coefficients(int M, VectorXd* b, VectorXd* c) {
  const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
  const double sqrt_2_pi = std::sqrt(2.0 / kPi);
  b->resize(M);
  c->resize(M);
  for (int n = 0; n < M; ++n) {
    if (n == 0) {
      (*b)(n) = inv_sqrt_pi;
      (*c)(n) = inv_sqrt_pi;
    } else {
      (*b)(n) = (n % 2 == 0 ? 1.0 : -1.0) * sqrt_2_pi;
      (*c)(n) = sqrt_2_pi;
    }
  }
}

}  // namespace

double polynomial_ic(double x) { return x * x * x - 1.5 * kPi * x * x; }

VectorXd project_ic(const std::function<double(double)>& ic, int M, int P) {
  if (!ic) throw std::invalid_argument("initial condition not set");
  const QuadGrid grid(P, M);
  VectorXd field(grid.xs.size());
  for (int j = 0; j < field.size(); ++j) field(j) = ic(grid.xs(j));
  return grid.PhiW * field;
}

VectorXd nonlinearity_modal(const VectorXd& coeffs, double sigma, int P) {
  if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  const int M = static_cast<int>(coeffs.size());
  if (sigma == 0.0) return VectorXd::Zero(M);
  const QuadGrid grid(P, M);
  const VectorXd field = grid.Phi * coeffs;
  const VectorXd fval =
      (sigma * field.array() / (1.0 + sigma * field.array().abs())).matrix();
  return grid.PhiW * fval;
}

VectorXd reconstruct_field(const VectorXd& coeffs, const VectorXd& xs) {
  VectorXd values = VectorXd::Zero(xs.size());
  for (int i = 0; i < xs.size(); ++i) {
    if (!(xs(i) >= 0.0 && xs(i) <= kPi)) {
      throw std::invalid_argument("position outside [0, pi]");
    }
    double acc = 0.0;
    for (int n = 0; n < coeffs.size(); ++n) {
      acc += coeffs(n) * eval_eigenfunction(n, xs(i));
    }
    values(i) = acc;
  }
  return values;
}

SimTrace simulate_closed_loop(const ModalSystem& sys,
                              const SynthesisResult& gains,
                              const SimConfig& cfg) {
  const int N = sys.N;
  const int M = cfg.M;
  if (M <= N || M < 4 * N) {
    throw std::invalid_argument("plant truncation too small: need M >= 4N");
  }
  if (!(cfg.dt > 0.0) || !(cfg.T >= 0.0)) {
    throw std::invalid_argument("dt must be positive and T nonnegative");
  }
  if (cfg.h < 0.0 || (cfg.h != 0.0 && cfg.h < cfg.dt)) {
    throw std::invalid_argument("sampling period must be 0 or >= dt");
  }
  if (cfg.sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  const double lam_max = static_cast<double>(M - 1) * (M - 1);
  if (cfg.dt * lam_max > 1.0) {
    throw std::invalid_argument(
        "explicit stability guard violated: dt * lambda_{M-1} = " +
        std::to_string(cfg.dt * lam_max) + " exceeds 1");
  }
  if (gains.K.size() != N || gains.L.size() != N || gains.X.rows() != N ||
      gains.Y.rows() != N || !(gains.gamma > 0.0)) {
    throw std::invalid_argument("gain set inconsistent with the design model");
  }

  const QuadGrid grid(cfg.P, M);
  VectorXd a_plant(M), b_plant, c_plant;
  boundary_coefficients(M, &b_plant, &c_plant);
  for (int n = 0; n < M; ++n) {
    a_plant(n) = sys.q_eff - static_cast<double>(n) * n;
  }

  const bool continuous = cfg.h == 0.0;
  const double sigma = cfg.sigma;
  const std::function<double(double)> ic =
      cfg.ic ? cfg.ic : std::function<double(double)>(polynomial_ic);

  VectorXd z = project_ic(ic, M, cfg.P);
  VectorXd zhat = VectorXd::Zero(N);

  // Scratch buffers for the right-hand side (the hot path).
  VectorXd field(cfg.P), fval(cfg.P), fcoef(M);
  const auto rhs = [&](const VectorXd& zs, const VectorXd& zhs, double u_held,
                       VectorXd& dz, VectorXd& dzh) {
    const double u = continuous ? -(gains.K * zhs)(0) : u_held;
    if (sigma > 0.0) {
      field.noalias() = grid.Phi * zs;
      fval = (sigma * field.array() / (1.0 + sigma * field.array().abs()))
                 .matrix();
      fcoef.noalias() = grid.PhiW * fval;
      dz = a_plant.cwiseProduct(zs) + b_plant * u + fcoef;
    } else {
      dz = a_plant.cwiseProduct(zs) + b_plant * u;
    }
    const double y = c_plant.dot(zs);
    const double innovation = (sys.C * zhs)(0) - y;
    dzh = sys.A * zhs + sys.B * u - gains.L * innovation;
  };

  const long n_steps = std::lround(cfg.T / cfg.dt);
  const double stride = std::max(cfg.dt, cfg.T / 2000.0);
  const long every = std::max<long>(1, std::lround(stride / cfg.dt));

  std::vector<double> snap_times(cfg.snapshot_times);
  std::sort(snap_times.begin(), snap_times.end());
  size_t snap_idx = 0;
  const int kSnapPoints = 101;
  VectorXd snap_x(kSnapPoints);
  for (int i = 0; i < kSnapPoints; ++i) snap_x(i) = kPi * i / (kSnapPoints - 1);

  SimTrace trace;
  trace.snapshot_x = snap_x;
  std::vector<double> ts, norms, errs, us, ys, zetas, Vs;
  std::vector<VectorXd> zrows, zhrows;

  double u_held = 0.0;
  long hold_count = 0;
  VectorXd k1z(M), k2z(M), k3z(M), k4z(M);
  VectorXd k1h(N), k2h(N), k3h(N), k4h(N);

  const auto record = [&](double t) {
    ts.push_back(t);
    norms.push_back(z.norm());
    const VectorXd e = zhat - z.head(N);
    errs.push_back(e.norm());
    us.push_back(continuous ? -(gains.K * zhat)(0) : u_held);
    ys.push_back(c_plant.dot(z));
    zetas.push_back(c_plant.tail(M - N).dot(z.tail(M - N)));
    const double Vz = z.head(N).dot(gains.X * z.head(N));
    const double Ve = e.dot(gains.Y * e);
    const double Vinf = z.tail(M - N).squaredNorm() / gains.gamma;
    Vs.push_back(Vz + Ve + Vinf);
    if (cfg.keep_modes) {
      zrows.push_back(z);
      zhrows.push_back(zhat);
    }
  };

  for (long i = 0; i <= n_steps; ++i) {
    const double t = i * cfg.dt;
    if (!continuous && t >= hold_count * cfg.h - 0.5 * cfg.dt) {
      u_held = -(gains.K * zhat)(0);
      ++hold_count;
    }
    while (snap_idx < snap_times.size() &&
           t >= snap_times[snap_idx] - 0.5 * cfg.dt) {
      trace.snapshot_t.push_back(t);
      trace.snapshots.push_back(reconstruct_field(z, snap_x));
      ++snap_idx;
    }
    if (i % every == 0 || i == n_steps) record(t);
    if (i == n_steps) break;

    rhs(z, zhat, u_held, k1z, k1h);
    rhs(z + 0.5 * cfg.dt * k1z, zhat + 0.5 * cfg.dt * k1h, u_held, k2z, k2h);
    rhs(z + 0.5 * cfg.dt * k2z, zhat + 0.5 * cfg.dt * k2h, u_held, k3z, k3h);
    rhs(z + cfg.dt * k3z, zhat + cfg.dt * k3h, u_held, k4z, k4h);
    z += (cfg.dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    zhat += (cfg.dt / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);

    if (!z.allFinite() || !zhat.allFinite()) {
      trace.aborted = true;
      trace.abort_time = t;
      break;
    }
  }

  const auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), v.size()).eval();
  };
  trace.t = to_vec(ts);
  trace.state_norm = to_vec(norms);
  trace.err_norm = to_vec(errs);
  trace.u = to_vec(us);
  trace.y = to_vec(ys);
  trace.zeta = to_vec(zetas);
  trace.V = to_vec(Vs);
  if (cfg.keep_modes) {
    trace.z_modes.resize(zrows.size(), M);
    trace.zhat_modes.resize(zhrows.size(), N);
    for (size_t r = 0; r < zrows.size(); ++r) {
      trace.z_modes.row(r) = zrows[r].transpose();
      trace.zhat_modes.row(r) = zhrows[r].transpose();
    }
  }
  return trace;
}

VectorXd lyapunov_trace(const SimTrace& trace, const MatrixXd& X,
                        const MatrixXd& Y, double gamma, int N) {
  if (trace.z_modes.rows() == 0 || trace.zhat_modes.rows() == 0) {
    throw std::invalid_argument(
        "per-mode coefficients not retained: rerun with keep_modes");
  }
  if (X.rows() != N || Y.rows() != N || trace.z_modes.cols() < N ||
      trace.zhat_modes.cols() != N) {
    throw std::invalid_argument("dimension mismatch in Lyapunov evaluation");
  }
  const long S = trace.z_modes.rows();
  const long M = trace.z_modes.cols();
  VectorXd V(S);
  for (long r = 0; r < S; ++r) {
    const VectorXd zN = trace.z_modes.row(r).head(N).transpose();
    const VectorXd e = trace.zhat_modes.row(r).transpose() - zN;
    const double Vinf =
        trace.z_modes.row(r).tail(M - N).squaredNorm() / gamma;
    V(r) = zN.dot(X * zN) + e.dot(Y * e) + Vinf;
  }
  return V;
}

}  // namespace heatctrl
