#include "heatctrl/lmi.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace heatctrl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kCertTol = 1e-8;   // accepted lambda_max(Psi)
constexpr double kPdFloor = 1e-9;   // PD margin kept by the projection

int check_setup(const SampledSetup& s) {
  const int N = static_cast<int>(s.A.rows());
  if (s.A.cols() != N || s.B.size() != N || s.C.size() != N ||
      s.K.size() != N || s.L.size() != N || s.X.rows() != N ||
      s.X.cols() != N) {
    throw std::invalid_argument("sampled-data setup dimensions inconsistent");
  }
  return N;
}

double lambda_max_sym(const MatrixXd& S) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

// Projection of a symmetric matrix onto {M : M >= kPdFloor * I}.
MatrixXd project_pd_floor(const MatrixXd& M) {
  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  const VectorXd w = es.eigenvalues().cwiseMax(kPdFloor);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

// Symmetric basis E_ij (unit diagonal / symmetrized off-diagonal pair) of
// the N x N symmetric matrices, in (i <= j) order.
std::vector<MatrixXd> symmetric_basis(int N) {
  std::vector<MatrixXd> basis;
  basis.reserve(N * (N + 1) / 2);
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      MatrixXd E = MatrixXd::Zero(N, N);
      E(i, j) = 1.0;
      E(j, i) = 1.0;
      basis.push_back(E);
    }
  }
  return basis;
}

struct GridSearchResult {
  double lambda_max = std::numeric_limits<double>::infinity();
  PsiVars vars;
};

// Stage 1: P_z = X, P_e = Y warm start, scalar W sweeps on a log grid.
GridSearchResult stage1_grid(const SampledSetup& setup, double h) {
  const int N = static_cast<int>(setup.A.rows());
  const MatrixXd I = MatrixXd::Identity(N, N);
  constexpr int kGrid = 60;
  GridSearchResult best;
  PsiVars v;
  v.P_z = setup.X;
  v.P_e = setup.Y;
  for (int ia = 0; ia < kGrid; ++ia) {
    const double a = std::pow(10.0, -3.0 + 9.0 * ia / (kGrid - 1));
    v.W_z = a * I;
    for (int ib = 0; ib < kGrid; ++ib) {
      const double b = std::pow(10.0, -3.0 + 9.0 * ib / (kGrid - 1));
      v.W_e = b * I;
      const double lm = lambda_max_sym(assemble_psi(setup, h, v));
      if (lm < best.lambda_max) {
        best.lambda_max = lm;
        best.vars = v;
      }
    }
  }
  return best;
}

// Stage 2: projected subgradient descent on lambda_max(Psi(V)) with Polyak
// steps toward target 0.  Returns the best iterate seen.
GridSearchResult stage2_subgradient(const SampledSetup& setup, double h,
                                    const PsiVars& start, int budget) {
  const int N = static_cast<int>(setup.A.rows());
  const std::vector<MatrixXd> basis = symmetric_basis(N);
  const int per_var = static_cast<int>(basis.size());
  const int dim = 4 * per_var;

  // Psi is affine in the variables: precompute the response of each
  // symmetric basis element of each variable slot.
  PsiVars zero;
  zero.P_z = zero.P_e = zero.W_z = zero.W_e = MatrixXd::Zero(N, N);
  const MatrixXd Psi0 = assemble_psi(setup, h, zero);
  std::vector<MatrixXd> resp;
  resp.reserve(dim);
  for (int slot = 0; slot < 4; ++slot) {
    for (const MatrixXd& E : basis) {
      PsiVars vb = zero;
      (slot == 0 ? vb.P_z
       : slot == 1 ? vb.P_e
       : slot == 2 ? vb.W_z
                   : vb.W_e) = E;
      resp.push_back(assemble_psi(setup, h, vb) - Psi0);
    }
  }

  PsiVars V;
  V.P_z = project_pd_floor(start.P_z);
  V.P_e = project_pd_floor(start.P_e);
  V.W_z = project_pd_floor(start.W_z);
  V.W_e = project_pd_floor(start.W_e);

  GridSearchResult best;
  for (int it = 0; it < budget; ++it) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(assemble_psi(setup, h, V));
    const double f = es.eigenvalues().maxCoeff();
    if (f < best.lambda_max) {
      best.lambda_max = f;
      best.vars = V;
    }
    if (f <= kCertTol) break;

    const VectorXd u =
        es.eigenvectors().col(es.eigenvalues().size() - 1);
    VectorXd g(dim);
    for (int k = 0; k < dim; ++k) g(k) = u.dot(resp[k] * u);
    const double gn2 = g.squaredNorm();
    if (gn2 < 1e-30) break;
    const double step = f / gn2;

    int k = 0;
    for (int slot = 0; slot < 4; ++slot) {
      MatrixXd G = MatrixXd::Zero(N, N);
      for (const MatrixXd& E : basis) G += g(k++) * E;
      MatrixXd& slot_ref = slot == 0   ? V.P_z
                           : slot == 1 ? V.P_e
                           : slot == 2 ? V.W_z
                                       : V.W_e;
      slot_ref = project_pd_floor(slot_ref - step * G);
    }
  }
  return best;
}

std::optional<SampledCert> make_cert(const PsiVars& vars, double h,
                                     double lambda_max) {
  if (!(lambda_max <= kCertTol)) return std::nullopt;
  SampledCert cert;
  cert.P_z = vars.P_z;
  cert.P_e = vars.P_e;
  cert.W_z = vars.W_z;
  cert.W_e = vars.W_e;
  cert.h = h;
  cert.lambda_max = lambda_max;
  return cert;
}

}  // namespace

MatrixXd assemble_psi(const SampledSetup& setup, double h,
                      const PsiVars& vars) {
  const int N = check_setup(setup);
  if (vars.P_z.rows() != N || vars.P_z.cols() != N || vars.P_e.rows() != N ||
      vars.P_e.cols() != N || vars.W_z.rows() != N || vars.W_z.cols() != N ||
      vars.W_e.rows() != N || vars.W_e.cols() != N) {
    throw std::invalid_argument("decision-variable dimensions inconsistent");
  }
  if (h < 0.0) throw std::invalid_argument("sampling period h must be >= 0");

  const MatrixXd& A = setup.A;
  const VectorXd& B = setup.B;
  const Eigen::RowVectorXd& K = setup.K;
  const VectorXd& L = setup.L;
  const MatrixXd& X = setup.X;
  const double gamma = setup.gamma;
  const double sigma = setup.sigma;
  const MatrixXd I = MatrixXd::Identity(N, N);

  const MatrixXd KtK = K.transpose() * K;
  const MatrixXd ABK = A - B * K;
  const MatrixXd ALC = A - L * setup.C + gamma * sigma * X;
  const MatrixXd& Pz = vars.P_z;
  const MatrixXd& Pe = vars.P_e;
  const MatrixXd& Wz = vars.W_z;
  const MatrixXd& We = vars.W_e;

  // Block layout; the nonlinearity block is eliminated when sigma = 0.
  const bool elim = sigma == 0.0;
  std::vector<int> sizes = {N, N};
  if (!elim) sizes.push_back(N);
  sizes.insert(sizes.end(), {1, N, N, N, N});
  std::vector<int> off(sizes.size() + 1, 0);
  for (size_t i = 0; i < sizes.size(); ++i) off[i + 1] = off[i] + sizes[i];

  const int iz = 0, ie = 1;
  const int iF = elim ? -1 : 2;
  const int iw = elim ? 2 : 3;  // residue (scalar)
  const int idz = iw + 1, ide = iw + 2, isz = iw + 3, ise = iw + 4;

  MatrixXd Psi = MatrixXd::Zero(off.back(), off.back());
  const auto put = [&](int bi, int bj, const MatrixXd& block) {
    Psi.block(off[bi], off[bj], sizes[bi], sizes[bj]) = block;
    if (bi != bj) {
      Psi.block(off[bj], off[bi], sizes[bj], sizes[bi]) = block.transpose();
    }
  };

  put(iz, iz, Pz * ABK + ABK.transpose() * Pz + KtK + (sigma / gamma) * I);
  put(iz, ie, -Pz * B * K + gamma * sigma * X * Pe + KtK);
  put(iz, idz, KtK - Pz * B * K);
  put(iz, ide, KtK - Pz * B * K);
  put(iz, isz, h * ABK.transpose() * Wz);
  put(iz, ise, h * gamma * sigma * X * We);
  put(ie, ie, Pe * ALC + ALC.transpose() * Pe + KtK);
  put(ie, iw, Pe * L);
  put(ie, idz, KtK);
  put(ie, ide, KtK);
  put(ie, isz, -h * K.transpose() * B.transpose() * Wz);
  put(ie, ise, h * ALC.transpose() * We);
  if (iF >= 0) {
    put(iz, iF, gamma * sigma * Pz);
    put(ie, iF, -gamma * sigma * Pe);
    put(iF, iF, -gamma * sigma * I);
    put(iF, isz, h * gamma * sigma * Wz);
    put(iF, ise, -h * gamma * sigma * We);
  }
  put(iw, iw, MatrixXd::Constant(1, 1, -1.0 / (gamma * gamma)));
  put(iw, ise, h * L.transpose() * We);
  constexpr double kPiSqOver4 = std::numbers::pi * std::numbers::pi / 4.0;
  put(idz, idz, -kPiSqOver4 * Wz + KtK);
  put(idz, ide, KtK);
  put(idz, isz, -h * K.transpose() * B.transpose() * Wz);
  put(ide, ide, -kPiSqOver4 * We + KtK);
  put(ide, isz, -h * K.transpose() * B.transpose() * Wz);
  put(isz, isz, -Wz);
  put(ise, ise, -We);
  return Psi;
}

std::optional<SampledCert> feasibility_search(const SampledSetup& setup,
                                              double h, int budget,
                                              const PsiVars* seed) {
  check_setup(setup);
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");

  // Seeded continuation: evaluate (and descend from) the seed first.
  if (seed != nullptr) {
    const double lm = lambda_max_sym(assemble_psi(setup, h, *seed));
    if (lm <= kCertTol) return make_cert(*seed, h, lm);
    const GridSearchResult r = stage2_subgradient(setup, h, *seed, budget);
    if (r.lambda_max <= kCertTol) return make_cert(r.vars, h, r.lambda_max);
  }

  const GridSearchResult g = stage1_grid(setup, h);
  if (g.lambda_max <= kCertTol) return make_cert(g.vars, h, g.lambda_max);

  const GridSearchResult r = stage2_subgradient(setup, h, g.vars, budget);
  return make_cert(r.vars, h, r.lambda_max);
}

double max_h(const SampledSetup& setup, double h_hi, double tol,
             SampledCert* cert) {
  if (!(tol > 0.0) || !(h_hi > 0.0)) {
    throw std::invalid_argument("h_hi and tol must be positive");
  }
  const auto try_h = [&](double h,
                         const std::optional<SampledCert>& prev)
      -> std::optional<SampledCert> {
    if (prev.has_value()) {
      PsiVars seed;
      seed.P_z = prev->P_z;
      seed.P_e = prev->P_e;
      seed.W_z = prev->W_z;
      seed.W_e = prev->W_e;
      return feasibility_search(setup, h, 1000, &seed);
    }
    return feasibility_search(setup, h, 1000);
  };

  // Probe a small sampling period to obtain a first certificate; without one
  // the search reports 0 (which is not a proof of infeasibility).
  double lo = std::min(h_hi, std::max(tol, 0.01));
  std::optional<SampledCert> best = try_h(lo, std::nullopt);
  if (!best.has_value() && tol < lo) {
    lo = std::min(tol, h_hi);
    best = try_h(lo, std::nullopt);
  }
  if (!best.has_value()) return 0.0;

  double hi = h_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const std::optional<SampledCert> c = try_h(mid, best);
    if (c.has_value()) {
      lo = mid;
      best = c;
    } else {
      hi = mid;
    }
  }

  // Continuation climb: the bisection can under-shoot when a midpoint is too
  // far from the current warm start for the subgradient stage to track.
  // Walk upward in tol-sized steps, re-seeding from each fresh certificate;
  // a few consecutive failures are tolerated because a failed heuristic
  // search does not certify infeasibility.
  int misses = 0;
  for (double h = lo + tol; h <= h_hi + 1e-15 && misses < 3;
       h += tol) {
    const std::optional<SampledCert> c = try_h(std::min(h, h_hi), best);
    if (c.has_value()) {
      lo = std::min(h, h_hi);
      best = c;
      misses = 0;
    } else {
      ++misses;
    }
  }

  if (cert != nullptr) *cert = *best;
  return lo;
}

}  // namespace heatctrl
