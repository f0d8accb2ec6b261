#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "heatctrl/modal.hpp"
#include "heatctrl/riccati.hpp"

namespace heatctrl {

// Closed-loop simulation scenario.  The plant is an M-mode spectral
// Galerkin truncation driven by the N-mode observer-based controller; the
// saturated-reaction nonlinearity f(z) = sigma z / (1 + sigma |z|) is
// evaluated pointwise on a P-point quadrature grid and projected back.
//
// The plant uses the design system's effective reaction coefficient (the
// decay-rate shift is folded in at construction); for alpha = 0 this is
// exactly the physical plant.
struct SimConfig {
  int M = 64;          // plant truncation (must satisfy M >= 4N)
  double dt = 1e-4;    // fixed step of the 4-stage explicit integrator
  double T = 20.0;     // horizon
  double h = 0.0;      // sampling period; 0 means continuous control
  int P = 512;         // quadrature points (must satisfy P >= 2M)
  double sigma = 0.0;  // nonlinearity strength of the simulated plant
  std::function<double(double)> ic;      // initial profile on [0, pi]
  std::vector<double> snapshot_times;    // field snapshots at these times
  bool keep_modes = false;               // retain per-sample coefficients
};

// Initial condition of the numerical study: x^3 - (3 pi / 2) x^2, chosen
// to satisfy the Neumann boundary conditions.
double polynomial_ic(double x);

struct SimTrace {
  Eigen::VectorXd t;
  Eigen::VectorXd state_norm;  // ||z(.,t)|| via Parseval over M modes
  Eigen::VectorXd err_norm;    // |zhat - z^N|
  Eigen::VectorXd u;           // applied control input
  Eigen::VectorXd y;           // boundary measurement z(0,t)
  Eigen::VectorXd zeta;        // residue sum_{n>=N} c_n z_n
  Eigen::VectorXd V;           // Lyapunov value (X, Y, gamma weighted)
  Eigen::MatrixXd z_modes;     // samples x M, only when keep_modes
  Eigen::MatrixXd zhat_modes;  // samples x N, only when keep_modes
  Eigen::VectorXd snapshot_x;             // 101-point field grid
  std::vector<double> snapshot_t;         // realized snapshot times
  std::vector<Eigen::VectorXd> snapshots; // field values per snapshot
  bool aborted = false;        // integration hit a non-finite state
  double abort_time = 0.0;     // last valid time when aborted
};

// Fourier coefficients of the initial profile over the first M modes on a
// P-point endpoint-included trapezoid grid (half-weight endpoints; exact
// to spectral accuracy for smooth profiles).  Refuses P < 2M (aliasing).
Eigen::VectorXd project_ic(const std::function<double(double)>& ic, int M,
                           int P);

// Modal coefficients of f(z) = sigma z / (1 + sigma |z|) for the field
// with the given coefficients, via the same quadrature grid.
Eigen::VectorXd nonlinearity_modal(const Eigen::VectorXd& coeffs, double sigma,
                                   int P);

// Evaluates the truncated cosine series at the given positions in [0, pi].
Eigen::VectorXd reconstruct_field(const Eigen::VectorXd& coeffs,
                                  const Eigen::VectorXd& xs);

// Integrates the coupled plant/observer system with u = -K zhat applied
// continuously (h = 0) or held between sampling instants (zero-order
// hold).  Fixed-step classical 4-stage explicit integrator; the step must
// satisfy dt * lambda_{M-1} <= 1 (explicit stability guard).  The trace is
// sampled every max(dt, T/2000).  A non-finite state aborts the run and
// marks the trace.
SimTrace simulate_closed_loop(const ModalSystem& sys,
                              const SynthesisResult& gains,
                              const SimConfig& cfg);

// Recomputes the Lyapunov value |z^N|^2_X + |e^N|^2_Y + gamma^{-1}
// sum_{n>=N} z_n^2 from the per-sample coefficients of a trace recorded
// with keep_modes.  Throws when the coefficients were not retained.
Eigen::VectorXd lyapunov_trace(const SimTrace& trace, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd& Y, double gamma, int N);

}  // namespace heatctrl
