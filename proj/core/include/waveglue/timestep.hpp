#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

namespace waveglue {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Two-step fourth-order integrator for z_tt = Q z + g(t):
/// z^{n+1} = 2 z^n - z^{n-1} + dt^2 (Q z^n + g^n) + dt^4/12 (Q (Q z^n + g^n) + g_tt^n).
struct TimeIntegrator {
  double dt = 0.0;
  double cfl = 0.0;
  double rho_estimate = 0.0;  // spectral radius of -Q
  Vec z_prev, z_cur;
  double t = 0.0;
  long step_count = 0;
};

/// Stability constant of the update: dt <= c0 / sqrt(rho) with c0 = 2*sqrt(3).
inline constexpr double kStepStabilityConstant = 3.4641016151377544;

/// Power iteration on -Q for the spectral radius; dt = cfl * c0 / sqrt(rho).
TimeIntegrator estimate_dt(const SpMat& Q, double cfl, int max_iter = 300, double tol = 1e-6,
                           unsigned seed = 12345);

/// Fourth-order Taylor start from (z0, v0); g, g_t, g_tt evaluated at t = 0.
void startup(const SpMat& Q, TimeIntegrator& ti, const Vec& z0, const Vec& v0, const Vec& g0,
             const Vec& gt0, const Vec& gtt0);

/// One step; stores Q z^n + g^n in qz_scratch for reuse (energy monitoring).
/// Throws on non-finite values (instability detector).
void step(const SpMat& Q, TimeIntegrator& ti, const Vec& g, const Vec& g_tt, Vec* qz_out = nullptr);

/// Centered velocity with the dt^2/6 z_ttt correction, fourth-order accurate:
/// v ~ vc - dt^2/6 * (Q vc + g_t) with vc the centered difference.
Vec corrected_velocity(const SpMat& Q, const Vec& z_next, const Vec& z_prev, const Vec& g_t,
                       double dt);

}  // namespace waveglue
