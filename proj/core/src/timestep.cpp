#include "waveglue/timestep.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace waveglue {

TimeIntegrator estimate_dt(const SpMat& Q, double cfl, int max_iter, double tol, unsigned seed) {
  if (cfl <= 0.0) throw std::invalid_argument("estimate_dt: cfl must be positive");
  const int N = static_cast<int>(Q.rows());
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Vec v(N);
  for (int i = 0; i < N; ++i) v(i) = dist(rng);
  v.normalize();
  double lam = 0.0, lam_prev = 0.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = -(Q * v);
    const double nw = w.norm();
    if (nw == 0.0) throw std::runtime_error("estimate_dt: power iteration hit the null space");
    lam = nw;
    v = w / nw;
    if (it > 4 && std::abs(lam - lam_prev) <= tol * lam) {
      converged = true;
      break;
    }
    lam_prev = lam;
  }
  if (!converged && std::abs(lam - lam_prev) > 50 * tol * lam)
    throw std::runtime_error("estimate_dt: power iteration stagnated");
  TimeIntegrator ti;
  ti.cfl = cfl;
  ti.rho_estimate = lam * 1.02;  // slack for unconverged tail modes
  ti.dt = cfl * kStepStabilityConstant / std::sqrt(ti.rho_estimate);
  return ti;
}

void startup(const SpMat& Q, TimeIntegrator& ti, const Vec& z0, const Vec& v0, const Vec& g0,
             const Vec& gt0, const Vec& gtt0) {
  const double dt = ti.dt;
  Vec a0 = Q * z0;  // z_tt(0)
  if (g0.size()) a0 += g0;
  Vec a1 = Q * v0;  // z_ttt(0)
  if (gt0.size()) a1 += gt0;
  Vec a2 = Q * a0;  // z_tttt(0)
  if (gtt0.size()) a2 += gtt0;
  ti.z_prev = z0;
  ti.z_cur = z0 + dt * v0 + (dt * dt / 2.0) * a0 + (dt * dt * dt / 6.0) * a1 +
             (dt * dt * dt * dt / 24.0) * a2;
  ti.t = dt;
  ti.step_count = 1;
}

void step(const SpMat& Q, TimeIntegrator& ti, const Vec& g, const Vec& g_tt, Vec* qz_out) {
  const double dt = ti.dt, dt2 = dt * dt;
  Vec y = Q * ti.z_cur;
  if (g.size()) y += g;
  Vec y2 = Q * y;
  if (g_tt.size()) y2 += g_tt;
  Vec z_next = 2.0 * ti.z_cur - ti.z_prev + dt2 * y + (dt2 * dt2 / 12.0) * y2;
  if (!z_next.allFinite())
    throw std::runtime_error("step: non-finite state (instability detected) at t = " +
                             std::to_string(ti.t));
  if (qz_out) *qz_out = std::move(y);
  ti.z_prev = std::move(ti.z_cur);
  ti.z_cur = std::move(z_next);
  ti.t += dt;
  ++ti.step_count;
}

Vec corrected_velocity(const SpMat& Q, const Vec& z_next, const Vec& z_prev, const Vec& g_t,
                       double dt) {
  Vec vc = (z_next - z_prev) / (2.0 * dt);
  Vec a = Q * vc;
  if (g_t.size()) a += g_t;
  return vc - (dt * dt / 6.0) * a;
}

}  // namespace waveglue
