#include "waveglue/runner.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "waveglue/hybrid1d.hpp"
#include "waveglue/hybrid2d.hpp"
#include "waveglue/matrix_io.hpp"
#include "waveglue/snell.hpp"
#include "waveglue/timestep.hpp"

namespace waveglue {

namespace {

struct ForcingSet {
  std::function<Vec(double)> g, g_t, g_tt;
  bool active = false;
};

double rms(const Vec& e) { return std::sqrt(e.squaredNorm() / static_cast<double>(e.size())); }

// Advance to T (dt already snapped so nsteps*dt = T); optionally monitor the
// energy through the corrected velocity each step.
void time_loop(const SpMat& Q, const SpMat& Htilde, TimeIntegrator& ti, long nsteps,
               const ForcingSet& F, bool monitor_energy, RunResult& out) {
  const Vec zero;
  Vec qz;
  double E0 = 0.0;
  bool have_E0 = false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long ns = 0;
  while (ti.step_count < nsteps) {
    const double tn = ti.t;
    const Vec z_nm1 = ti.z_prev;
    const Vec g = F.active ? F.g(tn) : zero;
    const Vec gtt = F.active ? F.g_tt(tn) : zero;
    step(Q, ti, g, gtt, &qz);
    if (monitor_energy) {
      const Vec gt = F.active ? F.g_t(tn) : zero;
      const Vec v = corrected_velocity(Q, ti.z_cur, z_nm1, gt, ti.dt);
      const Vec& zn = ti.z_prev;
      Vec qz_pure = qz;
      if (F.active) qz_pure -= g;
      const double E = v.dot(Htilde * v) - zn.dot(Htilde * qz_pure);
      if (!have_E0) {
        E0 = E;
        have_E0 = true;
      }
      out.times.push_back(tn);
      out.energies.push_back(E);
      const double scale = std::abs(E0) > 0 ? std::abs(E0) : 1.0;
      out.energy_drift = std::max(out.energy_drift, std::abs(E - E0) / scale);
      sx += tn;
      sy += E / scale;
      sxx += tn * tn;
      sxy += tn * E / scale;
      ++ns;
    }
  }
  out.steps = ti.step_count;
  if (ns > 2) out.energy_trend = (ns * sxy - sx * sy) / (ns * sxx - sx * sx);
}

long snap_steps(TimeIntegrator& ti, double T) {
  const long nsteps = std::max<long>(2, static_cast<long>(std::ceil(T / ti.dt - 1e-12)));
  ti.dt = T / static_cast<double>(nsteps);
  return nsteps;
}

}  // namespace

RunResult run1d(const Config& cfg) {
  const int n = cfg.get_int_or("n", 61);
  const double L = cfg.get_double_or("L", 1.0);
  const double h = L / (n - 1);
  const int m = cfg.get_int_or("m", n - 1);
  const double T = cfg.get_double_or("T", 1.0);
  const double cfl = cfg.get_double_or("cfl", 0.5);
  const std::string mode = cfg.get_or("mode", "manufactured");

  const SbpOperator1D fd = build_sbp(4, n, h);
  Hybrid1dOptions opts;
  const double beta = borrowing_capacity(build_sbp(4, 24, 1.0), 1e-10).beta;
  const double binv = inverse_constant(3).beta_inv;
  const double bound = 1.0 / (2.0 * std::min(beta, binv));
  const std::string tau_s = cfg.get_or("tau", "auto");
  const double tau = tau_s == "auto" ? 1.1 * bound : std::stod(tau_s);
  if (tau < bound) opts.allow_unstable_tau = true;
  const DgBlocks1D dg = assemble_dg1d_blocks(3, h, tau);
  const Hybrid1D sys = assemble_hybrid1d(fd, dg, m, tau, opts);
  const int N = sys.size();

  RunResult out;
  out.params["tau"] = tau;
  out.params["tau_bound"] = bound;
  out.params["beta"] = sys.beta;
  out.params["beta_inv"] = sys.beta_inv;
  out.params["beta_tilde"] = sys.beta_tilde;

  TimeIntegrator ti = estimate_dt(sys.Q, cfl, 400, 1e-8,
                                  static_cast<unsigned>(cfg.get_int_or("seed", 12345)));
  out.params["rho"] = ti.rho_estimate;
  const long nsteps = snap_steps(ti, T);

  if (mode == "manufactured") {
    auto U = [](double x, double t) { return std::cos(x - t); };
    auto Ut = [](double x, double t) { return std::sin(x - t); };
    auto Utt = [](double x, double t) { return -std::cos(x - t); };
    Vec z0(N), v0(N);
    for (int i = 0; i < N; ++i) {
      z0(i) = U(sys.position(i), 0.0);
      v0(i) = Ut(sys.position(i), 0.0);
    }
    const double xl = sys.x_left(), xr = sys.x_right();
    ForcingSet F;
    F.active = true;
    F.g = [&sys, xl, xr, U](double t) {
      return Vec(U(xl, t) * sys.bc_left + U(xr, t) * sys.bc_right);
    };
    F.g_t = [&sys, xl, xr, Ut](double t) {
      return Vec(Ut(xl, t) * sys.bc_left + Ut(xr, t) * sys.bc_right);
    };
    F.g_tt = [&sys, xl, xr, Utt](double t) {
      return Vec(Utt(xl, t) * sys.bc_left + Utt(xr, t) * sys.bc_right);
    };
    startup(sys.Q, ti, z0, v0, F.g(0.0), F.g_t(0.0), F.g_tt(0.0));
    time_loop(sys.Q, sys.H_tilde, ti, nsteps, F, false, out);
    Vec err(N);
    for (int i = 0; i < N; ++i) err(i) = ti.z_cur(i) - U(sys.position(i), ti.t);
    out.final_error = rms(err);
  } else if (mode == "energy") {
    Vec z0(N);
    const double c = -L / 2.0, w = L / 8.0;
    for (int i = 0; i < N; ++i) {
      const double x = sys.position(i);
      z0(i) = std::exp(-((x - c) * (x - c)) / (w * w));
    }
    ForcingSet F;
    startup(sys.Q, ti, z0, Vec::Zero(N), Vec(), Vec(), Vec());
    time_loop(sys.Q, sys.H_tilde, ti, nsteps, F, true, out);
  } else {
    throw std::runtime_error("run1d: unknown mode " + mode);
  }
  return out;
}

namespace {

struct Mesh2dSetup {
  Rect omega1;
  TriMesh mesh;
};

Mesh2dSetup setup_mesh(const Config& cfg, int n) {
  Mesh2dSetup s;
  s.omega1.x0 = cfg.get_double_or("x0", 0.0);
  s.omega1.x1 = cfg.get_double_or("x1", 10.0);
  s.omega1.y0 = cfg.get_double_or("y_interface", 0.0);
  s.omega1.y1 = s.omega1.y0 + (s.omega1.x1 - s.omega1.x0);
  const double depth = cfg.get_double_or("depth", 2.0);
  const std::string mc = cfg.get_or("mesh_config", "every_point_structured");
  Rect om2{s.omega1.x0, s.omega1.x1, s.omega1.y0 - depth, s.omega1.y0};
  const double h1 = (s.omega1.x1 - s.omega1.x0) / (n - 1);
  if (mc == "every_point_structured" || mc == "every_third_structured") {
    const InterfaceConfig ic = mc == "every_point_structured" ? InterfaceConfig::every_point
                                                              : InterfaceConfig::every_third;
    const double dx = ic == InterfaceConfig::every_point ? h1 : 3.0 * h1;
    const int ny = std::max(2, static_cast<int>(std::lround(depth / dx)) + 1);
    s.mesh = structured_interface_mesh(n, ic, om2, ny);
  } else if (mc == "every_point_unstructured" || mc == "every_third_unstructured") {
    s.mesh = load_mesh_files(cfg.get("mesh_nodes"), cfg.get("mesh_elements"), s.omega1.y0,
                             1e-9 * (s.omega1.x1 - s.omega1.x0));
  } else {
    throw std::runtime_error("run2d: unknown mesh_config " + mc);
  }
  return s;
}

}  // namespace

RunResult run2d(const Config& cfg) {
  const int n = cfg.get_int_or("n", 31);
  const double b1 = cfg.get_double_or("b1", 1.0);
  const double b2 = cfg.get_double_or("b2", 0.25);
  const double T = cfg.get_double_or("T", 2.0);
  const double cfl = cfg.get_double_or("cfl", 0.4);
  const std::string mode = cfg.get_or("mode", "snell");

  Mesh2dSetup ms = setup_mesh(cfg, n);
  Hybrid2dOptions hopts;
  if (cfg.has("tau_w") && cfg.get("tau_w") != "auto") hopts.tau_w = cfg.get_double("tau_w");
  if (cfg.has("tau_u") && cfg.get("tau_u") != "auto") hopts.tau_u = cfg.get_double("tau_u");
  hopts.allow_unstable = cfg.get_bool_or("allow_unstable", false);
  Hybrid2D sys = assemble_hybrid2d(n, ms.omega1, ms.mesh, 3, b1, b2, hopts);

  RunResult out;
  out.params["tau_w"] = sys.tau_w;
  out.params["sigma_w"] = sys.sigma_w;
  out.params["tau_u"] = sys.tau_u;
  out.params["sigma_u"] = sys.sigma_u;
  out.params["beta"] = sys.beta;
  out.params["C_tr"] = sys.dg.C_tr;
  out.params["compat1"] = sys.pair_gd.compat_residual;
  out.params["compat2"] = sys.pair_gf.compat_residual;

  TimeIntegrator ti = estimate_dt(sys.Q, cfl, 400, 1e-8,
                                  static_cast<unsigned>(cfg.get_int_or("seed", 12345)));
  out.params["rho"] = ti.rho_estimate;
  const long nsteps = snap_steps(ti, T);

  const int N = sys.size();
  const Mat X = dof_positions(sys.space, sys.mesh);

  if (mode == "snell") {
    const SnellSolution sol(b1, b2);
    auto fill = [&](auto&& f) {
      Vec v(N);
      for (int i = 0; i < sys.n; ++i)
        for (int j = 0; j < sys.n; ++j)
          v(sys.fd_index(i, j)) = f(sys.x_of(i), sys.y_of(j));
      for (int d = 0; d < sys.dg.ndof; ++d) v(sys.n_fd() + d) = f(X(d, 0), X(d, 1));
      return v;
    };
    Vec z0 = fill([&](double x, double y) { return sol.U(x, y, 0.0); });
    Vec v0 = fill([&](double x, double y) { return sol.Ut(x, y, 0.0); });
    ForcingSet F;
    F.active = true;
    F.g = [&sys, sol](double t) {
      return sys.forcing([&sol, t](double x, double y) { return sol.U(x, y, t); });
    };
    F.g_t = [&sys, sol](double t) {
      return sys.forcing([&sol, t](double x, double y) { return sol.Ut(x, y, t); });
    };
    F.g_tt = [&sys, sol](double t) {
      return sys.forcing([&sol, t](double x, double y) { return sol.Utt(x, y, t); });
    };
    startup(sys.Q, ti, z0, v0, F.g(0.0), F.g_t(0.0), F.g_tt(0.0));
    time_loop(sys.Q, sys.H_tilde, ti, nsteps, F, cfg.get_bool_or("monitor_energy", false), out);
    const Vec exact = fill([&](double x, double y) { return sol.U(x, y, T); });
    out.final_error = rms(Vec(ti.z_cur - exact));
  } else if (mode == "energy") {
    const double xc = 0.5 * (ms.omega1.x0 + ms.omega1.x1);
    const double yc = ms.omega1.y0 + 0.15 * (ms.omega1.x1 - ms.omega1.x0);
    const double w = 0.08 * (ms.omega1.x1 - ms.omega1.x0);
    Vec z0(N);
    for (int i = 0; i < sys.n; ++i)
      for (int j = 0; j < sys.n; ++j) {
        const double dx = sys.x_of(i) - xc, dy = sys.y_of(j) - yc;
        z0(sys.fd_index(i, j)) = std::exp(-(dx * dx + dy * dy) / (w * w));
      }
    for (int d = 0; d < sys.dg.ndof; ++d) {
      const double dx = X(d, 0) - xc, dy = X(d, 1) - yc;
      z0(sys.n_fd() + d) = std::exp(-(dx * dx + dy * dy) / (w * w));
    }
    ForcingSet F;
    startup(sys.Q, ti, z0, Vec::Zero(N), Vec(), Vec(), Vec());
    time_loop(sys.Q, sys.H_tilde, ti, nsteps, F, true, out);
  } else {
    throw std::runtime_error("run2d: unknown mode " + mode);
  }

  if (cfg.has("snapshot_prefix")) {
    const std::string pre = cfg.get("snapshot_prefix");
    Mat W(sys.n, sys.n);
    for (int i = 0; i < sys.n; ++i)
      for (int j = 0; j < sys.n; ++j) W(i, j) = ti.z_cur(sys.fd_index(i, j));
    write_matrix_file(pre + "_fd.txt", W);
    std::ofstream f(pre + "_dg.txt");
    f.precision(17);
    for (int d = 0; d < sys.dg.ndof; ++d)
      f << X(d, 0) << ' ' << X(d, 1) << ' ' << ti.z_cur(sys.n_fd() + d) << '\n';
  }
  return out;
}

ConvergenceResult convergence_study(const Config& cfg) {
  ConvergenceResult res;
  const std::vector<int> ns = cfg.get_int_list_or("levels", {31, 61, 121});
  double prev_err = 0.0, prev_h = 0.0;
  for (int n : ns) {
    Config c = cfg;
    c.set("n", std::to_string(n));
    c.set("mode", "snell");
    RunResult r = run2d(c);
    ConvergenceLevel lev;
    lev.n = n;
    lev.error = r.final_error;
    const double h = 1.0 / (n - 1);
    if (prev_err > 0.0) {
      lev.rate = std::log(prev_err / lev.error) / std::log(prev_h / h);
      if (lev.error > prev_err) res.diverged = true;
    }
    prev_err = lev.error;
    prev_h = h;
    res.levels.push_back(lev);
  }
  return res;
}

void write_run_csv(const std::string& path, const RunResult& r) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.precision(17);
  const bool with_err = !r.errors.empty();
  f << "t,E_h" << (with_err ? ",l2_error" : "") << "\n";
  for (size_t i = 0; i < r.times.size(); ++i) {
    f << r.times[i] << ',' << r.energies[i];
    if (with_err) f << ',' << (i < r.errors.size() ? r.errors[i] : -1.0);
    f << "\n";
  }
}

std::string summary_json(const Config& cfg, const RunResult* run, const ConvergenceResult* conv,
                         const std::map<std::string, bool>& checks) {
  nlohmann::json j;
  for (const auto& [k, v] : cfg.items()) j["config"][k] = v;
  if (run) {
    j["result"]["final_error"] = run->final_error;
    j["result"]["energy_drift"] = run->energy_drift;
    j["result"]["energy_trend"] = run->energy_trend;
    j["result"]["steps"] = run->steps;
    j["result"]["dt"] = run->dt;
    for (const auto& [k, v] : run->params) j["result"]["params"][k] = v;
  }
  if (conv) {
    auto arr = nlohmann::json::array();
    for (const auto& lev : conv->levels)
      arr.push_back({{"n", lev.n}, {"error", lev.error}, {"rate", lev.rate}});
    j["convergence"] = arr;
    j["diverged"] = conv->diverged;
  }
  for (const auto& [k, v] : checks) j["checks"][k] = v;
  return j.dump(2) + "\n";
}

}  // namespace waveglue
