#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "waveglue/config.hpp"
#include "waveglue/matrix_io.hpp"
#include "waveglue/nma.hpp"
#include "waveglue/projection.hpp"
#include "waveglue/runner.hpp"
#include "waveglue/sbp.hpp"
#include "waveglue/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace waveglue;

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Config cfg = path.empty() ? Config() : Config::load(path);
  for (const auto& kv : overrides) cfg.apply_override(kv);
  return cfg;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
  f << s;
}

int cmd_run1d(const Config& cfg, const fs::path& out) {
  RunResult r = run1d(cfg);
  fs::create_directories(out);
  write_run_csv((out / "run1d.csv").string(), r);
  write_text(out / "run1d.json", summary_json(cfg, &r, nullptr, {}));
  std::cout << "run1d: steps=" << r.steps << " dt=" << r.dt;
  if (r.final_error >= 0) std::cout << " l2_error=" << r.final_error;
  if (!r.energies.empty()) std::cout << " energy_drift=" << r.energy_drift;
  std::cout << "\n";
  return 0;
}

int cmd_run2d(Config cfg, const fs::path& out) {
  fs::create_directories(out);
  if (!cfg.has("snapshot_prefix")) cfg.set("snapshot_prefix", (out / "field").string());
  RunResult r = run2d(cfg);
  write_run_csv((out / "run2d.csv").string(), r);
  write_text(out / "run2d.json", summary_json(cfg, &r, nullptr, {}));
  std::cout << "run2d: steps=" << r.steps << " dt=" << r.dt;
  if (r.final_error >= 0) std::cout << " l2_error=" << r.final_error;
  if (!r.energies.empty()) std::cout << " energy_drift=" << r.energy_drift;
  std::cout << "\n";
  return 0;
}

int cmd_convergence(const Config& cfg, const fs::path& out) {
  ConvergenceResult res = convergence_study(cfg);
  fs::create_directories(out);
  std::map<std::string, bool> checks;
  checks["converged"] = !res.diverged;
  write_text(out / "convergence.json", summary_json(cfg, nullptr, &res, checks));
  std::cout << "n        error          rate\n";
  for (const auto& lev : res.levels) {
    std::cout << lev.n << "    " << lev.error;
    if (lev.rate != 0.0) std::cout << "    (" << lev.rate << ")";
    std::cout << "\n";
  }
  return res.diverged ? 1 : 0;
}

int cmd_nma(const Config& cfg, const fs::path& out) {
  const double tau = cfg.get_double_or("tau", kModePenalty);
  const double sr = cfg.get_double_or("s_re", 0.0);
  const double si = cfg.get_double_or("s_im", 0.0);
  NormalModeData d = boundary_system(tau, Cplx(sr, si));
  fs::create_directories(out);
  write_text(out / "nma.json", nma_report_json(d));
  std::cout << "nma: tau=" << tau << " colspace_residual=" << d.colspace_residual
            << (d.colspace_residual < 1e-8 ? " (pass)" : " (fail)") << "\n";
  return d.colspace_residual < 1e-8 ? 0 : 1;
}

int cmd_build_projection(const Config& cfg, const fs::path& out) {
  const int n = cfg.get_int_or("n", 31);
  const double h = cfg.get_double_or("h", 1.0);
  const std::string flavor_s = cfg.get_or("flavor", "good_d2f");
  const PairFlavor flavor =
      flavor_s == "good_f2d" ? PairFlavor::good_f2d : PairFlavor::good_d2f;
  std::vector<double> fd(static_cast<size_t>(n)), dgb;
  for (int i = 0; i < n; ++i) fd[static_cast<size_t>(i)] = i * h;
  const int stride = cfg.get_int_or("dg_stride", 3);
  for (int i = 0; stride * i <= n - 1; i += 1) dgb.push_back(stride * i * h);
  SbpOperator1D op = build_sbp(4, n, h);
  ProjectionPair p = compose_fd_dg(fd, dgb, op.H, 2, flavor, 1e-12 * n * h);
  fs::create_directories(out);
  write_matrix_file((out / ("P_f2d_" + flavor_s + ".txt")).string(), p.P_f2d);
  write_matrix_file((out / ("P_d2f_" + flavor_s + ".txt")).string(), p.P_d2f);
  std::cout << "build-projection: n=" << n << " flavor=" << flavor_s
            << " compat_residual=" << p.compat_residual << "\n";
  return 0;
}

int cmd_verify_ops(const Config& cfg, const fs::path& out) {
  const bool quick = cfg.get_bool_or("quick", false);
  const std::vector<CheckResult> rs = run_all_checks(quick);
  bool all = true;
  std::map<std::string, bool> flags;
  for (const auto& r : rs) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << "  -- " << r.detail;
    std::cout << "\n";
    flags[r.name] = r.pass;
    all = all && r.pass;
  }
  fs::create_directories(out);
  write_text(out / "verify.json", summary_json(cfg, nullptr, nullptr, flags));
  std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid FD-DG wave equation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "configuration file (key = value with [sections])");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "key=value overrides")->take_all();

  auto* run1d_cmd = app.add_subcommand("run1d", "1D coupled run");
  auto* run2d_cmd = app.add_subcommand("run2d", "2D coupled run");
  auto* conv_cmd = app.add_subcommand("convergence", "2D refinement study");
  auto* nma_cmd = app.add_subcommand("nma", "interface mode analysis report");
  auto* proj_cmd = app.add_subcommand("build-projection", "build and export projection pairs");
  auto* verify_cmd = app.add_subcommand("verify-ops", "run the full invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg = load_config(config_path, overrides);
    const fs::path out(out_dir);
    if (run1d_cmd->parsed()) return cmd_run1d(cfg, out);
    if (run2d_cmd->parsed()) return cmd_run2d(cfg, out);
    if (conv_cmd->parsed()) return cmd_convergence(cfg, out);
    if (nma_cmd->parsed()) return cmd_nma(cfg, out);
    if (proj_cmd->parsed()) return cmd_build_projection(cfg, out);
    if (verify_cmd->parsed()) return cmd_verify_ops(cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
