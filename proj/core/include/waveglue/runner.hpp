#pragma once

#include <map>
#include <string>
#include <vector>

#include "waveglue/config.hpp"

namespace waveglue {

struct RunResult {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> errors;
  double final_error = -1.0;   // discrete l2 at final time (unweighted RMS)
  double energy_drift = 0.0;   // max |E - E0| / |E0|
  double energy_trend = 0.0;   // least-squares slope of E(t) / |E0|
  long steps = 0;
  double dt = 0.0;
  std::map<std::string, double> params;  // resolved penalties, constants, rho
};

/// 1D coupled run; mode "manufactured" tracks the error against cos(x - t),
/// mode "energy" runs homogeneous data and monitors the discrete energy.
RunResult run1d(const Config& cfg);

/// 2D coupled run on the two-layer domain; mode "snell" uses the plane-wave
/// exact solution for data and error, mode "energy" monitors a homogeneous run.
RunResult run2d(const Config& cfg);

struct ConvergenceLevel {
  int n = 0;
  double error = 0.0;
  double rate = 0.0;  // vs previous level; 0 for the first
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  bool diverged = false;
};

ConvergenceResult convergence_study(const Config& cfg);

void write_run_csv(const std::string& path, const RunResult& r);

/// Deterministic JSON summary (no timestamps): config echo, resolved numbers,
/// optional rate table and pass/fail flags.
std::string summary_json(const Config& cfg, const RunResult* run, const ConvergenceResult* conv,
                         const std::map<std::string, bool>& checks);

}  // namespace waveglue
