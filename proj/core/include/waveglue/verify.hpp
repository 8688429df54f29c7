#pragma once

#include <string>
#include <vector>

namespace waveglue {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Invariant suite over all modules; quick mode skips the slower sweeps.
std::vector<CheckResult> run_all_checks(bool quick = false);

}  // namespace waveglue
