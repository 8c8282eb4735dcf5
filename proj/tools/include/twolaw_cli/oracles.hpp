#pragma once

#include <string>
#include <vector>

namespace twolaw::cli {

struct OracleResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<std::string> oracle_names();

/// Runs one named analytic-oracle comparison ("all" runs every one).
std::vector<OracleResult> run_oracles(const std::string& name);

}  // namespace twolaw::cli
