#pragma once

#include <optional>

#include "twolaw_cli/io.hpp"
#include "twolaw_cli/scenario.hpp"

namespace twolaw::cli {

/// Fit report for one simulate run; also returns the companion density
/// series (when one was computed) so the caller can emit density.csv.
struct RunReport {
  Json json;
  std::optional<DensitySeries> density;
};

RunReport make_report(const ScenarioConfig& config, const BuiltScenario& built,
                      const EnsembleStats& stats);

}  // namespace twolaw::cli
