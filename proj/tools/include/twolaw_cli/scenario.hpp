#pragma once

#include <memory>
#include <optional>

#include "twolaw/density.hpp"
#include "twolaw/ensemble.hpp"
#include "twolaw_cli/config.hpp"

namespace twolaw::cli {

/// A validated config turned into runnable pieces.
struct BuiltScenario {
  std::unique_ptr<Scenario> scenario;
  CollapseParams params{1.0, 0.0};
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<std::string> observables;
  std::vector<std::string> basis_labels;  // empty for the wavepacket model

  /// For dense models of small dimension: the deterministic companion
  /// (equation-of-motion integration) run alongside the ensemble.
  std::optional<SplitHamiltonian> hamiltonian;
  std::optional<MixedState> rho0;
};

BuiltScenario build_scenario(const ScenarioConfig& config);

/// Sets a sweep axis field by dotted path (model.v1, collapse.t0, ...).
void set_config_field(ScenarioConfig& config, const std::string& path,
                      double value);

}  // namespace twolaw::cli
