#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "twolaw/errors.hpp"

namespace twolaw::cli {

struct ConfigIssue {
  int line = 0;  // 0 when the issue is not tied to a source location
  int col = 0;
  std::string path;  // dotted field path, e.g. "collapse.t0"
  std::string message;
};

/// Carries every parse/validation issue found in one pass, not just the
/// first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string format(const std::vector<ConfigIssue>& issues);
  std::vector<ConfigIssue> issues_;
};

enum class ModelKind { TwoLevel, Cyclic, Decay, Wavepacket, Custom };
enum class InitialKind { Ground, Basis, Superposition, Canonical, Gaussian };

/// Declarative scenario description; the single-file key = value grammar is
/// documented in docs/config.md.
struct ScenarioConfig {
  ModelKind model = ModelKind::TwoLevel;

  // two_level & cyclic
  double v1 = 1.0;
  double temperature = 0.0;
  // cyclic
  double v2 = 0.1;
  int photon_modes = 32;
  double band_width = 0.0;  // 0 = default 4 v1
  // decay
  int n_band = 200;
  double bandwidth = 1.0;
  double coupling = 1e-3;
  // wavepacket
  double mass = 1.0;
  int grid_n = 512;
  double grid_dx = 0.25;
  double cell_width = 1.0;
  // custom
  int dim = 0;
  std::vector<double> e0;
  std::vector<std::vector<std::complex<double>>> h1_rows;

  // collapse
  double t0 = 1.0;
  double gamma0 = 0.0;

  // initial state
  InitialKind initial = InitialKind::Ground;
  int initial_index = 0;
  std::vector<std::complex<double>> amplitudes;
  double sigma = 1.0;
  double center = 0.0;
  double momentum = 0.0;

  // integration
  double dt = 0.0;  // 0 = auto: 0.01 / max(frequency scale, gamma0)
  double t_end = 10.0;
  int n_samples = 50;

  // ensemble
  int n_traj = 1000;
  std::uint64_t master_seed = 1;
  int threads = 1;

  // output
  std::vector<std::string> observables;  // empty = model defaults

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parse + validate; throws ConfigError listing all problems.
ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin = "<string>");
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization; load(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Characteristic angular frequency of the configured model (the scale the
/// dt guard is checked against).
double frequency_scale(const ScenarioConfig& config);

/// Effective step: config.dt, or the auto rule when dt == 0.
double resolved_dt(const ScenarioConfig& config);

/// Observable names after expanding the group aliases (populations,
/// coherences, events) and applying model defaults.
std::vector<std::string> resolved_observables(const ScenarioConfig& config);

const char* model_name(ModelKind kind);
const char* initial_name(InitialKind kind);

}  // namespace twolaw::cli
