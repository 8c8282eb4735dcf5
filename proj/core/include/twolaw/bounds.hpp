#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twolaw {

/// SI constants used by the experimental-bound calculator. Everything else in
/// the library works in natural units (hbar = 1).
namespace si {
inline constexpr double kPlanck = 6.62607015e-34;            // J s
inline constexpr double kHbar = kPlanck / 6.283185307179586476925287;
inline constexpr double kNeutronMass = 1.67492749804e-27;    // kg
}  // namespace si

/// Thermal de Broglie wavelength h / sqrt(2 pi m T0) in meters.
double lambda0(double mass_kg, double t0_joule);

/// Inversion: T0 = h^2 / (2 pi m lambda^2) in joules.
double t0_from_lambda0(double mass_kg, double lambda_m);

/// Maximal free-flight width: lambda_max^2 = lambda0^2 + (hbar tau0 / 2 m
/// lambda0)^2. `negligible_growth` flags the regime T0 tau0 << 4 pi hbar in
/// which lambda_max ~= lambda0.
struct Lambda0Max {
  double value = 0.0;
  bool negligible_growth = false;
};
Lambda0Max lambda0_max(double mass_kg, double t0_joule, double tau0_s);

/// One experimental record: a mass and a coherence/localization length with
/// the direction of the implied bound on T0. `reference_t0` is an optional
/// published figure to print alongside (0 = none).
struct ExperimentRecord {
  std::string label;
  double mass_kg = 0.0;
  double length_m = 0.0;
  std::string direction;  // "upper" or "lower"
  double reference_t0 = 0.0;
};

struct BoundRow {
  std::string label;
  double mass_kg = 0.0;
  double length_m = 0.0;
  std::string direction;
  double t0_bound = 0.0;
  double reference_t0 = 0.0;
  /// Set when the computed bound is more than half a decade away from the
  /// published figure; both numbers are reported, neither is replaced.
  bool discrepant = false;
};

std::vector<BoundRow> bounds_report(const std::vector<ExperimentRecord>& records);

/// Record file: one record per line,
///   label, mass_kg, length_m, direction[, reference_t0]
/// '#' starts a comment. Parse errors carry line numbers.
std::vector<ExperimentRecord> parse_experiment_records(std::istream& in);
std::vector<ExperimentRecord> load_experiment_records(const std::string& path);

}  // namespace twolaw
