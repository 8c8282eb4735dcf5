#pragma once

#include <cstdint>
#include <vector>

#include "twolaw/collapse.hpp"
#include "twolaw/hilbert.hpp"

namespace twolaw {

/// Isolated two-state system with H1 = -v1 (|u><d| + |d><u|) over the
/// classical basis {up, down}. The ground state is the symmetric
/// superposition at energy -v1; populations oscillate at the Rabi angular
/// frequency 2 v1 (hbar = 1), which is the omega entering the damped
/// oscillator law for w = rho_uu - rho_dd.
struct TwoLevelModel {
  double v1 = 1.0;
  double temperature = 0.0;

  explicit TwoLevelModel(double coupling, double temp = 0.0);

  double rabi_omega() const { return 2.0 * v1; }

  SplitHamiltonian hamiltonian() const;
  PureState ground_state() const;
  PureState excited_state() const;
  PureState up_state() const { return PureState::basis_state(2, 0); }

  /// Boltzmann mixture of the full-H eigenstates |0>, |1> (E = -v1, +v1) at
  /// `temperature`; T = 0 gives the pure ground state.
  MixedState canonical_state() const;
};

/// Entropy criterion evaluated on the canonical state.
bool instability_condition(const TwoLevelModel& model,
                           const CollapseParams& params);

/// T0 at which the canonical state becomes unstable, located by bisection.
double instability_boundary_t0(const TwoLevelModel& model);

/// Telegraph statistics: dwell time between changes of the occupied
/// classical state in the omega*tau0 << 1 regime.
struct TelegraphOptions {
  /// Coarse-graining window of the observer; flips that revert within the
  /// window are ignored. 0 picks sqrt(tau0 / rabi_omega).
  double window = 0.0;
};

struct TelegraphResult {
  double mean_dwell = 0.0;
  int switches = 0;
  int collapses = 0;
  double observed_span = 0.0;
};

TelegraphResult measure_switching(const TwoLevelModel& model,
                                  const CollapseParams& params, double t_end,
                                  double dt, std::uint64_t seed,
                                  const TelegraphOptions& opts = {});

/// Two-level system opened to a band of emission modes: a photon register
/// holding at most one quantum spread over n_photon_modes levels centered on
/// the transition energy 2 v1. State layout: index = system + 2 * photon
/// with photon = 0 the empty register.
struct CyclicModel {
  double v1 = 1.0;
  double v2 = 0.1;
  int n_photon_modes = 32;
  double band_width = 0.0;  // defaults to 4 * v1

  CyclicModel(double system_coupling, double emission_coupling, int modes,
              double band = 0.0);

  int dim() const { return 2 * (n_photon_modes + 1); }
  double photon_energy() const { return 2.0 * v1; }
  double mode_density() const;
  SplitHamiltonian hamiltonian() const;

  /// Golden-rule lifetime of the excited system state against emission.
  double tau() const;

  /// Emission coupling that realizes a target golden-rule lifetime.
  static double coupling_for_tau(double v1, int modes, double band,
                                 double tau_target);

  /// System ground state with an empty photon register.
  PureState initial_state() const;
};

/// Cycle log of run_cyclic. An emission is logged when the occupation
/// transferred into the photon register after a collapse crosses half of the
/// excited component it started from (or immediately when a collapse finds
/// the register occupied). Detected photons escape: the register is emptied
/// and the cycle restarts.
struct EmissionLog {
  std::vector<double> times;
  int collapses = 0;
  double t_end = 0.0;
  double tau = 0.0;   // model golden-rule lifetime
  bool tau_separation_ok = true;  // tau << tau0 held

  double mean_interval() const;
};

EmissionLog run_cyclic(const CyclicModel& model, const CollapseParams& params,
                       double t_end, double dt, std::uint64_t seed);

/// Unstable level coupled uniformly to a flat quasi-continuum of n_band
/// levels spanning `bandwidth`; index 0 is the unstable level, centered in
/// the band.
struct DecayModel {
  int n_band = 200;
  double bandwidth = 1.0;
  double coupling = 1e-3;

  DecayModel(int band_levels, double band_width, double band_coupling);

  int dim() const { return n_band + 1; }
  double level_spacing() const { return bandwidth / (n_band - 1); }
  double recurrence_time() const;
  SplitHamiltonian hamiltonian() const;

  /// Golden-rule decay rate of level 0, summed from the rate matrix.
  double golden_rule_rate(const CollapseParams& params) const;
  double golden_rule_tau(const CollapseParams& params) const {
    return 1.0 / golden_rule_rate(params);
  }
};

struct SurvivalCurve {
  std::vector<double> times;
  VectorXd survival;
  int ensemble_n = 0;
  /// Death time per trajectory (+inf while surviving) in trajectory order.
  std::vector<double> death_times;
};

/// Ensemble survival of the unstable level: a trajectory survives until the
/// first collapse outcome off level 0. Throws when t_end exceeds the band
/// recurrence time.
SurvivalCurve run_decay(const DecayModel& model, const CollapseParams& params,
                        int ensemble_n, double t_end, double dt,
                        std::uint64_t seed, int n_samples = 100);

struct DecayFit {
  double tau_fit = 0.0;
  double tau_oracle = 0.0;
  double r_squared = 0.0;
};

/// Log-linear fit of the survival curve over [0, fit_horizon].
DecayFit fit_decay(const SurvivalCurve& curve, double tau_oracle,
                   double fit_horizon);

}  // namespace twolaw
