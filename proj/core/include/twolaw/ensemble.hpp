#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "twolaw/collapse.hpp"
#include "twolaw/hilbert.hpp"
#include "twolaw/stats.hpp"
#include "twolaw/wavepacket.hpp"

namespace twolaw {

struct EnsembleSpec {
  int n_traj = 1;
  std::uint64_t master_seed = 0;
  int n_samples = 50;  // checkpoints on the uniform sampling grid
  int threads = 1;     // 0 = hardware concurrency
};

/// Compact per-collapse record kept by ensembles.
struct SlimEvent {
  std::int64_t trajectory = 0;
  double time = 0.0;
  int selected = 0;
  double delta_s = 0.0;
  double delta_e = 0.0;
  double weight = 0.0;  // Born weight of the selected outcome
};

/// A runnable single-trajectory scenario. Implementations must make
/// trajectory `i` a pure function of (master_seed, i); the runner may invoke
/// run_one concurrently from several threads.
class Scenario {
 public:
  virtual ~Scenario() = default;

  virtual double t_end() const = 0;
  virtual std::vector<std::string> observable_names() const = 0;

  /// Fill `out` (sample-major, n_samples+1 rows of n_observables) and append
  /// this trajectory's events (`trajectory` field is set by the runner).
  virtual void run_one(std::uint64_t master_seed, std::uint64_t traj_index,
                       const std::vector<double>& sample_times, double* out,
                       std::vector<SlimEvent>& events) const = 0;
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::string> names;
  /// moments[obs][sample]
  std::vector<std::vector<Moments>> moments;
  Histogram event_times;
  Moments events_per_trajectory;
  std::int64_t total_events = 0;
  std::vector<SlimEvent> events;  // trajectory order
  int n_traj = 0;

  double mean(int obs, int sample) const { return moments[obs][sample].mean; }
  double variance(int obs, int sample) const {
    return moments[obs][sample].variance();
  }
  /// Standard error of the ensemble mean.
  double stderr_mean(int obs, int sample) const;
  int observable_index(const std::string& name) const;
  double event_rate() const;
};

/// Runs spec.n_traj trajectories and merges per-trajectory statistics in a
/// fixed block order, so results are bitwise identical for any thread count.
EnsembleStats run_ensemble(const Scenario& scenario, const EnsembleSpec& spec);

struct SweepRow {
  double axis_value = 0.0;
  EnsembleStats stats;
};

/// One ensemble per axis value; rows are independent (each gets a derived
/// master seed) and order-insensitive.
std::vector<SweepRow> sweep(
    const std::function<std::unique_ptr<Scenario>(double)>& make_scenario,
    const std::vector<double>& axis_values, const EnsembleSpec& spec);

// ---------------------------------------------------------------------------
// Scenario implementations
// ---------------------------------------------------------------------------

/// Initial-state rule for dense scenarios: either a fixed pure state or a
/// canonical draw from a list of (probability, state) alternatives.
struct InitialStateRule {
  std::vector<double> probabilities;  // size 1 for a fixed state
  std::vector<VectorXcd> states;

  static InitialStateRule fixed(const PureState& psi);
  static InitialStateRule mixture(std::vector<double> probs,
                                  std::vector<VectorXcd> states);
};

/// Trajectory scenario over a dense split Hamiltonian. Observables are built
/// from names: pop_<label>, coh_re_<i>_<j>, coh_im_<i>_<j>, entropy,
/// event_count, survival (occupation of the initial preferred state until the
/// first collapse away from it).
class DenseScenario : public Scenario {
 public:
  DenseScenario(SplitHamiltonian h, CollapseParams params,
                InitialStateRule initial, double t_end, double dt,
                std::vector<std::string> observables);

  double t_end() const override { return t_end_; }
  double dt() const { return dt_; }
  const SplitHamiltonian& hamiltonian() const { return h_; }
  std::vector<std::string> observable_names() const override { return names_; }

  void run_one(std::uint64_t master_seed, std::uint64_t traj_index,
               const std::vector<double>& sample_times, double* out,
               std::vector<SlimEvent>& events) const override;

 private:
  SplitHamiltonian h_;
  CollapseParams params_;
  InitialStateRule initial_;
  double t_end_;
  double dt_;
  std::vector<std::string> names_;
  UnitaryPropagator propagator_;
};

/// Free-packet scenario; observables: width, center, kinetic, event_count.
class WavepacketScenario : public Scenario {
 public:
  WavepacketScenario(WavepacketModel model, CollapseParams params,
                     GridState initial, double t_end, double dt);

  double t_end() const override { return t_end_; }
  std::vector<std::string> observable_names() const override;

  void run_one(std::uint64_t master_seed, std::uint64_t traj_index,
               const std::vector<double>& sample_times, double* out,
               std::vector<SlimEvent>& events) const override;

 private:
  WavepacketModel model_;
  CollapseParams params_;
  GridState initial_;
  double t_end_;
  double dt_;
};

}  // namespace twolaw
