#pragma once

#include <cstdint>
#include <type_traits>
#include <utility>
#include <vector>

#include "twolaw/hilbert.hpp"
#include "twolaw/rng.hpp"

namespace twolaw {

/// One projective collapse. delta_s / delta_e are evaluated on the
/// pre-collapse state; pre_weights are its Born weights.
struct CollapseEvent {
  double time = 0.0;
  VectorXd pre_weights;
  int selected = 0;
  double delta_s = 0.0;
  double delta_e = 0.0;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<PureState> states;
  std::vector<CollapseEvent> events;
  std::uint64_t seed = 0;
};

/// The entropy criterion dS > dE / T0 (strict; equality does not trigger).
bool criterion_met(const PureState& psi, const SplitHamiltonian& h,
                   const CollapseParams& params);
bool criterion_met(const MixedState& rho, const SplitHamiltonian& h,
                   const CollapseParams& params);

/// (dS, dE) pair for reporting.
std::pair<double, double> criterion_values(const PureState& psi,
                                           const SplitHamiltonian& h);

/// Exponential waiting time with mean tau0 = 1/gamma0; +infinity when
/// gamma0 == 0.
double sample_collapse_time(CounterRng& rng, const CollapseParams& params);

/// Born-rule projection onto the preferred basis. Returns the selected basis
/// state and the event record (timestamped with `time`).
std::pair<PureState, CollapseEvent> project(const PureState& psi,
                                            const SplitHamiltonian& h,
                                            CounterRng& rng, double time = 0.0);

/// Lightweight event view handed to walk_trajectory sinks; `weights` refers
/// to scratch storage that is only valid during the callback.
struct EventView {
  double time;
  int selected;
  double delta_s;
  double delta_e;
  double selected_weight;
  const VectorXd& weights;
};

namespace detail {

inline int step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw InvariantError("trajectory: dt must be > 0");
  if (t_end < 0.0) throw InvariantError("trajectory: t_end must be >= 0");
  return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace detail

/// Core trajectory loop: exact unitary steps of length dt interleaved with
/// criterion-gated collapse draws. While the criterion holds a collapse fires
/// with probability 1 - exp(-gamma0 dt) per step; the Poisson clock does not
/// accumulate across intervals where the criterion fails.
///
/// `on_sample(sample_index, t, psi_pref)` is called at step indices listed in
/// `sample_steps` (sorted, may include 0 for the initial state);
/// `on_event(const EventView&)` once per collapse.
template <typename SampleFn, typename EventFn>
void walk_trajectory(const UnitaryPropagator& prop, const SplitHamiltonian& h,
                     const CollapseParams& params, const PureState& initial,
                     double t_end, double dt, CounterRng& rng,
                     const std::vector<int>& sample_steps, SampleFn&& on_sample,
                     EventFn&& on_event) {
  const int n_steps = detail::step_count(t_end, dt);
  if (params.gamma0 * dt > 0.1 + 1e-12)
    throw InvariantError("trajectory: dt * gamma0 must be <= 0.1");

  const int dim = prop.dim();
  const VectorXd hdiag = h.diagonal();
  const VectorXcd phases = prop.step_phases(dt);
  const double fire_prob = 1.0 - std::exp(-params.gamma0 * dt);

  // The last step may be shorter than dt when dt does not divide t_end.
  const double t_last_full = static_cast<double>(n_steps - 1) * dt;
  const double dt_last = n_steps > 0 ? t_end - t_last_full : dt;
  const bool partial_last = n_steps > 0 && dt_last < dt * (1.0 - 1e-9);

  VectorXcd psi_eig = prop.to_eigenbasis(initial.amplitudes());
  double mean_energy = 0.0;
  for (int i = 0; i < dim; ++i)
    mean_energy += prop.eigenvalues()(i) * std::norm(psi_eig(i));

  VectorXcd psi_pref(dim);
  VectorXd weights(dim);
  int pref_step = -1;  // step index psi_pref/weights were computed at

  auto refresh_pref = [&](int step) {
    if (pref_step == step) return;
    psi_pref.noalias() = prop.eigenvectors() * psi_eig;
    weights = psi_pref.cwiseAbs2();
    pref_step = step;
  };

  std::size_t sample_cursor = 0;
  auto maybe_sample = [&](int step, double t) {
    while (sample_cursor < sample_steps.size() &&
           sample_steps[sample_cursor] == step) {
      refresh_pref(step);
      on_sample(static_cast<int>(sample_cursor), t, psi_pref);
      ++sample_cursor;
    }
  };

  maybe_sample(0, 0.0);

  for (int step = 1; step <= n_steps; ++step) {
    const bool last = step == n_steps && partial_last;
    const double t = last ? t_end : static_cast<double>(step) * dt;
    if (last)
      psi_eig.array() *= prop.step_phases(dt_last).array();
    else
      psi_eig.array() *= phases.array();
    pref_step = -1;

    const double p =
        last ? 1.0 - std::exp(-params.gamma0 * dt_last) : fire_prob;
    if (params.gamma0 > 0.0 && rng.uniform01() < p) {
      refresh_pref(step);
      const double ds = weight_entropy(weights);
      const double de = weights.dot(hdiag) - mean_energy;
      if (ds > de / params.t0) {
        const int m = rng.pick_discrete(weights);
        const EventView view{t, m, ds, de, weights(m), weights};
        bool keep_going = true;
        if constexpr (std::is_void_v<std::invoke_result_t<EventFn&,
                                                          const EventView&>>) {
          on_event(view);
        } else {
          keep_going = on_event(view);
        }
        if (!keep_going) return;
        psi_eig = prop.to_eigenbasis(VectorXcd::Unit(dim, m));
        mean_energy = 0.0;
        for (int i = 0; i < dim; ++i)
          mean_energy += prop.eigenvalues()(i) * std::norm(psi_eig(i));
        pref_step = -1;
      }
    }
    maybe_sample(step, t);
  }
}

/// Full-record trajectory run. `stride` controls how often states are stored
/// (1 = every step); collapse events are always recorded in full.
TrajectoryRecord run_trajectory(const PureState& initial,
                                const SplitHamiltonian& h,
                                const CollapseParams& params, double t_end,
                                double dt, std::uint64_t seed, int stride = 1);

/// As above but reusing a prebuilt propagator (for ensembles).
TrajectoryRecord run_trajectory(const UnitaryPropagator& prop,
                                const PureState& initial,
                                const SplitHamiltonian& h,
                                const CollapseParams& params, double t_end,
                                double dt, std::uint64_t seed, int stride = 1);

}  // namespace twolaw
