#include "twolaw/collapse.hpp"

#include <cmath>

namespace twolaw {

bool criterion_met(const PureState& psi, const SplitHamiltonian& h,
                   const CollapseParams& params) {
  const double ds = reduction_entropy(psi);
  const double de = reduction_energy(psi, h);
  return ds > de / params.t0;
}

bool criterion_met(const MixedState& rho, const SplitHamiltonian& h,
                   const CollapseParams& params) {
  const double ds = reduction_entropy(rho);
  const double de = reduction_energy(rho, h);
  return ds > de / params.t0;
}

std::pair<double, double> criterion_values(const PureState& psi,
                                           const SplitHamiltonian& h) {
  return {reduction_entropy(psi), reduction_energy(psi, h)};
}

double sample_collapse_time(CounterRng& rng, const CollapseParams& params) {
  return rng.exponential(params.gamma0);
}

std::pair<PureState, CollapseEvent> project(const PureState& psi,
                                            const SplitHamiltonian& h,
                                            CounterRng& rng, double time) {
  if (psi.dim() != h.dim())
    throw DimensionError("project: state/Hamiltonian dim mismatch");
  CollapseEvent ev;
  ev.time = time;
  ev.pre_weights = born_weights(psi);
  ev.delta_s = weight_entropy(ev.pre_weights);
  ev.delta_e = reduction_energy(psi, h);
  ev.selected = rng.pick_discrete(ev.pre_weights);
  return {PureState::basis_state(psi.dim(), ev.selected), std::move(ev)};
}

TrajectoryRecord run_trajectory(const UnitaryPropagator& prop,
                                const PureState& initial,
                                const SplitHamiltonian& h,
                                const CollapseParams& params, double t_end,
                                double dt, std::uint64_t seed, int stride) {
  if (stride < 1) throw InvariantError("run_trajectory: stride must be >= 1");
  const int n_steps = detail::step_count(t_end, dt);

  std::vector<int> sample_steps;
  for (int s = 0; s <= n_steps; s += stride) sample_steps.push_back(s);
  if (sample_steps.back() != n_steps) sample_steps.push_back(n_steps);

  TrajectoryRecord rec;
  rec.seed = seed;
  rec.times.reserve(sample_steps.size());
  rec.states.reserve(sample_steps.size());

  CounterRng rng(seed, 0);
  walk_trajectory(
      prop, h, params, initial, t_end, dt, rng, sample_steps,
      [&](int, double t, const VectorXcd& psi_pref) {
        rec.times.push_back(t);
        rec.states.emplace_back(psi_pref.normalized());
      },
      [&](const EventView& ev) {
        CollapseEvent full;
        full.time = ev.time;
        full.pre_weights = ev.weights;
        full.selected = ev.selected;
        full.delta_s = ev.delta_s;
        full.delta_e = ev.delta_e;
        rec.events.push_back(std::move(full));
      });
  return rec;
}

TrajectoryRecord run_trajectory(const PureState& initial,
                                const SplitHamiltonian& h,
                                const CollapseParams& params, double t_end,
                                double dt, std::uint64_t seed, int stride) {
  UnitaryPropagator prop(h);
  return run_trajectory(prop, initial, h, params, t_end, dt, seed, stride);
}

}  // namespace twolaw
