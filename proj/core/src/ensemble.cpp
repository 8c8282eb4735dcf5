#include "twolaw/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace twolaw {

namespace {

constexpr int kBlockSize = 64;

struct BlockResult {
  std::vector<Moments> moments;  // flattened [obs][sample]
  Histogram event_times;
  Moments events_per_trajectory;
  std::vector<SlimEvent> events;
};

}  // namespace

double EnsembleStats::stderr_mean(int obs, int sample) const {
  const Moments& m = moments[static_cast<std::size_t>(obs)]
                            [static_cast<std::size_t>(sample)];
  if (m.n < 2) return 0.0;
  return std::sqrt(m.variance() / static_cast<double>(m.n));
}

int EnsembleStats::observable_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw InvariantError("EnsembleStats: unknown observable " + name);
}

double EnsembleStats::event_rate() const {
  if (times.empty() || times.back() <= 0.0 || n_traj == 0) return 0.0;
  return static_cast<double>(total_events) /
         (static_cast<double>(n_traj) * times.back());
}

EnsembleStats run_ensemble(const Scenario& scenario, const EnsembleSpec& spec) {
  if (spec.n_traj < 1) throw InvariantError("run_ensemble: n_traj must be >= 1");
  if (spec.n_samples < 1)
    throw InvariantError("run_ensemble: n_samples must be >= 1");

  const std::vector<std::string> names = scenario.observable_names();
  if (names.empty())
    throw InvariantError("run_ensemble: scenario exposes no observables");
  const int n_obs = static_cast<int>(names.size());
  const int n_rows = spec.n_samples + 1;

  std::vector<double> sample_times(static_cast<std::size_t>(n_rows));
  for (int k = 0; k < n_rows; ++k)
    sample_times[static_cast<std::size_t>(k)] =
        scenario.t_end() * k / spec.n_samples;

  const int n_blocks = (spec.n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> blocks(static_cast<std::size_t>(n_blocks));

  int n_threads = spec.threads;
  if (n_threads <= 0)
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_blocks));

  std::atomic<int> next_block{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    std::vector<double> row(static_cast<std::size_t>(n_rows * n_obs));
    std::vector<SlimEvent> traj_events;
    while (true) {
      const int b = next_block.fetch_add(1);
      if (b >= n_blocks || failed.load()) break;
      BlockResult& block = blocks[static_cast<std::size_t>(b)];
      block.moments.assign(static_cast<std::size_t>(n_obs * n_rows), Moments{});
      block.event_times = Histogram(0.0, std::max(scenario.t_end(), 1e-300), 50);
      const int lo = b * kBlockSize;
      const int hi = std::min(spec.n_traj, lo + kBlockSize);
      try {
        for (int i = lo; i < hi; ++i) {
          traj_events.clear();
          scenario.run_one(spec.master_seed, static_cast<std::uint64_t>(i),
                           sample_times, row.data(), traj_events);
          for (int s = 0; s < n_rows; ++s)
            for (int o = 0; o < n_obs; ++o)
              block.moments[static_cast<std::size_t>(o * n_rows + s)].add(
                  row[static_cast<std::size_t>(s * n_obs + o)]);
          block.events_per_trajectory.add(
              static_cast<double>(traj_events.size()));
          for (SlimEvent& ev : traj_events) {
            ev.trajectory = i;
            block.event_times.add(ev.time);
            block.events.push_back(ev);
          }
        }
      } catch (const std::exception& e) {
        failed.store(true);
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
        break;
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) {
    std::ostringstream os;
    os << "run_ensemble: trajectory failed: " << first_error;
    throw NumericsError(os.str());
  }

  EnsembleStats stats;
  stats.times = sample_times;
  stats.names = names;
  stats.n_traj = spec.n_traj;
  stats.moments.assign(static_cast<std::size_t>(n_obs),
                       std::vector<Moments>(static_cast<std::size_t>(n_rows)));
  stats.event_times = Histogram(0.0, std::max(scenario.t_end(), 1e-300), 50);

  for (const BlockResult& block : blocks) {
    for (int o = 0; o < n_obs; ++o)
      for (int s = 0; s < n_rows; ++s)
        stats.moments[static_cast<std::size_t>(o)][static_cast<std::size_t>(s)]
            .merge(block.moments[static_cast<std::size_t>(o * n_rows + s)]);
    stats.event_times.merge(block.event_times);
    stats.events_per_trajectory.merge(block.events_per_trajectory);
    stats.events.insert(stats.events.end(), block.events.begin(),
                        block.events.end());
  }
  stats.total_events = static_cast<std::int64_t>(stats.events.size());
  return stats;
}

std::vector<SweepRow> sweep(
    const std::function<std::unique_ptr<Scenario>(double)>& make_scenario,
    const std::vector<double>& axis_values, const EnsembleSpec& spec) {
  std::vector<SweepRow> rows;
  rows.reserve(axis_values.size());
  for (std::size_t r = 0; r < axis_values.size(); ++r) {
    std::unique_ptr<Scenario> scenario = make_scenario(axis_values[r]);
    EnsembleSpec row_spec = spec;
    // Row 0 keeps the master seed (a single-point sweep reproduces
    // run_ensemble); later rows draw independent derived seeds.
    if (r > 0) {
      CounterRng derive(spec.master_seed, 0x5157EEull + r);
      row_spec.master_seed = derive.next_u64();
    }
    SweepRow row;
    row.axis_value = axis_values[r];
    row.stats = run_ensemble(*scenario, row_spec);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// InitialStateRule
// ---------------------------------------------------------------------------

InitialStateRule InitialStateRule::fixed(const PureState& psi) {
  InitialStateRule rule;
  rule.probabilities = {1.0};
  rule.states = {psi.amplitudes()};
  return rule;
}

InitialStateRule InitialStateRule::mixture(std::vector<double> probs,
                                           std::vector<VectorXcd> states) {
  if (probs.size() != states.size() || probs.empty())
    throw InvariantError("InitialStateRule: inconsistent mixture");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw InvariantError("InitialStateRule: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw InvariantError("InitialStateRule: probabilities must sum to 1");
  InitialStateRule rule;
  rule.probabilities = std::move(probs);
  rule.states = std::move(states);
  return rule;
}

// ---------------------------------------------------------------------------
// DenseScenario
// ---------------------------------------------------------------------------

namespace {

struct DenseTrajContext {
  int event_count = 0;
  bool left_initial = false;
};

using DenseObservableFn =
    std::function<double(const VectorXcd&, const DenseTrajContext&)>;

DenseObservableFn make_dense_observable(const std::string& name,
                                        const SplitHamiltonian& h,
                                        int initial_index) {
  const std::vector<std::string>& labels = h.basis().labels;
  for (int i = 0; i < h.dim(); ++i) {
    if (name == "pop_" + labels[static_cast<std::size_t>(i)] ||
        name == "pop_" + std::to_string(i)) {
      return [i](const VectorXcd& psi, const DenseTrajContext&) {
        return std::norm(psi(i));
      };
    }
    for (int j = i + 1; j < h.dim(); ++j) {
      const std::string suffix =
          "_" + std::to_string(i) + "_" + std::to_string(j);
      if (name == "coh_re" + suffix) {
        return [i, j](const VectorXcd& psi, const DenseTrajContext&) {
          return (psi(i) * std::conj(psi(j))).real();
        };
      }
      if (name == "coh_im" + suffix) {
        return [i, j](const VectorXcd& psi, const DenseTrajContext&) {
          return (psi(i) * std::conj(psi(j))).imag();
        };
      }
    }
  }
  if (name == "entropy") {
    return [](const VectorXcd& psi, const DenseTrajContext&) {
      return weight_entropy(psi.cwiseAbs2());
    };
  }
  if (name == "event_count") {
    return [](const VectorXcd&, const DenseTrajContext& ctx) {
      return static_cast<double>(ctx.event_count);
    };
  }
  if (name == "survival") {
    return [initial_index](const VectorXcd&, const DenseTrajContext& ctx) {
      return ctx.left_initial ? 0.0 : 1.0;
    };
  }
  throw InvariantError("unknown observable: " + name);
}

}  // namespace

DenseScenario::DenseScenario(SplitHamiltonian h, CollapseParams params,
                             InitialStateRule initial, double t_end, double dt,
                             std::vector<std::string> observables)
    : h_(std::move(h)),
      params_(params),
      initial_(std::move(initial)),
      t_end_(t_end),
      dt_(dt),
      names_(std::move(observables)),
      propagator_(h_) {
  if (!(dt_ > 0.0) || t_end_ < 0.0)
    throw InvariantError("DenseScenario: bad dt or t_end");
  if (names_.empty())
    throw InvariantError("DenseScenario: observable list must be nonempty");
  for (const VectorXcd& s : initial_.states)
    if (static_cast<int>(s.size()) != h_.dim())
      throw DimensionError("DenseScenario: initial state dim mismatch");
  // Fail early on unknown names.
  for (const std::string& name : names_) make_dense_observable(name, h_, 0);
}

void DenseScenario::run_one(std::uint64_t master_seed,
                            std::uint64_t traj_index,
                            const std::vector<double>& sample_times,
                            double* out,
                            std::vector<SlimEvent>& events) const {
  CounterRng rng(master_seed, traj_index);

  std::size_t which = 0;
  if (initial_.states.size() > 1)
    which = static_cast<std::size_t>(rng.pick_discrete(initial_.probabilities));
  const PureState psi0{initial_.states[which]};

  int initial_index = 0;
  double best = 0.0;
  for (int i = 0; i < psi0.dim(); ++i) {
    if (std::norm(psi0.amplitudes()(i)) > best) {
      best = std::norm(psi0.amplitudes()(i));
      initial_index = i;
    }
  }

  std::vector<DenseObservableFn> fns;
  fns.reserve(names_.size());
  for (const std::string& name : names_)
    fns.push_back(make_dense_observable(name, h_, initial_index));

  // Nearest-step sampling of the requested times.
  std::vector<int> sample_steps(sample_times.size());
  for (std::size_t k = 0; k < sample_times.size(); ++k)
    sample_steps[k] = static_cast<int>(std::llround(sample_times[k] / dt_));

  DenseTrajContext ctx;
  const int n_obs = static_cast<int>(fns.size());
  walk_trajectory(
      propagator_, h_, params_, psi0, t_end_, dt_, rng, sample_steps,
      [&](int sample_idx, double, const VectorXcd& psi_pref) {
        for (int o = 0; o < n_obs; ++o)
          out[static_cast<std::size_t>(sample_idx * n_obs + o)] =
              fns[static_cast<std::size_t>(o)](psi_pref, ctx);
      },
      [&](const EventView& ev) {
        ++ctx.event_count;
        if (ev.selected != initial_index) ctx.left_initial = true;
        events.push_back(SlimEvent{0, ev.time, ev.selected, ev.delta_s,
                                   ev.delta_e, ev.selected_weight});
      });
}

// ---------------------------------------------------------------------------
// WavepacketScenario
// ---------------------------------------------------------------------------

WavepacketScenario::WavepacketScenario(WavepacketModel model,
                                       CollapseParams params, GridState initial,
                                       double t_end, double dt)
    : model_(model),
      params_(params),
      initial_(std::move(initial)),
      t_end_(t_end),
      dt_(dt) {
  if (!(dt_ > 0.0) || t_end_ < 0.0)
    throw InvariantError("WavepacketScenario: bad dt or t_end");
}

std::vector<std::string> WavepacketScenario::observable_names() const {
  return {"width", "center", "kinetic", "event_count"};
}

void WavepacketScenario::run_one(std::uint64_t master_seed,
                                 std::uint64_t traj_index,
                                 const std::vector<double>& sample_times,
                                 double* out,
                                 std::vector<SlimEvent>& events) const {
  // run_wavepacket derives its own per-trajectory stream.
  CounterRng derive(master_seed, traj_index);
  const std::uint64_t seed = derive.next_u64();
  const int n_samples = static_cast<int>(sample_times.size()) - 1;
  const WavepacketRun run = run_wavepacket(model_, params_, initial_, t_end_,
                                           dt_, seed, n_samples);
  std::size_t done = 0;
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    const int i = static_cast<int>(k);
    double event_count = 0.0;
    while (done < run.events.size() &&
           run.events[done].time <= sample_times[k] + 1e-12) {
      ++done;
    }
    event_count = static_cast<double>(done);
    out[k * 4 + 0] = run.width(i);
    out[k * 4 + 1] = run.center(i);
    out[k * 4 + 2] = run.kinetic(i);
    out[k * 4 + 3] = event_count;
  }
  for (const WavepacketEvent& ev : run.events)
    events.push_back(
        SlimEvent{0, ev.time, ev.cell, ev.delta_s, ev.delta_e, 0.0});
}

}  // namespace twolaw
