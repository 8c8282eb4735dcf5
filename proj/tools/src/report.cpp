#include "twolaw_cli/report.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "twolaw/fits.hpp"
#include "twolaw/models.hpp"

namespace twolaw::cli {

namespace {

double companion_dt(const SplitHamiltonian& h, const CollapseParams& params) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.total(), Eigen::EigenvaluesOnly);
  const double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  return 0.04 / std::max({spread, params.gamma0, 1e-6});
}

/// Integrates the companion on a step that lands exactly on the sampling
/// grid, so the stored series aligns with the ensemble CSVs.
DensitySeries run_companion(const SplitHamiltonian& h, const MixedState& rho0,
                            const CollapseParams& params, double t_end,
                            int n_samples) {
  const double spacing = t_end / n_samples;
  const int substeps = std::max(
      1, static_cast<int>(std::ceil(spacing / companion_dt(h, params))));
  EqofmoOptions opts;
  opts.stride = substeps;
  return integrate_eqofmo(rho0, h, params, t_end, spacing / substeps, opts);
}

void two_level_fits(const ScenarioConfig& config, const BuiltScenario& built,
                    const DensitySeries& series, Json& fits) {
  const TwoLevelSeries obs = two_level_observables(series);
  fits["rabi_omega"] = 2.0 * config.v1;

  // The symmetric coherence decays at exactly gamma0; fit it when present.
  const double dp0 = std::abs(obs.delta_plus(0));
  if (dp0 > 1e-8 && config.gamma0 > 0.0) {
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < obs.times.size(); ++i) {
      const double y = std::abs(obs.delta_plus(static_cast<int>(i)));
      if (y > 1e-10 * dp0 &&
          obs.times[i] <= 3.0 * built.params.tau0()) {
        ts.push_back(obs.times[i]);
        ys.push_back(y);
      }
    }
    if (ts.size() >= 3) {
      const LinearFit fit = fit_log_linear(ts, ys);
      fits["dephasing_rate"] = -fit.slope;
      fits["dephasing_rate_rel_err"] =
          std::abs(-fit.slope - config.gamma0) / config.gamma0;
    }
  }

  const auto [ds, de] = criterion_values(
      TwoLevelModel(config.v1, config.temperature).ground_state(),
      *built.hamiltonian);
  if (ds > 0.0) fits["criterion_boundary_t0"] = de / ds;
}

void decay_fits(const ScenarioConfig& config, const BuiltScenario& built,
                const EnsembleStats& stats, Json& fits) {
  const DecayModel model(config.n_band, config.bandwidth, config.coupling);
  if (config.gamma0 > 0.0 && config.coupling > 0.0) {
    const double tau_oracle = model.golden_rule_tau(built.params);
    fits["golden_rule_tau"] = tau_oracle;
    const int o = stats.observable_index("survival");
    std::vector<double> ts, ps;
    for (std::size_t s = 0; s < stats.times.size(); ++s) {
      const double p = stats.moments[static_cast<std::size_t>(o)][s].mean;
      if (p > 0.0 && stats.times[s] <= 3.0 * tau_oracle) {
        ts.push_back(stats.times[s]);
        ps.push_back(p);
      }
    }
    if (ts.size() >= 3) {
      const LinearFit fit = fit_log_linear(ts, ps);
      fits["decay_tau"] = -1.0 / fit.slope;
      fits["decay_fit_r2"] = fit.r_squared;
      fits["decay_tau_rel_err"] =
          std::abs(-1.0 / fit.slope - tau_oracle) / tau_oracle;
    }
  }
}

void wavepacket_fits(const EnsembleStats& stats, Json& fits) {
  const int o = stats.observable_index("width");
  std::vector<double> ts, ws;
  for (std::size_t s = stats.times.size() / 5; s < stats.times.size(); ++s) {
    ts.push_back(stats.times[s]);
    ws.push_back(stats.moments[static_cast<std::size_t>(o)][s].mean);
  }
  if (ts.size() >= 3) {
    const LinearFit fit = fit_linear(ts, ws);
    fits["width_slope"] = fit.slope;
    fits["width_slope_stderr"] = fit.slope_stderr;
    KahanSum acc;
    for (double w : ws) acc.add(w);
    fits["mean_width"] = acc.value() / static_cast<double>(ws.size());
  }
}

void cyclic_fits(const ScenarioConfig& config, const BuiltScenario& built,
                 Json& fits) {
  const CyclicModel model(config.v1, config.v2, config.photon_modes,
                          config.band_width);
  fits["golden_rule_tau"] = model.tau();
  if (config.gamma0 > 0.0) {
    const EmissionLog log = run_cyclic(model, built.params, config.t_end,
                                       built.dt, config.master_seed);
    fits["emission_count"] = log.times.size();
    fits["mean_emission_interval"] = log.mean_interval();
    fits["tau_separation_ok"] = log.tau_separation_ok;
  }
}

void switching_summary(const EnsembleStats& stats, Json& fits) {
  // Dwell statistics of the occupied classical state from the event log.
  std::int64_t traj = -1;
  int occupied = -1;
  double last_change = 0.0;
  KahanSum dwell_sum;
  std::int64_t dwells = 0;
  for (const SlimEvent& ev : stats.events) {
    if (ev.trajectory != traj) {
      traj = ev.trajectory;
      occupied = -1;
    }
    if (occupied < 0) {
      occupied = ev.selected;
      last_change = ev.time;
      continue;
    }
    if (ev.selected != occupied) {
      dwell_sum.add(ev.time - last_change);
      ++dwells;
      occupied = ev.selected;
      last_change = ev.time;
    }
  }
  if (dwells > 0) {
    fits["mean_dwell"] = dwell_sum.value() / static_cast<double>(dwells);
    fits["switch_count"] = dwells;
  }
}

}  // namespace

RunReport make_report(const ScenarioConfig& config, const BuiltScenario& built,
                      const EnsembleStats& stats) {
  RunReport report;
  Json& j = report.json;
  j["model"] = model_name(config.model);
  j["n_traj"] = stats.n_traj;
  j["total_events"] = stats.total_events;
  j["event_rate"] = stats.event_rate();
  j["events_per_traj_mean"] = stats.events_per_trajectory.mean;

  Json fits = Json::object();
  if (built.hamiltonian && built.rho0) {
    report.density = run_companion(*built.hamiltonian, *built.rho0,
                                   built.params, built.t_end, config.n_samples);
    if (config.model == ModelKind::TwoLevel)
      two_level_fits(config, built, *report.density, fits);
  }
  switch (config.model) {
    case ModelKind::TwoLevel:
      switching_summary(stats, fits);
      break;
    case ModelKind::Decay:
      decay_fits(config, built, stats, fits);
      break;
    case ModelKind::Wavepacket:
      wavepacket_fits(stats, fits);
      break;
    case ModelKind::Cyclic:
      cyclic_fits(config, built, fits);
      break;
    case ModelKind::Custom:
      break;
  }
  j["fits"] = fits;
  return report;
}

}  // namespace twolaw::cli
