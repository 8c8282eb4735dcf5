#include "twolaw/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twolaw/density.hpp"
#include "twolaw/fits.hpp"

namespace twolaw {

// ---------------------------------------------------------------------------
// Two-level system
// ---------------------------------------------------------------------------

TwoLevelModel::TwoLevelModel(double coupling, double temp)
    : v1(coupling), temperature(temp) {
  if (!(v1 > 0.0)) throw InvariantError("TwoLevelModel: v1 must be > 0");
  if (temperature < 0.0)
    throw InvariantError("TwoLevelModel: temperature must be >= 0");
}

SplitHamiltonian TwoLevelModel::hamiltonian() const {
  PreferredBasis basis(2, {"up", "down"});
  VectorXd e0 = VectorXd::Zero(2);
  MatrixXcd h1(2, 2);
  h1 << 0.0, -v1, -v1, 0.0;
  return SplitHamiltonian(std::move(basis), std::move(e0), std::move(h1));
}

PureState TwoLevelModel::ground_state() const {
  VectorXcd c(2);
  c << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  return PureState(std::move(c));
}

PureState TwoLevelModel::excited_state() const {
  VectorXcd c(2);
  c << 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2;
  return PureState(std::move(c));
}

MixedState TwoLevelModel::canonical_state() const {
  const double d =
      temperature > 0.0 ? std::tanh(v1 / temperature) : 1.0;
  MatrixXcd rho(2, 2);
  rho << 0.5, d / 2.0, d / 2.0, 0.5;
  return MixedState(std::move(rho));
}

bool instability_condition(const TwoLevelModel& model,
                           const CollapseParams& params) {
  return criterion_met(model.canonical_state(), model.hamiltonian(), params);
}

double instability_boundary_t0(const TwoLevelModel& model) {
  const SplitHamiltonian h = model.hamiltonian();
  const MixedState rho = model.canonical_state();
  auto met = [&](double t0) {
    return criterion_met(rho, h, CollapseParams(t0, 0.0));
  };
  double lo = 1e-9 * model.v1;
  double hi = 1e9 * std::max(model.v1, model.temperature);
  if (met(lo)) return lo;
  if (!met(hi))
    throw NumericsError("instability_boundary_t0: criterion never met");
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (met(mid) ? hi : lo) = mid;
  }
  return hi;
}

TelegraphResult measure_switching(const TwoLevelModel& model,
                                  const CollapseParams& params, double t_end,
                                  double dt, std::uint64_t seed,
                                  const TelegraphOptions& opts) {
  const SplitHamiltonian h = model.hamiltonian();
  const UnitaryPropagator prop(h);
  CounterRng rng(seed, 0);

  double window = opts.window;
  if (window <= 0.0 && params.gamma0 > 0.0)
    window = std::sqrt(params.tau0() / model.rabi_omega());

  std::vector<double> change_times;
  int occupied = 0;  // start in |up>
  int collapses = 0;
  walk_trajectory(
      prop, h, params, model.up_state(), t_end, dt, rng, {},
      [](int, double, const VectorXcd&) {},
      [&](const EventView& ev) {
        ++collapses;
        if (ev.selected != occupied) {
          occupied = ev.selected;
          // Drop flips that revert within the observer window.
          if (!change_times.empty() &&
              ev.time - change_times.back() < window)
            change_times.pop_back();
          else
            change_times.push_back(ev.time);
        }
      });

  TelegraphResult res;
  res.collapses = collapses;
  res.switches = static_cast<int>(change_times.size());
  if (change_times.size() >= 2) {
    res.observed_span = change_times.back() - change_times.front();
    res.mean_dwell =
        res.observed_span / static_cast<double>(change_times.size() - 1);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Cyclic emission model
// ---------------------------------------------------------------------------

CyclicModel::CyclicModel(double system_coupling, double emission_coupling,
                         int modes, double band)
    : v1(system_coupling),
      v2(emission_coupling),
      n_photon_modes(modes),
      band_width(band > 0.0 ? band : 4.0 * system_coupling) {
  if (!(v1 > 0.0)) throw InvariantError("CyclicModel: v1 must be > 0");
  if (v2 < 0.0) throw InvariantError("CyclicModel: v2 must be >= 0");
  if (n_photon_modes < 1)
    throw InvariantError("CyclicModel: need at least one photon mode");
}

double CyclicModel::mode_density() const {
  if (n_photon_modes < 2) return 1.0 / band_width;
  return static_cast<double>(n_photon_modes - 1) / band_width;
}

SplitHamiltonian CyclicModel::hamiltonian() const {
  const int m = n_photon_modes;
  const int d = dim();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(d));
  for (int p = 0; p <= m; ++p)
    for (const char* s : {"up", "down"})
      labels.push_back(std::string(s) +
                       (p == 0 ? "_vac" : "_ph" + std::to_string(p)));

  VectorXd e0 = VectorXd::Zero(d);
  for (int p = 1; p <= m; ++p) {
    const double frac = m > 1 ? static_cast<double>(p - 1) / (m - 1) - 0.5 : 0.0;
    const double eps = photon_energy() + band_width * frac;
    e0(0 + 2 * p) = eps;
    e0(1 + 2 * p) = eps;
  }

  MatrixXcd h1 = MatrixXcd::Zero(d, d);
  for (int p = 0; p <= m; ++p) {
    h1(0 + 2 * p, 1 + 2 * p) = -v1;
    h1(1 + 2 * p, 0 + 2 * p) = -v1;
  }
  // Emission |1,vac> -> |0,ph>: in the classical basis |0><1| has elements
  // +-1/2 with the sign set by the source system state.
  for (int p = 1; p <= m; ++p) {
    for (int sp = 0; sp < 2; ++sp) {
      for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 0.5 : -0.5;
        h1(sp + 2 * p, s) += v2 * sign;
        h1(s, sp + 2 * p) += v2 * sign;
      }
    }
  }
  return SplitHamiltonian(PreferredBasis(d, std::move(labels)), std::move(e0),
                          std::move(h1));
}

double CyclicModel::tau() const {
  if (v2 == 0.0) return std::numeric_limits<double>::infinity();
  if (n_photon_modes < 2) return std::numbers::pi / (2.0 * v2);
  return 1.0 / (2.0 * std::numbers::pi * v2 * v2 * mode_density());
}

double CyclicModel::coupling_for_tau(double v1, int modes, double band,
                                     double tau_target) {
  if (band <= 0.0) band = 4.0 * v1;
  const double density = modes > 1 ? (modes - 1) / band : 1.0 / band;
  return std::sqrt(1.0 / (2.0 * std::numbers::pi * tau_target * density));
}

PureState CyclicModel::initial_state() const {
  VectorXcd c = VectorXcd::Zero(dim());
  c(0) = 1.0 / std::numbers::sqrt2;
  c(1) = 1.0 / std::numbers::sqrt2;
  return PureState(std::move(c));
}

double EmissionLog::mean_interval() const {
  if (times.size() < 2) return 0.0;
  return (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

EmissionLog run_cyclic(const CyclicModel& model, const CollapseParams& params,
                       double t_end, double dt, std::uint64_t seed) {
  const SplitHamiltonian h = model.hamiltonian();
  const UnitaryPropagator prop(h);
  CounterRng rng(seed, 0);

  EmissionLog log;
  log.t_end = t_end;
  log.tau = model.tau();
  log.tau_separation_ok =
      params.gamma0 == 0.0 || log.tau <= 0.1 * params.tau0();

  const int dim = prop.dim();
  const int n_steps = detail::step_count(t_end, dt);
  if (params.gamma0 * dt > 0.1 + 1e-12)
    throw InvariantError("run_cyclic: dt * gamma0 must be <= 0.1");

  const VectorXd hdiag = h.diagonal();
  const VectorXcd phases = prop.step_phases(dt);
  const double fire_prob = 1.0 - std::exp(-params.gamma0 * dt);

  // Vacuum-sector rows of V: enough to track the register occupation.
  const Eigen::RowVectorXcd row_u = prop.eigenvectors().row(0);
  const Eigen::RowVectorXcd row_d = prop.eigenvectors().row(1);

  VectorXcd psi_eig = prop.to_eigenbasis(model.initial_state().amplitudes());
  double mean_energy = 0.0;
  for (int i = 0; i < dim; ++i)
    mean_energy += prop.eigenvalues()(i) * std::norm(psi_eig(i));

  // Cycle bookkeeping: emitted weight is measured against the excited
  // component present right after the collapse that opened the cycle.
  double w_exc_cycle = std::norm((row_u * psi_eig).value() -
                                 (row_d * psi_eig).value()) / 2.0;
  bool logged = false;

  VectorXcd psi_pref(dim);
  VectorXd weights(dim);

  for (int step = 1; step <= n_steps; ++step) {
    const double t = std::min(static_cast<double>(step) * dt, t_end);
    psi_eig.array() *= phases.array();

    const double p_vac = std::norm((row_u * psi_eig).value()) +
                         std::norm((row_d * psi_eig).value());
    const double p_ph = std::max(0.0, 1.0 - p_vac);
    if (!logged && w_exc_cycle > 1e-9 && p_ph >= 0.5 * w_exc_cycle) {
      log.times.push_back(t);
      logged = true;
    }

    if (params.gamma0 > 0.0 && rng.uniform01() < fire_prob) {
      psi_pref.noalias() = prop.eigenvectors() * psi_eig;
      weights = psi_pref.cwiseAbs2();
      const double ds = weight_entropy(weights);
      const double de = weights.dot(hdiag) - mean_energy;
      if (ds > de / params.t0) {
        ++log.collapses;
        const int m = rng.pick_discrete(weights);
        const int sys = m & 1;
        const int photon = m >> 1;
        if (photon >= 1 && !logged) log.times.push_back(t);
        // Detected photons escape; the register restarts empty.
        psi_eig = prop.to_eigenbasis(VectorXcd::Unit(dim, sys));
        mean_energy = 0.0;
        for (int i = 0; i < dim; ++i)
          mean_energy += prop.eigenvalues()(i) * std::norm(psi_eig(i));
        w_exc_cycle = 0.5;
        logged = false;
      }
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// Decay model
// ---------------------------------------------------------------------------

DecayModel::DecayModel(int band_levels, double band_width, double band_coupling)
    : n_band(band_levels), bandwidth(band_width), coupling(band_coupling) {
  if (n_band < 10) throw InvariantError("DecayModel: n_band must be >= 10");
  if (!(bandwidth > 0.0)) throw InvariantError("DecayModel: bandwidth must be > 0");
  if (coupling < 0.0) throw InvariantError("DecayModel: coupling must be >= 0");
  if (coupling > bandwidth / 10.0)
    throw InvariantError("DecayModel: coupling must be << bandwidth");
}

double DecayModel::recurrence_time() const {
  return 2.0 * std::numbers::pi / level_spacing();
}

SplitHamiltonian DecayModel::hamiltonian() const {
  const int d = dim();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(d));
  labels.push_back("unstable");
  for (int k = 1; k <= n_band; ++k) labels.push_back("band" + std::to_string(k));

  VectorXd e0 = VectorXd::Zero(d);
  for (int k = 1; k <= n_band; ++k)
    e0(k) = bandwidth * (static_cast<double>(k - 1) / (n_band - 1) - 0.5);

  MatrixXcd h1 = MatrixXcd::Zero(d, d);
  for (int k = 1; k <= n_band; ++k) {
    h1(0, k) = coupling;
    h1(k, 0) = coupling;
  }
  return SplitHamiltonian(PreferredBasis(d, std::move(labels)), std::move(e0),
                          std::move(h1));
}

double DecayModel::golden_rule_rate(const CollapseParams& params) const {
  const RateMatrix rates = build_rates(hamiltonian(), params);
  return rates.w.col(0).sum();
}

SurvivalCurve run_decay(const DecayModel& model, const CollapseParams& params,
                        int ensemble_n, double t_end, double dt,
                        std::uint64_t seed, int n_samples) {
  if (ensemble_n < 1) throw InvariantError("run_decay: ensemble_n >= 1");
  if (t_end > model.recurrence_time()) {
    std::ostringstream os;
    os << "run_decay: t_end " << t_end << " exceeds the band recurrence time "
       << model.recurrence_time();
    throw NumericsError(os.str());
  }

  const SplitHamiltonian h = model.hamiltonian();
  const UnitaryPropagator prop(h);
  const PureState initial = PureState::basis_state(model.dim(), 0);

  SurvivalCurve curve;
  curve.ensemble_n = ensemble_n;
  curve.death_times.assign(static_cast<std::size_t>(ensemble_n),
                           std::numeric_limits<double>::infinity());

  for (int i = 0; i < ensemble_n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double death = std::numeric_limits<double>::infinity();
    walk_trajectory(
        prop, h, params, initial, t_end, dt, rng, {},
        [](int, double, const VectorXcd&) {},
        [&](const EventView& ev) -> bool {
          if (ev.selected != 0) {
            death = ev.time;
            return false;
          }
          return true;
        });
    curve.death_times[static_cast<std::size_t>(i)] = death;
  }

  curve.times.resize(static_cast<std::size_t>(n_samples) + 1);
  curve.survival.resize(n_samples + 1);
  for (int k = 0; k <= n_samples; ++k) {
    const double t = t_end * k / n_samples;
    curve.times[static_cast<std::size_t>(k)] = t;
    std::int64_t alive = 0;
    for (double d : curve.death_times)
      if (d > t) ++alive;
    curve.survival(k) = static_cast<double>(alive) / ensemble_n;
  }
  return curve;
}

DecayFit fit_decay(const SurvivalCurve& curve, double tau_oracle,
                   double fit_horizon) {
  std::vector<double> ts, ps;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] <= fit_horizon && curve.survival(static_cast<int>(i)) > 0.0) {
      ts.push_back(curve.times[i]);
      ps.push_back(curve.survival(static_cast<int>(i)));
    }
  }
  const LinearFit lf = fit_log_linear(ts, ps);
  DecayFit fit;
  fit.tau_oracle = tau_oracle;
  fit.tau_fit = -1.0 / lf.slope;
  fit.r_squared = lf.r_squared;
  return fit;
}

}  // namespace twolaw
