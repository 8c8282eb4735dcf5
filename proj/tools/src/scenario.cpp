#include "twolaw_cli/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "twolaw/models.hpp"

namespace twolaw::cli {

namespace {

SplitHamiltonian build_hamiltonian(const ScenarioConfig& c) {
  switch (c.model) {
    case ModelKind::TwoLevel:
      return TwoLevelModel(c.v1, c.temperature).hamiltonian();
    case ModelKind::Cyclic:
      return CyclicModel(c.v1, c.v2, c.photon_modes, c.band_width).hamiltonian();
    case ModelKind::Decay:
      return DecayModel(c.n_band, c.bandwidth, c.coupling).hamiltonian();
    case ModelKind::Custom: {
      PreferredBasis basis(c.dim);
      VectorXd e0(c.dim);
      for (int i = 0; i < c.dim; ++i) e0(i) = c.e0[static_cast<std::size_t>(i)];
      MatrixXcd h1(c.dim, c.dim);
      for (int i = 0; i < c.dim; ++i)
        for (int j = 0; j < c.dim; ++j)
          h1(i, j) = c.h1_rows[static_cast<std::size_t>(i)]
                              [static_cast<std::size_t>(j)];
      return SplitHamiltonian(std::move(basis), std::move(e0), std::move(h1));
    }
    case ModelKind::Wavepacket:
      throw InvariantError("build_hamiltonian: wavepacket model has no dense H");
  }
  throw InvariantError("build_hamiltonian: unreachable");
}

PureState dense_ground_state(const ScenarioConfig& c,
                             const SplitHamiltonian& h) {
  if (c.model == ModelKind::TwoLevel)
    return TwoLevelModel(c.v1, c.temperature).ground_state();
  if (c.model == ModelKind::Cyclic)
    return CyclicModel(c.v1, c.v2, c.photon_modes, c.band_width).initial_state();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.total());
  return PureState(es.eigenvectors().col(0));
}

InitialStateRule initial_rule(const ScenarioConfig& c,
                              const SplitHamiltonian& h) {
  switch (c.initial) {
    case InitialKind::Ground:
      return InitialStateRule::fixed(dense_ground_state(c, h));
    case InitialKind::Basis:
      return InitialStateRule::fixed(
          PureState::basis_state(h.dim(), c.initial_index));
    case InitialKind::Superposition: {
      VectorXcd amp(h.dim());
      for (int i = 0; i < h.dim(); ++i)
        amp(i) = c.amplitudes[static_cast<std::size_t>(i)];
      amp.normalize();
      return InitialStateRule::fixed(PureState(std::move(amp)));
    }
    case InitialKind::Canonical: {
      const TwoLevelModel model(c.v1, c.temperature);
      const double x =
          c.temperature > 0.0 ? c.v1 / c.temperature
                              : std::numeric_limits<double>::infinity();
      const double p_excited =
          std::isfinite(x) ? 1.0 / (1.0 + std::exp(2.0 * x)) : 0.0;
      return InitialStateRule::mixture(
          {1.0 - p_excited, p_excited},
          {model.ground_state().amplitudes(),
           model.excited_state().amplitudes()});
    }
    case InitialKind::Gaussian:
      throw InvariantError("initial_rule: gaussian is not a dense initial state");
  }
  throw InvariantError("initial_rule: unreachable");
}

MixedState initial_density(const InitialStateRule& rule, int dim) {
  MatrixXcd rho = MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < rule.states.size(); ++i)
    rho += rule.probabilities[i] *
           (rule.states[i] * rule.states[i].adjoint());
  return MixedState(std::move(rho));
}

}  // namespace

BuiltScenario build_scenario(const ScenarioConfig& c) {
  BuiltScenario built;
  built.params = CollapseParams(c.t0, c.gamma0);
  built.dt = resolved_dt(c);
  built.t_end = c.t_end;
  built.observables = resolved_observables(c);

  if (c.model == ModelKind::Wavepacket) {
    const WavepacketModel model(c.mass, c.grid_n, c.grid_dx, c.cell_width);
    GridState psi0 = gaussian_packet(model, c.sigma, c.center, c.momentum);
    built.scenario = std::make_unique<WavepacketScenario>(
        model, built.params, std::move(psi0), c.t_end, built.dt);
    return built;
  }

  SplitHamiltonian h = build_hamiltonian(c);
  built.basis_labels = h.basis().labels;
  InitialStateRule rule = initial_rule(c, h);
  if (h.dim() <= 16) {
    built.rho0 = initial_density(rule, h.dim());
    built.hamiltonian = h;
  }
  built.scenario = std::make_unique<DenseScenario>(
      std::move(h), built.params, std::move(rule), c.t_end, built.dt,
      built.observables);
  return built;
}

void set_config_field(ScenarioConfig& c, const std::string& path,
                      double value) {
  struct Field {
    const char* name;
    double ScenarioConfig::* member;
  };
  static const Field kFields[] = {
      {"model.v1", &ScenarioConfig::v1},
      {"model.temperature", &ScenarioConfig::temperature},
      {"model.v2", &ScenarioConfig::v2},
      {"model.band_width", &ScenarioConfig::band_width},
      {"model.bandwidth", &ScenarioConfig::bandwidth},
      {"model.coupling", &ScenarioConfig::coupling},
      {"model.mass", &ScenarioConfig::mass},
      {"model.grid_dx", &ScenarioConfig::grid_dx},
      {"model.cell_width", &ScenarioConfig::cell_width},
      {"collapse.t0", &ScenarioConfig::t0},
      {"collapse.gamma0", &ScenarioConfig::gamma0},
      {"initial.sigma", &ScenarioConfig::sigma},
      {"initial.center", &ScenarioConfig::center},
      {"initial.momentum", &ScenarioConfig::momentum},
      {"integration.dt", &ScenarioConfig::dt},
      {"integration.t_end", &ScenarioConfig::t_end},
  };
  for (const Field& f : kFields) {
    if (path == f.name) {
      c.*(f.member) = value;
      return;
    }
  }
  throw ConfigError({ConfigIssue{0, 0, path, "not a sweepable numeric field"}});
}

}  // namespace twolaw::cli
