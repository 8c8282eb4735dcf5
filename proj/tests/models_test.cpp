#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "twolaw/density.hpp"
#include "twolaw/ensemble.hpp"
#include "twolaw/fits.hpp"
#include "twolaw/models.hpp"

using namespace twolaw;

TEST_CASE("two-level model construction") {
  CHECK_THROWS_AS(TwoLevelModel(0.0), InvariantError);
  CHECK_THROWS_AS(TwoLevelModel(1.0, -0.5), InvariantError);

  const TwoLevelModel model(1.3);
  CHECK(model.rabi_omega() == doctest::Approx(2.6));
  const SplitHamiltonian h = model.hamiltonian();
  CHECK(h.h1()(0, 1).real() == doctest::Approx(-1.3));
  CHECK(h.h1_diagonal_is_zero());

  // Ground and excited states are eigenstates at -v1 and +v1.
  const MatrixXcd ht = h.total();
  const VectorXcd g = model.ground_state().amplitudes();
  const VectorXcd e = model.excited_state().amplitudes();
  CHECK((ht * g + 1.3 * g).norm() < 1e-12);
  CHECK((ht * e - 1.3 * e).norm() < 1e-12);
}

TEST_CASE("instability condition reproduces both limits") {
  SUBCASE("low temperature: T0 ln 2 > v1") {
    const TwoLevelModel model(1.0, 1e-3);
    CHECK(instability_condition(model, CollapseParams(1.5, 0.0)));
    CHECK_FALSE(instability_condition(model, CollapseParams(1.0, 0.0)));
    // T0 ln 2 = 1.04 v1 > v1 for T0 = 1.5 v1 (the printed example).
    const double boundary = instability_boundary_t0(model);
    CHECK(boundary * std::numbers::ln2 == doctest::Approx(1.0).epsilon(1e-3));
  }

  SUBCASE("high temperature: T0 > 2T") {
    const TwoLevelModel model(1.0, 100.0);
    const double boundary = instability_boundary_t0(model);
    CHECK(boundary / (2.0 * model.temperature) ==
          doctest::Approx(1.0).epsilon(0.01));
    for (double t_over_v : {100.0, 300.0, 1000.0}) {
      const TwoLevelModel hot(1.0, t_over_v);
      const double b = instability_boundary_t0(hot);
      CHECK(std::abs(b / (2.0 * hot.temperature) - 1.0) < 0.02);
    }
  }

  SUBCASE("T0 -> 0 never triggers when dE > 0") {
    const TwoLevelModel model(1.0, 0.5);
    CHECK_FALSE(instability_condition(model, CollapseParams(1e-12, 0.0)));
  }

  SUBCASE("bisected boundary equals dE/dS") {
    for (double temp : {0.01, 0.5, 2.0, 40.0}) {
      const TwoLevelModel model(1.0, temp);
      const MixedState rho = model.canonical_state();
      const SplitHamiltonian h = model.hamiltonian();
      const double closed =
          reduction_energy(rho, h) / reduction_entropy(rho);
      CHECK(instability_boundary_t0(model) ==
            doctest::Approx(closed).epsilon(1e-9));
    }
  }
}

TEST_CASE("ground-state instability is exactly the ln2 comparison") {
  CounterRng rng(13, 13);
  for (int rep = 0; rep < 100; ++rep) {
    const double v1 = 0.1 + 5.0 * rng.uniform01();
    const double t0 = 0.1 + 10.0 * rng.uniform01();
    if (std::abs(t0 * std::numbers::ln2 - v1) < 1e-6) continue;
    const TwoLevelModel model(v1);
    const bool met = criterion_met(model.ground_state(), model.hamiltonian(),
                                   CollapseParams(t0, 0.0));
    CHECK(met == (t0 * std::numbers::ln2 > v1));
  }
}

TEST_CASE("telegraph switching time scales as 1/(omega^2 tau0)") {
  const CollapseParams params(100.0, 1.0);  // always unstable, tau0 = 1
  double previous_dwell = 0.0;
  for (double omega : {0.1, 0.02}) {
    const TwoLevelModel model(omega / 2.0);
    const double predicted = 2.0 / (omega * omega * params.tau0());
    const TelegraphResult res = measure_switching(
        model, params, 150.0 * predicted, 0.1, 4242);
    REQUIRE(res.switches > 50);
    CHECK(res.mean_dwell > predicted / 2.0);
    CHECK(res.mean_dwell < predicted * 2.0);
    CHECK(res.mean_dwell > previous_dwell);  // slower flipping at smaller omega
    previous_dwell = res.mean_dwell;
  }
}

TEST_CASE("cyclic model") {
  SUBCASE("construction and lifetime") {
    CHECK_THROWS_AS(CyclicModel(0.0, 0.1, 8), InvariantError);
    CHECK_THROWS_AS(CyclicModel(1.0, -0.1, 8), InvariantError);
    CHECK_THROWS_AS(CyclicModel(1.0, 0.1, 0), InvariantError);

    const double v2 = CyclicModel::coupling_for_tau(1.0, 32, 4.0, 1.0);
    const CyclicModel model(1.0, v2, 32, 4.0);
    CHECK(model.tau() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.dim() == 66);
    CHECK(model.hamiltonian().h1_diagonal_is_zero());
  }

  SUBCASE("no emission coupling reduces to the isolated two-level model") {
    const CyclicModel open(1.0, 0.0, 8);
    const TwoLevelModel closed(1.0);
    const CollapseParams params(4.0, 0.05);

    const EmissionLog log = run_cyclic(open, params, 500.0, 0.05, 31);
    CHECK(log.times.empty());

    // Same master seed => identical population histories: the photon sector
    // stays empty and the Born weights coincide entry by entry.
    const std::vector<std::string> obs{"pop_0", "pop_1"};
    DenseScenario a(open.hamiltonian(), params,
                    InitialStateRule::fixed(open.initial_state()), 50.0, 0.02,
                    obs);
    DenseScenario b(closed.hamiltonian(), params,
                    InitialStateRule::fixed(closed.ground_state()), 50.0, 0.02,
                    obs);
    std::vector<double> grid(11);
    for (int k = 0; k <= 10; ++k) grid[static_cast<std::size_t>(k)] = 5.0 * k;
    std::vector<double> outa(22), outb(22);
    std::vector<SlimEvent> eva, evb;
    a.run_one(904, 0, grid, outa.data(), eva);
    b.run_one(904, 0, grid, outb.data(), evb);
    REQUIRE(eva.size() == evb.size());
    for (std::size_t i = 0; i < outa.size(); ++i)
      CHECK(outa[i] == doctest::Approx(outb[i]).epsilon(1e-12));
  }

  SUBCASE("no collapse, no emission beyond the initial transient") {
    const double v2 = CyclicModel::coupling_for_tau(1.0, 32, 4.0, 1.0);
    const CyclicModel model(1.0, v2, 32, 4.0);
    const EmissionLog log =
        run_cyclic(model, CollapseParams(4.0, 0.0), 200.0, 0.05, 5);
    CHECK(log.times.empty());
    CHECK(log.collapses == 0);
  }

  SUBCASE("emission cadence follows tau0") {
    const double v2 = CyclicModel::coupling_for_tau(1.0, 32, 4.0, 1.0);
    const CyclicModel model(1.0, v2, 32, 4.0);
    const CollapseParams params(4.0, 0.01);  // tau0 = 100 >> tau = 1
    const EmissionLog log = run_cyclic(model, params, 1.05e5, 0.25, 999);
    CHECK(log.tau_separation_ok);
    REQUIRE(log.times.size() > 900);
    CHECK(log.mean_interval() > 95.0);
    CHECK(log.mean_interval() < 115.0);
  }

  SUBCASE("emission count over 1e4 tau0 is Poisson-consistent") {
    const double v2 = CyclicModel::coupling_for_tau(1.0, 32, 4.0, 1.0);
    const CyclicModel model(1.0, v2, 32, 4.0);
    const CollapseParams params(4.0, 0.01);
    const EmissionLog log = run_cyclic(model, params, 1e6, 1.0, 27182);
    // 1e4 expected; allow a 3 sigma Poisson band on top of the small
    // detection losses from cycles cut short by the next collapse.
    CHECK(std::abs(static_cast<double>(log.times.size()) - 1e4) <= 300.0);
  }

  SUBCASE("tau >> tau0 is flagged") {
    const CyclicModel slow(1.0, 1e-3, 32, 4.0);  // tau ~ 2e4
    const EmissionLog log =
        run_cyclic(slow, CollapseParams(4.0, 0.05), 10.0, 0.05, 1);
    CHECK_FALSE(log.tau_separation_ok);
  }
}

TEST_CASE("decay model") {
  SUBCASE("construction") {
    CHECK_THROWS_AS(DecayModel(5, 1.0, 1e-3), InvariantError);
    CHECK_THROWS_AS(DecayModel(50, 1.0, 0.2), InvariantError);
    const DecayModel model(200, 3.0, 4.95e-3);
    CHECK(model.dim() == 201);
    CHECK(model.recurrence_time() ==
          doctest::Approx(2.0 * std::numbers::pi * 199.0 / 3.0));
  }

  SUBCASE("golden-rule rate approximates 2 pi g^2 rho") {
    const DecayModel model(200, 3.0, 4.95e-3);
    const double rho = 199.0 / 3.0;
    const double plain = 2.0 * std::numbers::pi * 4.95e-3 * 4.95e-3 * rho;
    const double rate = model.golden_rule_rate(CollapseParams(10.0, 0.05));
    CHECK(rate == doctest::Approx(plain).epsilon(0.05));
  }

  SUBCASE("zero coupling never decays") {
    const DecayModel model(50, 1.0, 0.0);
    const SurvivalCurve curve =
        run_decay(model, CollapseParams(10.0, 0.1), 100, 100.0, 0.5, 4, 20);
    CHECK(curve.survival.minCoeff() == 1.0);
  }

  SUBCASE("recurrence-time guard") {
    const DecayModel model(50, 1.0, 1e-3);
    CHECK_THROWS_AS(
        run_decay(model, CollapseParams(10.0, 0.1), 10, 1e4, 0.5, 4),
        NumericsError);
  }

  SUBCASE("fitted lifetime tracks the golden rule; doubling the coupling quarters it") {
    const CollapseParams params(10.0, 0.2);
    const DecayModel weak(200, 3.0, 7e-3);
    const double tau_weak = weak.golden_rule_tau(params);
    const SurvivalCurve curve = run_decay(weak, params, 1500,
                                          3.0 * tau_weak, 0.5, 66, 60);
    const DecayFit fit = fit_decay(curve, tau_weak, 3.0 * tau_weak);
    CHECK(fit.r_squared > 0.99);
    CHECK(std::abs(fit.tau_fit - tau_weak) / tau_weak < 0.10);

    const DecayModel strong(200, 3.0, 1.4e-2);
    const double tau_strong = strong.golden_rule_tau(params);
    CHECK(tau_strong == doctest::Approx(tau_weak / 4.0).epsilon(1e-6));
    const SurvivalCurve curve2 = run_decay(strong, params, 1500,
                                           3.0 * tau_strong, 0.5, 67, 60);
    const DecayFit fit2 = fit_decay(curve2, tau_strong, 3.0 * tau_strong);
    CHECK(fit2.tau_fit / fit.tau_fit ==
          doctest::Approx(0.25).epsilon(0.2));
  }

  SUBCASE("survival is seed-robust across half-ensembles") {
    const CollapseParams params(10.0, 0.2);
    const DecayModel model(200, 3.0, 9e-3);
    const double tau = model.golden_rule_tau(params);
    DecayFit fits[2];
    double se[2];
    for (int half = 0; half < 2; ++half) {
      const SurvivalCurve curve =
          run_decay(model, params, 800, 3.0 * tau, 0.5,
                    half == 0 ? 1111 : 2222, 50);
      fits[half] = fit_decay(curve, tau, 3.0 * tau);
      // The lifetime estimate carries a relative error ~ 1/sqrt(deaths);
      // the per-point fit stderr is far too small because the survival
      // samples share trajectories.
      std::int64_t deaths = 0;
      for (double d : curve.death_times)
        if (std::isfinite(d)) ++deaths;
      REQUIRE(deaths > 100);
      se[half] = fits[half].tau_fit / std::sqrt(static_cast<double>(deaths));
    }
    const double combined = std::sqrt(se[0] * se[0] + se[1] * se[1]);
    CHECK(std::abs(fits[0].tau_fit - fits[1].tau_fit) <= 3.0 * combined);
  }
}
