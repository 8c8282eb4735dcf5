#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "twolaw/collapse.hpp"
#include "twolaw/fits.hpp"
#include "twolaw/models.hpp"
#include "twolaw/stats.hpp"

using namespace twolaw;
using testutil::random_split;
using testutil::random_state;

namespace {

PureState plus_state() {
  VectorXcd c(2);
  c << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  return PureState(c);
}

/// Superposition held static by H1 = 0 (weights never change, dE = 0).
struct FrozenSetup {
  SplitHamiltonian h;
  PureState psi;
};

FrozenSetup frozen_superposition() {
  VectorXd e0(4);
  e0 << 0.0, 0.3, 0.9, 1.4;
  SplitHamiltonian h(PreferredBasis(4), e0, MatrixXcd::Zero(4, 4));
  VectorXcd c(4);
  c << std::sqrt(0.4), std::sqrt(0.3), std::sqrt(0.2), std::sqrt(0.1);
  return {std::move(h), PureState(std::move(c))};
}

}  // namespace

TEST_CASE("criterion on the two-level ground state") {
  const TwoLevelModel model(1.0);
  const SplitHamiltonian h = model.hamiltonian();

  // ln 2 > v1 / T0 for T0 = 2, not for T0 = 1.
  CHECK(criterion_met(plus_state(), h, CollapseParams(2.0, 0.0)));
  CHECK_FALSE(criterion_met(plus_state(), h, CollapseParams(1.0, 0.0)));

  // Basis states never trigger (dS = 0, strict inequality against dE = 0).
  CHECK_FALSE(
      criterion_met(PureState::basis_state(2, 0), h, CollapseParams(2.0, 0.0)));

  // dE = 0 with dS > 0 always triggers.
  const FrozenSetup frozen = frozen_superposition();
  CHECK(criterion_met(frozen.psi, frozen.h, CollapseParams(1e-9, 0.0)));
}

TEST_CASE("criterion monotone in t0 when dE > 0") {
  CounterRng rng(17, 3);
  int tested = 0;
  while (tested < 100) {
    const SplitHamiltonian h = random_split(rng, 4, 1.0, 0.8);
    const PureState psi = random_state(rng, 4);
    const auto [ds, de] = criterion_values(psi, h);
    if (de <= 0.0) continue;
    ++tested;
    const double boundary = de / ds;
    for (double factor : {1.5, 3.0, 10.0}) {
      if (criterion_met(psi, h, CollapseParams(boundary * 1.01, 0.0)))
        CHECK(criterion_met(psi, h, CollapseParams(boundary * 1.01 * factor, 0.0)));
    }
    CHECK_FALSE(criterion_met(psi, h, CollapseParams(boundary * 0.99, 0.0)));
    CHECK(criterion_met(psi, h, CollapseParams(boundary * 1.01, 0.0)));
  }
}

TEST_CASE("projection statistics") {
  const TwoLevelModel model(1.0);
  const SplitHamiltonian h = model.hamiltonian();
  CounterRng rng(29, 0);

  SUBCASE("basis state maps to itself with zero entropy") {
    const auto [out, ev] =
        project(PureState::basis_state(2, 1), h, rng, 3.0);
    CHECK(ev.selected == 1);
    CHECK(ev.delta_s == 0.0);
    CHECK(ev.time == 3.0);
    CHECK(std::norm(out.amplitudes()(1)) == doctest::Approx(1.0));
  }

  SUBCASE("equal superposition splits 50/50") {
    int zero = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (project(plus_state(), h, rng).second.selected == 0) ++zero;
    const double margin = 3.0 * std::sqrt(0.25 / n);
    CHECK(std::abs(zero / static_cast<double>(n) - 0.5) < margin);
  }

  SUBCASE("asymmetric weights") {
    VectorXcd c(2);
    c << 0.5, Complex(0.0, std::sqrt(3.0) / 2.0);
    const PureState psi(c);
    int one = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      if (project(psi, h, rng).second.selected == 1) ++one;
    const double margin = 3.0 * std::sqrt(0.75 * 0.25 / n);
    CHECK(std::abs(one / static_cast<double>(n) - 0.75) < margin);
  }
}

TEST_CASE("collapse time sampling") {
  CounterRng rng(5, 5);
  CHECK(sample_collapse_time(rng, CollapseParams(1.0, 0.0)) ==
        std::numeric_limits<double>::infinity());
  Moments m;
  for (int i = 0; i < 200000; ++i)
    m.add(sample_collapse_time(rng, CollapseParams(1.0, 4.0)));
  CHECK(m.mean == doctest::Approx(0.25).epsilon(0.01));
}

TEST_CASE("trajectory basics") {
  const TwoLevelModel model(1.0);
  const SplitHamiltonian h = model.hamiltonian();

  SUBCASE("gamma0 = 0 reproduces the unitary trajectory with zero events") {
    const TrajectoryRecord rec = run_trajectory(
        PureState::basis_state(2, 0), h, CollapseParams(2.0, 0.0), 5.0, 0.01,
        77, 50);
    CHECK(rec.events.empty());
    const UnitaryPropagator prop(h);
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      const PureState ref =
          prop.evolve(PureState::basis_state(2, 0), rec.times[i]);
      const double overlap =
          std::abs(ref.amplitudes().dot(rec.states[i].amplitudes()));
      CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("strongly bound ground state never collapses") {
    // v1 >> T0 ln 2: criterion fails along the whole trajectory.
    const TwoLevelModel tight(10.0);
    const TrajectoryRecord rec =
        run_trajectory(tight.ground_state(), tight.hamiltonian(),
                       CollapseParams(1.0, 2.0), 50.0, 0.02, 13);
    CHECK(rec.events.empty());
  }

  SUBCASE("same seed reproduces the run") {
    const CollapseParams params(2.0, 0.5);
    const TrajectoryRecord a =
        run_trajectory(model.ground_state(), h, params, 10.0, 0.01, 99);
    const TrajectoryRecord b =
        run_trajectory(model.ground_state(), h, params, 10.0, 0.01, 99);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      CHECK(a.events[i].time == b.events[i].time);
      CHECK(a.events[i].selected == b.events[i].selected);
    }
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i)
      CHECK((a.states[i].amplitudes() - b.states[i].amplitudes()).norm() ==
            0.0);
  }

  SUBCASE("record invariants") {
    const TrajectoryRecord rec = run_trajectory(
        model.ground_state(), h, CollapseParams(2.0, 0.5), 10.0, 0.01, 123, 10);
    for (std::size_t i = 1; i < rec.times.size(); ++i)
      CHECK(rec.times[i] > rec.times[i - 1]);
    for (const CollapseEvent& ev : rec.events) {
      CHECK(ev.time >= rec.times.front());
      CHECK(ev.time <= rec.times.back());
      CHECK(ev.delta_s >= 0.0);
      CHECK(ev.pre_weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(ev.selected >= 0);
      CHECK(ev.selected < 2);
    }
  }

  SUBCASE("dt gate resolution precondition") {
    CHECK_THROWS_AS(run_trajectory(model.ground_state(), h,
                                   CollapseParams(2.0, 100.0), 1.0, 0.01, 1),
                    InvariantError);
  }
}

TEST_CASE("gated poisson statistics match the exponential law") {
  // Static superposition (H1 = 0): the criterion holds permanently, so the
  // first-event times of independent trajectories are Exp(gamma0) up to the
  // per-step Bernoulli discretization.
  const FrozenSetup frozen = frozen_superposition();
  const CollapseParams params(1.0, 0.5);
  const double dt = 0.01;
  const UnitaryPropagator prop(frozen.h);

  std::vector<double> first_times;
  first_times.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    CounterRng rng(31337, static_cast<std::uint64_t>(i));
    walk_trajectory(
        prop, frozen.h, params, frozen.psi, 100.0, dt, rng, {},
        [](int, double, const VectorXcd&) {},
        [&](const EventView& ev) -> bool {
          first_times.push_back(ev.time);
          return false;
        });
  }
  REQUIRE(first_times.size() == 10000);
  const double d = ks_statistic_exponential(first_times, params.gamma0);
  CHECK(d < 1.63 / std::sqrt(10000.0));  // 1% critical value
}

TEST_CASE("born consistency of first collapse outcomes") {
  const FrozenSetup frozen = frozen_superposition();
  const CollapseParams params(1.0, 1.0);
  const UnitaryPropagator prop(frozen.h);
  const VectorXd w = born_weights(frozen.psi);

  int counts[4] = {0, 0, 0, 0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(808, static_cast<std::uint64_t>(i));
    walk_trajectory(
        prop, frozen.h, params, frozen.psi, 50.0, 0.02, rng, {},
        [](int, double, const VectorXcd&) {},
        [&](const EventView& ev) -> bool {
          ++counts[ev.selected];
          return false;
        });
  }
  for (int k = 0; k < 4; ++k) {
    const double p = w(k);
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(counts[k] / static_cast<double>(n) - p) <= 3.0 * sigma);
  }
}

TEST_CASE("ensemble energy bookkeeping converges to dE") {
  // Stationary eigenstate of the full H: every first collapse starts from
  // the same state, so the mean energy jump must equal dE.
  CounterRng setup(246, 1);
  const SplitHamiltonian h = random_split(setup, 4, 1.0, 0.6);
  const UnitaryPropagator prop(h);
  const PureState psi(prop.eigenvectors().col(0));  // ground eigenstate
  const auto [ds, de] = criterion_values(psi, h);
  REQUIRE(ds > 0.0);
  REQUIRE(de > 0.0);  // collapse out of the ground state costs energy

  const CollapseParams params(1e6, 1.0);  // criterion comfortably met
  const VectorXd hdiag = h.diagonal();
  const double pre_energy =
      (psi.amplitudes().dot(h.total() * psi.amplitudes())).real();

  Moments jump;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    CounterRng rng(1618, static_cast<std::uint64_t>(i));
    walk_trajectory(
        prop, h, params, psi, 50.0, 0.05, rng, {},
        [](int, double, const VectorXcd&) {},
        [&](const EventView& ev) -> bool {
          jump.add(hdiag(ev.selected) - pre_energy);
          return false;
        });
  }
  REQUIRE(jump.n == n);
  const double se = std::sqrt(jump.variance() / n);
  CHECK(std::abs(jump.mean - de) <= 3.0 * se + 1e-12);
}
