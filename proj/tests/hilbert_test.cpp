#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "twolaw/hilbert.hpp"

using namespace twolaw;
using testutil::random_hermitian;
using testutil::random_split;
using testutil::random_state;

namespace {

SplitHamiltonian two_level(double v1) {
  MatrixXcd h1(2, 2);
  h1 << 0.0, -v1, -v1, 0.0;
  return SplitHamiltonian(PreferredBasis(2, {"up", "down"}),
                          VectorXd::Zero(2), h1);
}

PureState plus_state() {
  VectorXcd c(2);
  c << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  return PureState(c);
}

}  // namespace

TEST_CASE("preferred basis invariants") {
  CHECK_THROWS_AS(PreferredBasis(0), InvariantError);
  CHECK_THROWS_AS(PreferredBasis(2, {"a", "a"}), InvariantError);
  CHECK_THROWS_AS(PreferredBasis(2, {"a"}), InvariantError);
  const PreferredBasis b(3);
  CHECK(b.labels == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("split hamiltonian validates hermiticity") {
  MatrixXcd h1(2, 2);
  h1 << 0.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 0.0;  // anti-Hermitian
  CHECK_THROWS_AS(
      SplitHamiltonian(PreferredBasis(2), VectorXd::Zero(2), h1),
      InvariantError);

  // A tiny asymmetry within tolerance is symmetrized away.
  MatrixXcd ok(2, 2);
  ok << 0.0, 1.0, 1.0 + 1e-14, 0.0;
  const SplitHamiltonian h(PreferredBasis(2), VectorXd::Zero(2), ok);
  CHECK(hermiticity_defect(h.h1()) == 0.0);
}

TEST_CASE("state validation") {
  VectorXcd c(2);
  c << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{c}, InvariantError);

  MatrixXcd rho(2, 2);
  rho << 0.7, 0.0, 0.0, 0.2;  // trace 0.9
  CHECK_THROWS_AS(MixedState{rho}, InvariantError);

  rho << 1.2, 0.0, 0.0, -0.2;  // negative eigenvalue
  CHECK_THROWS_AS(MixedState{rho}, InvariantError);

  CHECK_THROWS_AS(CollapseParams(0.0, 1.0), InvariantError);
  CHECK_THROWS_AS(CollapseParams(1.0, -1.0), InvariantError);
  CHECK(CollapseParams(1.0, 0.0).tau0() ==
        std::numeric_limits<double>::infinity());
  CHECK(CollapseParams(1.0, 4.0).tau0() == doctest::Approx(0.25));
}

TEST_CASE("born weights") {
  const PureState basis = PureState::basis_state(4, 0);
  CHECK(born_weights(basis)(0) == 1.0);
  CHECK(born_weights(basis).tail(3).cwiseAbs().maxCoeff() == 0.0);

  CHECK(born_weights(plus_state())(0) == doctest::Approx(0.5).epsilon(1e-12));

  VectorXcd c(2);
  c << 0.5, Complex(0.0, std::sqrt(3.0) / 2.0);
  const VectorXd w = born_weights(PureState(c));
  CHECK(w(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(w(1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("reduction entropy") {
  CHECK(reduction_entropy(plus_state()) ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  CHECK(reduction_entropy(PureState::basis_state(5, 3)) == 0.0);

  // Maximally mixed 2-level state: S_f = S_i = ln 2.
  MatrixXcd rho = MatrixXcd::Identity(2, 2) / 2.0;
  CHECK(reduction_entropy(MixedState(rho)) ==
        doctest::Approx(0.0).epsilon(1e-10));

  // Entropy of any pure state is nonnegative, zero only on basis states.
  CounterRng rng(91, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const PureState psi = random_state(rng, 4);
    CHECK(reduction_entropy(psi) >= -1e-10);
    CHECK(reduction_entropy(psi) > 1e-6);  // random states are not basis states
  }
}

TEST_CASE("reduction energy") {
  const SplitHamiltonian h = two_level(1.5);

  CHECK(reduction_energy(plus_state(), h) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(reduction_energy(PureState::basis_state(2, 0), h) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Canonical two-level state at temperature T: dE = v1 tanh(v1/T).
  for (double temp : {0.7, 1.3, 5.0, 150.0}) {
    const double d = std::tanh(1.5 / temp);
    MatrixXcd rho(2, 2);
    rho << 0.5, d / 2.0, d / 2.0, 0.5;
    CHECK(reduction_energy(MixedState(rho), h) ==
          doctest::Approx(1.5 * d).epsilon(1e-10));
  }

  CHECK_THROWS_AS(reduction_energy(PureState::basis_state(3, 0), h),
                  DimensionError);
}

TEST_CASE("general reduction energy equals minus H1 expectation for zero diagonal") {
  CounterRng rng(12, 5);
  for (int rep = 0; rep < 1000; ++rep) {
    const SplitHamiltonian h = random_split(rng, 4, 2.0, 1.0, true);
    const PureState psi = random_state(rng, 4);
    const double general = reduction_energy(psi, h);
    const double direct =
        -(psi.amplitudes().dot(h.h1() * psi.amplitudes())).real();
    CHECK(general == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("unitary propagation") {
  const SplitHamiltonian h = two_level(1.0);
  const UnitaryPropagator prop(h);

  SUBCASE("dt = 0 is the identity") {
    const PureState psi = plus_state();
    const PureState out = prop.evolve(psi, 0.0);
    CHECK((out.amplitudes() - psi.amplitudes()).norm() < 1e-14);
  }

  SUBCASE("eigenstates are stationary up to a phase") {
    const PureState ground = plus_state();  // eigenstate at E = -v1
    const PureState out = prop.evolve(ground, 0.37);
    const Complex overlap = ground.amplitudes().dot(out.amplitudes());
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("half Rabi period flips the classical state") {
    const double dt = std::numbers::pi / 2.0;  // pi hbar / (2 v1)
    const PureState out = prop.evolve(PureState::basis_state(2, 0), dt);
    CHECK(std::norm(out.amplitudes()(1)) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("non-finite dt is rejected") {
    CHECK_THROWS_AS(
        prop.evolve(plus_state(), std::numeric_limits<double>::quiet_NaN()),
        InvariantError);
  }
}

TEST_CASE("norm and energy preservation over many steps") {
  CounterRng rng(3131, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const SplitHamiltonian h = random_split(rng, 3, 1.0, 0.7, false);
    const UnitaryPropagator prop(h);
    const PureState psi = random_state(rng, 3);
    const PureState out = prop.evolve(psi, 10.0 * rng.uniform01() - 5.0);
    CHECK(out.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-10));
  }

  // <H> drift over 1e4 steps.
  const SplitHamiltonian h = random_split(rng, 4, 1.0, 0.5, false);
  const UnitaryPropagator prop(h);
  const MatrixXcd ht = h.total();
  PureState psi = random_state(rng, 4);
  const double e0 = (psi.amplitudes().dot(ht * psi.amplitudes())).real();
  for (int step = 0; step < 10000; ++step) psi = prop.evolve(psi, 0.05);
  const double e1 = (psi.amplitudes().dot(ht * psi.amplitudes())).real();
  CHECK(std::abs(e1 - e0) <= 1e-9 * std::max(1.0, std::abs(e0)));
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("von Neumann entropy is unitarily invariant") {
  CounterRng rng(77, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const SplitHamiltonian h = random_split(rng, 4, 1.5, 0.8, false);
    VectorXd p = testutil::random_probabilities(rng, 4);
    MatrixXcd rho = MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) rho(i, i) = p(i);
    // Rotate into a generic frame first.
    const UnitaryPropagator prop(h);
    const MixedState rotated = prop.evolve(MixedState(rho), 1.3);
    const double s_before = von_neumann_entropy(rotated);
    const MixedState after = prop.evolve(rotated, 2.7);
    CHECK(von_neumann_entropy(after) ==
          doctest::Approx(s_before).epsilon(1e-9));
  }
}

TEST_CASE("dephasing keeps the diagonal and the trace") {
  CounterRng rng(555, 9);
  const PureState psi = random_state(rng, 5);
  const MixedState rho = MixedState::from_pure(psi);
  const MixedState dephased = dephase(rho);
  CHECK(dephased.rho().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  const VectorXd w = born_weights(psi);
  for (int i = 0; i < 5; ++i) {
    CHECK(dephased.rho()(i, i).real() == doctest::Approx(w(i)).epsilon(1e-12));
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(dephased.rho()(i, j)) == 0.0);
  }
}

