#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twolaw/fft.hpp"
#include "twolaw/fits.hpp"
#include "twolaw/rng.hpp"
#include "twolaw/stats.hpp"
#include "twolaw/wavepacket.hpp"

using namespace twolaw;

namespace {

/// lambda0 in natural units (hbar = 1, h = 2 pi).
double lambda0_natural(double mass, double t0) {
  return std::sqrt(2.0 * std::numbers::pi / (mass * t0));
}

}  // namespace

TEST_CASE("grid model validation") {
  CHECK_THROWS_AS(WavepacketModel(1.0, 500, 0.25, 1.0), InvariantError);
  CHECK_THROWS_AS(WavepacketModel(1.0, 512, 0.25, 0.1), InvariantError);
  CHECK_THROWS_AS(WavepacketModel(1.0, 512, 0.25, 0.6), InvariantError);
  const WavepacketModel model(1.0, 512, 0.25, 1.25);
  CHECK(model.cell_points() == 5);
  CHECK(model.n_cells() == 103);  // 512 = 102*5 + 2, short last cell
}

TEST_CASE("fft round trip and parseval") {
  const Fft fft(64);
  CounterRng rng(5, 0);
  VectorXcd x(64);
  for (int i = 0; i < 64; ++i)
    x(i) = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  const VectorXcd orig = x;
  fft.forward(x);
  const double power = x.squaredNorm() / 64.0;
  CHECK(power == doctest::Approx(orig.squaredNorm()).epsilon(1e-12));
  fft.inverse(x);
  CHECK((x - orig).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("gaussian packet moments") {
  const WavepacketModel model(1.0, 512, 0.25, 1.25);
  const GridState psi = gaussian_packet(model, 2.0, 3.0, 0.4);
  CHECK(psi.amplitudes.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  const GridMoments mom = grid_moments(model, psi);
  CHECK(mom.center == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(mom.width == doctest::Approx(2.0).epsilon(1e-4));

  const Fft fft(512);
  // <k^2/2m> = p^2/2m + 1/(8 m sigma^2) for a Gaussian.
  const double expected = 0.4 * 0.4 / 2.0 + 1.0 / (8.0 * 4.0);
  CHECK(grid_kinetic_energy(model, fft, psi) ==
        doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("free packet spreads by the textbook law") {
  const WavepacketModel model(1.0, 512, 0.25, 1.25);
  const GridState psi0 = gaussian_packet(model, 1.0);
  const WavepacketRun run =
      run_wavepacket(model, CollapseParams(1.0, 0.0), psi0, 8.0, 0.05, 1, 50);
  CHECK(run.events.empty());
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    const double expected = 1.0 + std::pow(t / 2.0, 2);
    CHECK(std::abs(std::pow(run.width(static_cast<int>(i)), 2) - expected) /
              expected <
          1e-4);
  }
}

TEST_CASE("cell collapse keeps the in-cell profile") {
  const WavepacketModel model(1.0, 256, 0.25, 1.0);
  const GridState psi = gaussian_packet(model, 3.0, 1.0, 0.2);
  const VectorXd w = cell_born_weights(model, psi);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));

  int cell = 0;
  w.maxCoeff(&cell);
  const GridState out = collapse_to_cell(model, psi, cell);
  CHECK(out.amplitudes.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));

  const int m = model.cell_points();
  const double scale = 1.0 / std::sqrt(w(cell));
  for (int i = 0; i < model.grid_n; ++i) {
    if (i >= cell * m && i < (cell + 1) * m)
      CHECK(std::abs(out.amplitudes(i) - psi.amplitudes(i) * scale) < 1e-14);
    else
      CHECK(std::abs(out.amplitudes(i)) == 0.0);
  }
}

TEST_CASE("localization criterion directions") {
  const double t0 = 4.0;
  const double mass = 1.0;
  const double lam = lambda0_natural(mass, t0);  // ~1.2533

  SUBCASE("wide packet, cell of order lambda0: met") {
    const double dx = lam / 5.0;
    const WavepacketModel model(mass, 512, dx, 5.0 * dx);
    const GridState psi = gaussian_packet(model, 10.0 * lam);
    const LocalizationReport rep =
        localization_criterion(model, psi, CollapseParams(t0, 0.0));
    CHECK(rep.met);
    CHECK(rep.delta_s > 0.0);
  }

  SUBCASE("cell far below lambda0: kinetic cost dominates") {
    const double dx = lam / 40.0;
    const WavepacketModel model(mass, 1024, dx, dx);  // cell = dx << lambda0
    const GridState psi = gaussian_packet(model, 2.0 * lam);
    const LocalizationReport rep =
        localization_criterion(model, psi, CollapseParams(t0, 0.0));
    CHECK_FALSE(rep.met);
  }

  SUBCASE("threshold cell stays within a decade of lambda0 across masses") {
    // Resolution tied to the physical scale: dx = lambda0/5 throughout.
    for (double mass_k : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const double lam_k = lambda0_natural(mass_k, t0);
      const double dx = lam_k / 5.0;
      const WavepacketModel model(mass_k, 1024, dx, 5.0 * dx);
      const GridState psi = gaussian_packet(model, 10.0 * lam_k);
      const LocalizationReport rep =
          localization_criterion(model, psi, CollapseParams(t0, 0.0));
      REQUIRE(std::isfinite(rep.threshold_cell));
      const double ratio = rep.threshold_cell / lam_k;
      CHECK(ratio > 0.1);
      CHECK(ratio < 10.0);
    }
  }
}

TEST_CASE("collapse keeps the packet from spreading") {
  const WavepacketModel model(1.0, 512, 0.25, 1.25);
  const CollapseParams params(2.0, 2.0);
  const double tau0 = params.tau0();
  const double t_end = 80.0 * tau0;
  const GridState psi0 = gaussian_packet(model, 1.0);

  const double lam = lambda0_natural(model.mass, params.t0);
  const double growth = tau0 / (2.0 * model.mass * lam);
  const double lam_max = std::sqrt(lam * lam + growth * growth);

  std::vector<double> slopes;
  Moments mean_width;
  Moments kinetic_slope;
  const int n_traj = 16;
  for (int i = 0; i < n_traj; ++i) {
    const WavepacketRun run = run_wavepacket(model, params, psi0, t_end, 0.025,
                                             9000 + i, 160);
    CHECK(!run.events.empty());
    std::vector<double> ts, ws, ks;
    for (std::size_t s = run.times.size() / 4; s < run.times.size(); ++s) {
      ts.push_back(run.times[s]);
      ws.push_back(run.width(static_cast<int>(s)));
      ks.push_back(run.kinetic(static_cast<int>(s)));
      mean_width.add(run.width(static_cast<int>(s)));
    }
    slopes.push_back(fit_linear(ts, ws).slope);
    kinetic_slope.add(fit_linear(ts, ks).slope);
  }

  // No secular width growth: the mean per-trajectory slope is consistent
  // with zero (two-sided t test, 95%: t_{0.975,15} = 2.13).
  Moments slope_stats;
  for (double s : slopes) slope_stats.add(s);
  const double se =
      std::sqrt(slope_stats.variance() / static_cast<double>(n_traj));
  CHECK(std::abs(slope_stats.mean) <= 2.13 * se);

  // Long-run width bounded by a small multiple of lambda0_max.
  CHECK(mean_width.mean <= 3.0 * lam_max);

  // Anomalous heating: kinetic energy grows, at a power of order T0/tau0.
  const double power_scale = params.t0 / tau0;
  CHECK(kinetic_slope.mean > 0.0);
  CHECK(kinetic_slope.mean > 0.02 * power_scale);
  CHECK(kinetic_slope.mean < 20.0 * power_scale);
}

TEST_CASE("aliasing diagnostic") {
  const WavepacketModel model(1.0, 256, 0.25, 1.0);
  const double k_nyquist = std::numbers::pi / model.grid_dx;
  const GridState fast = gaussian_packet(model, 1.0, 0.0, 0.97 * k_nyquist);
  CHECK_THROWS_AS(
      run_wavepacket(model, CollapseParams(1.0, 0.0), fast, 1.0, 0.05, 1),
      NumericsError);
}
