#include "twolaw/wavepacket.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "twolaw/collapse.hpp"
#include "twolaw/rng.hpp"

namespace twolaw {

namespace {

// Cell partition: consecutive blocks of cell_points, last block may be short.
struct CellIter {
  int n, m;
  int count() const { return (n + m - 1) / m; }
  int begin(int c) const { return c * m; }
  int end(int c) const { return std::min(n, (c + 1) * m); }
};

VectorXd cell_weights(const CellIter& cells, const VectorXcd& psi) {
  VectorXd w(cells.count());
  for (int c = 0; c < cells.count(); ++c) {
    double acc = 0.0;
    for (int i = cells.begin(c); i < cells.end(c); ++i) acc += std::norm(psi(i));
    w(c) = acc;
  }
  return w;
}

// Spectral kinetic energy of the (unnormalized) restriction of psi to one
// cell; scratch must have grid size.
double slice_kinetic_unnormalized(const WavepacketModel& model, const Fft& fft,
                                  const VectorXcd& psi, const CellIter& cells,
                                  int c, VectorXcd& scratch) {
  scratch.setZero();
  for (int i = cells.begin(c); i < cells.end(c); ++i) scratch(i) = psi(i);
  fft.forward(scratch);
  const double inv_n = 1.0 / model.grid_n;
  double e = 0.0;
  for (int j = 0; j < model.grid_n; ++j) {
    const double k = Fft::frequency(j, model.grid_n, model.length());
    e += k * k / (2.0 * model.mass) * std::norm(scratch(j)) * inv_n;
  }
  return e;
}

struct CriterionEval {
  double ds;
  double de;
  VectorXd weights;
};

CriterionEval evaluate_cells(const WavepacketModel& model, const Fft& fft,
                             const VectorXcd& psi, const CellIter& cells,
                             double kinetic_mean, VectorXcd& scratch) {
  CriterionEval ev{0.0, 0.0, cell_weights(cells, psi)};
  ev.ds = weight_entropy(ev.weights);
  double diag = 0.0;
  for (int c = 0; c < cells.count(); ++c) {
    if (ev.weights(c) <= kWeightFloor) continue;
    diag += slice_kinetic_unnormalized(model, fft, psi, cells, c, scratch);
  }
  ev.de = diag - kinetic_mean;
  return ev;
}

}  // namespace

WavepacketModel::WavepacketModel(double m, int n, double dx, double cell)
    : mass(m), grid_n(n), grid_dx(dx), cell_width(cell) {
  if (!(mass > 0.0)) throw InvariantError("WavepacketModel: mass must be > 0");
  if (grid_n < 8 || (grid_n & (grid_n - 1)) != 0)
    throw InvariantError("WavepacketModel: grid_n must be a power of two >= 8");
  if (!(grid_dx > 0.0)) throw InvariantError("WavepacketModel: grid_dx must be > 0");
  if (cell_width < grid_dx - 1e-12)
    throw InvariantError("WavepacketModel: cell_width must be >= grid_dx");
  const double ratio = cell_width / grid_dx;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "WavepacketModel: cell width " << cell_width
       << " not commensurate with grid spacing " << grid_dx;
    throw InvariantError(os.str());
  }
}

int WavepacketModel::cell_points() const {
  return static_cast<int>(std::round(cell_width / grid_dx));
}

int WavepacketModel::n_cells() const {
  return (grid_n + cell_points() - 1) / cell_points();
}

GridState gaussian_packet(const WavepacketModel& model, double sigma,
                          double center, double momentum) {
  if (!(sigma > 0.0)) throw InvariantError("gaussian_packet: sigma must be > 0");
  VectorXcd c(model.grid_n);
  for (int i = 0; i < model.grid_n; ++i) {
    const double x = model.x_at(i);
    const double arg = (x - center) / (2.0 * sigma);
    c(i) = std::polar(std::exp(-arg * arg), momentum * x);
  }
  const double norm = c.norm();
  if (!(norm > 0.0)) throw NumericsError("gaussian_packet: vanishing norm");
  c /= norm;
  return GridState{std::move(c)};
}

double grid_kinetic_energy(const WavepacketModel& model, const Fft& fft,
                           const GridState& state) {
  VectorXcd k_amp = state.amplitudes;
  fft.forward(k_amp);
  const double inv_n = 1.0 / model.grid_n;
  double e = 0.0;
  for (int j = 0; j < model.grid_n; ++j) {
    const double k = Fft::frequency(j, model.grid_n, model.length());
    e += k * k / (2.0 * model.mass) * std::norm(k_amp(j)) * inv_n;
  }
  return e;
}

GridMoments grid_moments(const WavepacketModel& model, const GridState& state) {
  const int n = model.grid_n;
  const double L = model.length();
  Complex z(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * model.x_at(i) / L;
    z += std::norm(state.amplitudes(i)) * std::polar(1.0, theta);
  }
  GridMoments mom;
  mom.center = std::arg(z) * L / (2.0 * std::numbers::pi);
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = model.x_at(i) - mom.center;
    d -= L * std::round(d / L);  // minimum image
    var += std::norm(state.amplitudes(i)) * d * d;
  }
  mom.width = std::sqrt(std::max(0.0, var));
  return mom;
}

VectorXd cell_born_weights(const WavepacketModel& model,
                           const GridState& state) {
  if (static_cast<int>(state.amplitudes.size()) != model.grid_n)
    throw DimensionError("cell_born_weights: grid size mismatch");
  const CellIter cells{model.grid_n, model.cell_points()};
  return cell_weights(cells, state.amplitudes);
}

GridState collapse_to_cell(const WavepacketModel& model, const GridState& state,
                           int cell) {
  const CellIter cells{model.grid_n, model.cell_points()};
  if (cell < 0 || cell >= cells.count())
    throw DimensionError("collapse_to_cell: cell index out of range");
  double w = 0.0;
  for (int i = cells.begin(cell); i < cells.end(cell); ++i)
    w += std::norm(state.amplitudes(i));
  if (!(w > 0.0))
    throw NumericsError("collapse_to_cell: empty cell");
  VectorXcd out = VectorXcd::Zero(model.grid_n);
  const double inv = 1.0 / std::sqrt(w);
  for (int i = cells.begin(cell); i < cells.end(cell); ++i)
    out(i) = state.amplitudes(i) * inv;
  return GridState{std::move(out)};
}

LocalizationReport localization_criterion(const WavepacketModel& model,
                                          const GridState& state,
                                          const CollapseParams& params) {
  if (static_cast<int>(state.amplitudes.size()) != model.grid_n)
    throw DimensionError("localization_criterion: grid size mismatch");
  const Fft fft(model.grid_n);
  VectorXcd scratch(model.grid_n);
  const double kin = grid_kinetic_energy(model, fft, state);

  const CellIter cells{model.grid_n, model.cell_points()};
  const CriterionEval ev =
      evaluate_cells(model, fft, state.amplitudes, cells, kin, scratch);

  LocalizationReport rep;
  rep.delta_s = ev.ds;
  rep.delta_e = ev.de;
  rep.met = ev.ds > ev.de / params.t0;

  // Smallest commensurate cell width satisfying the criterion.
  auto met_at = [&](int m_pts) {
    const CellIter ci{model.grid_n, m_pts};
    const CriterionEval e =
        evaluate_cells(model, fft, state.amplitudes, ci, kin, scratch);
    return e.ds > e.de / params.t0;
  };
  int lo = 1, hi = -1;
  for (int m_pts = 1; m_pts <= model.grid_n / 2; m_pts *= 2) {
    if (met_at(m_pts)) {
      hi = m_pts;
      break;
    }
    lo = m_pts;
  }
  if (hi < 0) {
    rep.threshold_cell = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (hi == 1) {
    rep.threshold_cell = model.grid_dx;
    return rep;
  }
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (met_at(mid) ? hi : lo) = mid;
  }
  rep.threshold_cell = hi * model.grid_dx;
  return rep;
}

WavepacketRun run_wavepacket(const WavepacketModel& model,
                             const CollapseParams& params,
                             const GridState& initial, double t_end, double dt,
                             std::uint64_t seed, int n_samples) {
  const int n = model.grid_n;
  if (static_cast<int>(initial.amplitudes.size()) != n)
    throw DimensionError("run_wavepacket: grid size mismatch");
  if (std::abs(initial.amplitudes.squaredNorm() - 1.0) > kNormTol)
    throw InvariantError("run_wavepacket: initial state not normalized");
  if (!(dt > 0.0) || t_end < 0.0)
    throw InvariantError("run_wavepacket: bad dt or t_end");
  if (params.gamma0 * dt > 0.1 + 1e-12)
    throw InvariantError("run_wavepacket: dt * gamma0 must be <= 0.1");

  const Fft fft(n);

  // Aliasing guard on the initial packet (top 10% of the band).
  {
    VectorXcd k_amp = initial.amplitudes;
    fft.forward(k_amp);
    const double k_max = std::numbers::pi / model.grid_dx;
    double edge = 0.0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(Fft::frequency(j, n, model.length())) >= 0.9 * k_max)
        edge += std::norm(k_amp(j)) / n;
    }
    if (edge > 1e-6) {
      std::ostringstream os;
      os << "run_wavepacket: initial momentum support reaches the Nyquist edge"
         << " (weight " << edge << ")";
      throw NumericsError(os.str());
    }
  }

  // Free-particle phases for one step, in FFT bin order.
  VectorXcd phases(n);
  for (int j = 0; j < n; ++j) {
    const double k = Fft::frequency(j, n, model.length());
    phases(j) = std::polar(1.0, -k * k / (2.0 * model.mass) * dt);
  }

  const CellIter cells{n, model.cell_points()};
  const double fire_prob = 1.0 - std::exp(-params.gamma0 * dt);
  CounterRng rng(seed, 0);

  const int n_steps = detail::step_count(t_end, dt);
  std::vector<int> sample_steps(static_cast<std::size_t>(n_samples) + 1);
  for (int k = 0; k <= n_samples; ++k)
    sample_steps[static_cast<std::size_t>(k)] = static_cast<int>(
        std::llround(static_cast<double>(n_steps) * k / n_samples));

  WavepacketRun run;
  run.times.resize(sample_steps.size());
  run.width.resize(static_cast<int>(sample_steps.size()));
  run.center.resize(static_cast<int>(sample_steps.size()));
  run.kinetic.resize(static_cast<int>(sample_steps.size()));

  VectorXcd psi = initial.amplitudes;
  VectorXcd scratch(n);

  auto record = [&](std::size_t slot, double t) {
    GridState view{psi};
    const GridMoments mom = grid_moments(model, view);
    run.times[slot] = t;
    run.width(static_cast<int>(slot)) = mom.width;
    run.center(static_cast<int>(slot)) = mom.center;
    run.kinetic(static_cast<int>(slot)) = grid_kinetic_energy(model, fft, view);
  };

  std::size_t cursor = 0;
  while (cursor < sample_steps.size() && sample_steps[cursor] == 0)
    record(cursor++, 0.0);

  for (int step = 1; step <= n_steps; ++step) {
    const double t = std::min(static_cast<double>(step) * dt, t_end);
    fft.forward(psi);
    psi.array() *= phases.array();
    fft.inverse(psi);

    if (params.gamma0 > 0.0 && rng.uniform01() < fire_prob) {
      const double kin = grid_kinetic_energy(model, fft, GridState{psi});
      const CriterionEval ev =
          evaluate_cells(model, fft, psi, cells, kin, scratch);
      if (ev.ds > ev.de / params.t0) {
        const int c = rng.pick_discrete(ev.weights);
        WavepacketEvent event{t, c, ev.ds, ev.de};
        run.events.push_back(event);
        const double inv = 1.0 / std::sqrt(ev.weights(c));
        for (int i = 0; i < n; ++i)
          psi(i) = (i >= cells.begin(c) && i < cells.end(c)) ? psi(i) * inv
                                                             : Complex(0.0);
      }
    }
    while (cursor < sample_steps.size() && sample_steps[cursor] == step)
      record(cursor++, t);
  }
  return run;
}

}  // namespace twolaw
