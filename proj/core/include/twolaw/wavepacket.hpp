#pragma once

#include <cstdint>
#include <vector>

#include "twolaw/fft.hpp"
#include "twolaw/hilbert.hpp"

namespace twolaw {

/// Free particle on a periodic grid. The preferred basis is the set of
/// contiguous position cells of width cell_width; collapse keeps the in-cell
/// amplitude profile, renormalized, zero outside. Natural units (hbar = 1).
struct WavepacketModel {
  double mass = 1.0;
  int grid_n = 512;
  double grid_dx = 0.25;
  double cell_width = 1.0;

  WavepacketModel(double m, int n, double dx, double cell);

  double length() const { return grid_n * grid_dx; }
  int cell_points() const;
  int n_cells() const;
  /// Position of grid point i, centered on 0.
  double x_at(int i) const { return (i - grid_n / 2) * grid_dx; }
};

/// l^2-normalized grid amplitudes (sum |c_i|^2 = 1).
struct GridState {
  VectorXcd amplitudes;
};

/// Discretized Gaussian exp(-(x-center)^2/(4 sigma^2) + i k x), normalized.
GridState gaussian_packet(const WavepacketModel& model, double sigma,
                          double center = 0.0, double momentum = 0.0);

/// Kinetic expectation of a grid state via the spectral operator k^2/2m.
double grid_kinetic_energy(const WavepacketModel& model, const Fft& fft,
                           const GridState& state);

/// Circular (minimum-image) position moments on the periodic grid.
struct GridMoments {
  double center = 0.0;
  double width = 0.0;
};
GridMoments grid_moments(const WavepacketModel& model, const GridState& state);

/// Entropy/energy bookkeeping of a cell collapse of `state`, and the smallest
/// commensurate cell width that satisfies the criterion (+inf when none
/// does). delta_e uses the spectral kinetic energy of the renormalized
/// in-cell restrictions.
struct LocalizationReport {
  double delta_s = 0.0;
  double delta_e = 0.0;
  bool met = false;
  double threshold_cell = 0.0;
};

LocalizationReport localization_criterion(const WavepacketModel& model,
                                          const GridState& state,
                                          const CollapseParams& params);

/// Born weights of the position cells.
VectorXd cell_born_weights(const WavepacketModel& model, const GridState& state);

/// Projective localization: the in-cell amplitude profile, renormalized,
/// zero outside the cell.
GridState collapse_to_cell(const WavepacketModel& model, const GridState& state,
                           int cell);

struct WavepacketEvent {
  double time = 0.0;
  int cell = 0;
  double delta_s = 0.0;
  double delta_e = 0.0;
};

struct WavepacketRun {
  std::vector<double> times;
  VectorXd width;
  VectorXd center;
  VectorXd kinetic;
  std::vector<WavepacketEvent> events;
};

/// Spectral evolution of the free packet interleaved with criterion-gated
/// cell collapses, sampled at n_samples+1 uniform times. Throws a grid
/// aliasing diagnostic when the initial packet has significant weight near
/// the Nyquist edge.
WavepacketRun run_wavepacket(const WavepacketModel& model,
                             const CollapseParams& params,
                             const GridState& initial, double t_end, double dt,
                             std::uint64_t seed, int n_samples = 100);

}  // namespace twolaw
