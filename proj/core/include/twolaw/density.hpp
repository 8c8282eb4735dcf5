#pragma once

#include <vector>

#include "twolaw/hilbert.hpp"

namespace twolaw {

/// Time series of density matrices from the effective equation of motion.
struct DensitySeries {
  std::vector<double> times;
  std::vector<MatrixXcd> rhos;

  int dim() const { return rhos.empty() ? 0 : static_cast<int>(rhos.front().rows()); }
};

struct EqofmoOptions {
  int stride = 1;             // store every stride-th step
  bool gated = false;         // drop the dephasing term while the criterion fails
  bool check_positivity = true;
  double positivity_tol = 1e-8;
};

/// 4th-order fixed-step integration of
///   d rho / dt = -i [H, rho] - gamma0 (rho - sum_n P_n rho P_n)
/// with per-step re-symmetrization. Preconditions: dt * max(w_max, gamma0)
/// <= 0.05 where w_max is the spectral spread of H. Trace is preserved to
/// 1e-8 over the run; positivity is monitored at stored samples.
DensitySeries integrate_eqofmo(const MixedState& rho0,
                               const SplitHamiltonian& h,
                               const CollapseParams& params, double t_end,
                               double dt, const EqofmoOptions& opts = {});

/// Two-level observables: w = rho00 - rho11, dm = rho01 - rho10,
/// dp = rho01 + rho10.
struct TwoLevelSeries {
  std::vector<double> times;
  VectorXd w;
  VectorXcd delta_minus;
  VectorXcd delta_plus;
};

TwoLevelSeries two_level_observables(const DensitySeries& series);

/// Max |w'' + gamma0 w' + omega^2 w| over the series (central differences),
/// relative to omega^2 * max|w|. The series must be uniformly spaced.
double damped_oscillator_residual(const TwoLevelSeries& series, double gamma0,
                                  double omega);

/// Closed-form underdamped solution with w(0) = w0, w'(0) = 0:
///   w(t) = w0 exp(-gamma0 t / 2) [cos(Om t) + (gamma0 / 2 Om) sin(Om t)],
///   Om = sqrt(omega^2 - gamma0^2 / 4).
double damped_oscillator_closed_form(double t, double w0, double gamma0,
                                     double omega);

/// Second-order iterate of the equation of motion for the diagonal change
/// over a window Dt, evaluated channel by channel:
///   drho_jj = sum_k 2 |H1_jk|^2 / (w^2 + g^2) *
///             [ g Dt + ((w^2-g^2)/(w^2+g^2)) (1 - e^{-g Dt} cos(w Dt))
///               - (2 g w/(w^2+g^2)) e^{-g Dt} sin(w Dt) ] (rho_kk - rho_jj)
/// with w = w_jk the unperturbed level spacing. Requires diag(H1) = 0 and a
/// diagonal rho0.
VectorXd delrho_iterate(const MixedState& rho0, const SplitHamiltonian& h,
                        const CollapseParams& params, double dt_window);

/// Lorentzian-broadened energy delta gamma0 / (pi (omega^2 + gamma0^2)).
double lorentzian_delta(double omega, double gamma0);

/// (1 - cos(omega t)) / (t omega^2); the removable singularity at omega = 0
/// evaluates to t/2. Tends (after division by pi) to a delta function.
double vanhove_kernel(double omega, double t);

/// Symmetric nonnegative transition-rate matrix, zero diagonal.
struct RateMatrix {
  Eigen::MatrixXd w;

  RateMatrix() = default;
  explicit RateMatrix(Eigen::MatrixXd rates);
  int dim() const { return static_cast<int>(w.rows()); }
};

/// Golden-rule rates W_jk = 2 pi |H1_jk|^2 delta_gamma0(w_jk).
/// Requires diag(H1) = 0 and gamma0 > 0.
RateMatrix build_rates(const SplitHamiltonian& h, const CollapseParams& params);

struct MasterSeries {
  std::vector<double> times;
  std::vector<VectorXd> populations;
};

/// Pauli master equation dp_j/dt = sum_k (W_jk p_k - W_kj p_j), RK4 with a
/// fixed step. dt <= 0 picks a step from the largest total rate.
MasterSeries integrate_master(const VectorXd& p0, const RateMatrix& rates,
                              double t_end, double dt = 0.0, int stride = 1);

/// Tr rho^2.
double purity(const MatrixXcd& rho);

}  // namespace twolaw
