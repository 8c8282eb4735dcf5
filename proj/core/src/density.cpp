#include "twolaw/density.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twolaw {

namespace {

MatrixXcd offdiag_part(const MatrixXcd& rho) {
  MatrixXcd d = rho;
  for (int i = 0; i < rho.rows(); ++i) d(i, i) = 0.0;
  return d;
}

double spectral_spread(const SplitHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.total(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

// Criterion evaluation on a raw (already Hermitian) density matrix.
bool criterion_met_raw(const MatrixXcd& rho, const VectorXd& hdiag,
                       const MatrixXcd& htotal, double t0) {
  VectorXd diag(rho.rows());
  for (int i = 0; i < rho.rows(); ++i) diag(i) = std::max(rho(i, i).real(), 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  VectorXd p = es.eigenvalues().cwiseMax(0.0);
  const double ds = weight_entropy(diag) - weight_entropy(p);
  const double de = diag.dot(hdiag) - (rho * htotal).trace().real();
  return ds > de / t0;
}

void require_zero_h1_diag(const SplitHamiltonian& h, const char* who) {
  if (!h.h1_diagonal_is_zero()) {
    std::ostringstream os;
    os << who << ": H1 must have zero diagonal";
    throw InvariantError(os.str());
  }
}

}  // namespace

DensitySeries integrate_eqofmo(const MixedState& rho0,
                               const SplitHamiltonian& h,
                               const CollapseParams& params, double t_end,
                               double dt, const EqofmoOptions& opts) {
  if (rho0.dim() != h.dim())
    throw DimensionError("integrate_eqofmo: dim mismatch");
  if (!(dt > 0.0) || t_end < 0.0)
    throw InvariantError("integrate_eqofmo: bad time step or horizon");
  const double wmax = spectral_spread(h);
  if (dt * std::max(wmax, params.gamma0) > 0.05 + 1e-12) {
    std::ostringstream os;
    os << "integrate_eqofmo: dt too large, dt*max(w_max,gamma0) = "
       << dt * std::max(wmax, params.gamma0) << " > 0.05";
    throw NumericsError(os.str());
  }
  if (opts.stride < 1) throw InvariantError("integrate_eqofmo: stride >= 1");

  const MatrixXcd ht = h.total();
  const VectorXd hdiag = h.diagonal();
  const Complex mi(0.0, -1.0);

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));

  DensitySeries out;
  out.times.reserve(static_cast<std::size_t>(n_steps / opts.stride) + 2);

  MatrixXcd rho = rho0.rho();

  auto store = [&](double t) {
    if (opts.check_positivity) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -opts.positivity_tol) {
        std::ostringstream os;
        os << "integrate_eqofmo: positivity breach at t = " << t
           << ", min eigenvalue = " << es.eigenvalues().minCoeff();
        throw NumericsError(os.str());
      }
    }
    out.times.push_back(t);
    out.rhos.push_back(rho);
  };

  store(0.0);

  MatrixXcd k1, k2, k3, k4, tmp;
  for (int step = 1; step <= n_steps; ++step) {
    const double t_target = std::min(static_cast<double>(step) * dt, t_end);
    const double hstep = t_target - std::min(static_cast<double>(step - 1) * dt, t_end);

    double g = params.gamma0;
    if (opts.gated && g > 0.0 &&
        !criterion_met_raw(rho, hdiag, ht, params.t0))
      g = 0.0;

    auto rhs = [&](const MatrixXcd& r) -> MatrixXcd {
      return mi * (ht * r - r * ht) - g * offdiag_part(r);
    };

    k1 = rhs(rho);
    tmp = rho + (hstep / 2.0) * k1;
    k2 = rhs(tmp);
    tmp = rho + (hstep / 2.0) * k2;
    k3 = rhs(tmp);
    tmp = rho + hstep * k3;
    k4 = rhs(tmp);
    rho += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = ((rho + rho.adjoint()) / 2.0).eval();

    if (step % opts.stride == 0 || step == n_steps) store(t_target);
  }

  const double tr = out.rhos.back().trace().real();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream os;
    os << "integrate_eqofmo: trace drift, Tr rho = " << tr;
    throw NumericsError(os.str());
  }
  return out;
}

TwoLevelSeries two_level_observables(const DensitySeries& series) {
  if (series.dim() != 2)
    throw DimensionError("two_level_observables: series is not two-level");
  TwoLevelSeries out;
  out.times = series.times;
  const int n = static_cast<int>(series.rhos.size());
  out.w.resize(n);
  out.delta_minus.resize(n);
  out.delta_plus.resize(n);
  for (int i = 0; i < n; ++i) {
    const MatrixXcd& r = series.rhos[static_cast<std::size_t>(i)];
    out.w(i) = (r(0, 0) - r(1, 1)).real();
    out.delta_minus(i) = r(0, 1) - r(1, 0);
    out.delta_plus(i) = r(0, 1) + r(1, 0);
  }
  return out;
}

double damped_oscillator_residual(const TwoLevelSeries& series, double gamma0,
                                  double omega) {
  const int n = static_cast<int>(series.times.size());
  if (n < 3) throw InvariantError("residual: need at least 3 samples");
  const double dt = series.times[1] - series.times[0];
  const double scale = omega * omega * series.w.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const double wm = series.w(i - 1), w0 = series.w(i), wp = series.w(i + 1);
    const double wdd = (wp - 2.0 * w0 + wm) / (dt * dt);
    const double wd = (wp - wm) / (2.0 * dt);
    worst = std::max(worst, std::abs(wdd + gamma0 * wd + omega * omega * w0));
  }
  return worst / scale;
}

double damped_oscillator_closed_form(double t, double w0, double gamma0,
                                     double omega) {
  const double om2 = omega * omega - gamma0 * gamma0 / 4.0;
  if (!(om2 > 0.0))
    throw InvariantError("closed form valid for the underdamped case only");
  const double om = std::sqrt(om2);
  return w0 * std::exp(-gamma0 * t / 2.0) *
         (std::cos(om * t) + gamma0 / (2.0 * om) * std::sin(om * t));
}

VectorXd delrho_iterate(const MixedState& rho0, const SplitHamiltonian& h,
                        const CollapseParams& params, double dt_window) {
  require_zero_h1_diag(h, "delrho_iterate");
  if (rho0.dim() != h.dim())
    throw DimensionError("delrho_iterate: dim mismatch");
  if (offdiag_part(rho0.rho()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvariantError("delrho_iterate: rho0 must be diagonal");
  if (!(dt_window >= 0.0))
    throw InvariantError("delrho_iterate: negative window");

  const int dim = h.dim();
  const double g = params.gamma0;
  VectorXd out = VectorXd::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      if (k == j) continue;
      const double coupling2 = std::norm(h.h1()(j, k));
      if (coupling2 == 0.0) continue;
      const double w = h.e0()(j) - h.e0()(k);
      const double denom = w * w + g * g;
      const double dp = rho0.rho()(k, k).real() - rho0.rho()(j, j).real();
      double bracket_over_denom;
      if (denom == 0.0) {
        // gamma0 = 0 and degenerate levels: the kernel limit Dt^2 / 2.
        bracket_over_denom = dt_window * dt_window / 2.0;
      } else {
        const double damp = std::exp(-g * dt_window);
        const double one_minus_cos =
            2.0 * std::pow(std::sin(w * dt_window / 2.0), 2);
        const double bracket =
            g * dt_window +
            (w * w - g * g) / denom *
                (1.0 - damp * std::cos(w * dt_window)) -
            2.0 * g * w / denom * damp * std::sin(w * dt_window);
        // For gamma0 = 0 the cancellation-prone term is (1 - cos).
        bracket_over_denom =
            g == 0.0 ? one_minus_cos / denom : bracket / denom;
      }
      out(j) += 2.0 * coupling2 * bracket_over_denom * dp;
    }
  }
  return out;
}

double lorentzian_delta(double omega, double gamma0) {
  if (!(gamma0 > 0.0))
    throw InvariantError("lorentzian_delta: gamma0 must be > 0");
  return gamma0 / (std::numbers::pi * (omega * omega + gamma0 * gamma0));
}

double vanhove_kernel(double omega, double t) {
  if (!(t > 0.0)) throw InvariantError("vanhove_kernel: t must be > 0");
  const double x = omega * t / 2.0;
  if (std::abs(x) < 1e-8) return t / 2.0 * (1.0 - x * x / 3.0);
  const double s = std::sin(x) / x;
  return t / 2.0 * s * s;
}

RateMatrix::RateMatrix(Eigen::MatrixXd rates) : w(std::move(rates)) {
  if (w.rows() != w.cols() || w.rows() < 1)
    throw DimensionError("RateMatrix: non-square");
  for (int i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) throw InvariantError("RateMatrix: nonzero diagonal");
    for (int j = 0; j < w.cols(); ++j)
      if (w(i, j) < 0.0) throw InvariantError("RateMatrix: negative rate");
  }
}

RateMatrix build_rates(const SplitHamiltonian& h, const CollapseParams& params) {
  require_zero_h1_diag(h, "build_rates");
  if (!(params.gamma0 > 0.0))
    throw InvariantError("build_rates: gamma0 must be > 0");
  const int dim = h.dim();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      if (j == k) continue;
      const double wjk = h.e0()(j) - h.e0()(k);
      w(j, k) = 2.0 * std::numbers::pi * std::norm(h.h1()(j, k)) *
                lorentzian_delta(wjk, params.gamma0);
    }
  }
  return RateMatrix(std::move(w));
}

MasterSeries integrate_master(const VectorXd& p0, const RateMatrix& rates,
                              double t_end, double dt, int stride) {
  if (p0.size() != rates.dim())
    throw DimensionError("integrate_master: dim mismatch");
  if (p0.minCoeff() < -1e-12 || std::abs(p0.sum() - 1.0) > 1e-10)
    throw InvariantError("integrate_master: p0 is not a probability vector");
  if (stride < 1) throw InvariantError("integrate_master: stride >= 1");

  const Eigen::VectorXd out_rates = rates.w.colwise().sum();
  if (dt <= 0.0) {
    const double rmax = std::max(out_rates.maxCoeff(), 1e-300);
    dt = 0.02 / rmax;
    dt = std::min(dt, t_end > 0.0 ? t_end / 10.0 : dt);
  }

  auto rhs = [&](const VectorXd& p) -> VectorXd {
    return rates.w * p - out_rates.cwiseProduct(p);
  };

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
  MasterSeries out;
  VectorXd p = p0;
  out.times.push_back(0.0);
  out.populations.push_back(p);
  for (int step = 1; step <= n_steps; ++step) {
    const double t_target = std::min(static_cast<double>(step) * dt, t_end);
    const double h =
        t_target - std::min(static_cast<double>(step - 1) * dt, t_end);
    const VectorXd k1 = rhs(p);
    const VectorXd k2 = rhs(p + (h / 2.0) * k1);
    const VectorXd k3 = rhs(p + (h / 2.0) * k2);
    const VectorXd k4 = rhs(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (step % stride == 0 || step == n_steps) {
      out.times.push_back(t_target);
      out.populations.push_back(p);
    }
  }
  if (std::abs(out.populations.back().sum() - 1.0) > 1e-10)
    throw NumericsError("integrate_master: probability drift");
  return out;
}

double purity(const MatrixXcd& rho) { return (rho * rho).trace().real(); }

}  // namespace twolaw
