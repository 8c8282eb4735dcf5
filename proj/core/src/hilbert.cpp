#include "twolaw/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>
#include <sstream>

namespace twolaw {

namespace {

void check_finite_dt(double dt) {
  if (!std::isfinite(dt)) throw InvariantError("propagate: non-finite dt");
}

constexpr int kMaxDenseDim = 4096;

}  // namespace

PreferredBasis::PreferredBasis(int dimension) : dim(dimension) {
  labels.reserve(static_cast<std::size_t>(dimension));
  for (int i = 0; i < dimension; ++i) labels.push_back(std::to_string(i));
  validate();
}

PreferredBasis::PreferredBasis(int dimension, std::vector<std::string> basis_labels)
    : dim(dimension), labels(std::move(basis_labels)) {
  validate();
}

void PreferredBasis::validate() const {
  if (dim < 1) throw InvariantError("PreferredBasis: dim must be >= 1");
  if (static_cast<int>(labels.size()) != dim)
    throw InvariantError("PreferredBasis: label count != dim");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (static_cast<int>(seen.size()) != dim)
    throw InvariantError("PreferredBasis: labels must be distinct");
}

double hermiticity_defect(const MatrixXcd& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

SplitHamiltonian::SplitHamiltonian(PreferredBasis basis, VectorXd e0,
                                   MatrixXcd h1)
    : basis_(std::move(basis)), e0_(std::move(e0)), h1_(std::move(h1)) {
  basis_.validate();
  if (e0_.size() != basis_.dim)
    throw DimensionError("SplitHamiltonian: e0 length != dim");
  if (h1_.rows() != basis_.dim || h1_.cols() != basis_.dim)
    throw DimensionError("SplitHamiltonian: H1 shape != dim x dim");
  if (hermiticity_defect(h1_) > kHermTol) {
    std::ostringstream os;
    os << "SplitHamiltonian: H1 not Hermitian, max asymmetry "
       << (h1_ - h1_.adjoint()).cwiseAbs().maxCoeff();
    throw InvariantError(os.str());
  }
  // Exact symmetrization so downstream eigen-solves see a Hermitian matrix.
  h1_ = ((h1_ + h1_.adjoint()) / 2.0).eval();
}

MatrixXcd SplitHamiltonian::total() const {
  MatrixXcd h = h1_;
  for (int i = 0; i < dim(); ++i) h(i, i) += e0_(i);
  return h;
}

VectorXd SplitHamiltonian::diagonal() const {
  VectorXd d(dim());
  for (int i = 0; i < dim(); ++i) d(i) = e0_(i) + h1_(i, i).real();
  return d;
}

bool SplitHamiltonian::h1_diagonal_is_zero(double tol) const {
  const double scale = std::max(1.0, h1_.cwiseAbs().maxCoeff());
  for (int i = 0; i < dim(); ++i)
    if (std::abs(h1_(i, i)) > tol * scale) return false;
  return true;
}

PureState::PureState(VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) throw InvariantError("PureState: empty vector");
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "PureState: not normalized, |psi|^2 = " << norm2;
    throw InvariantError(os.str());
  }
}

PureState PureState::basis_state(int dim, int n) {
  if (n < 0 || n >= dim) throw DimensionError("basis_state: index out of range");
  VectorXcd c = VectorXcd::Zero(dim);
  c(n) = 1.0;
  return PureState(std::move(c));
}

MixedState::MixedState(MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
    throw DimensionError("MixedState: non-square density matrix");
  if (hermiticity_defect(rho_) > kHermTol)
    throw InvariantError("MixedState: density matrix not Hermitian");
  rho_ = ((rho_ + rho_.adjoint()) / 2.0).eval();
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > kNormTol) {
    std::ostringstream os;
    os << "MixedState: trace = " << tr;
    throw InvariantError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kNormTol)
    throw InvariantError("MixedState: negative eigenvalue beyond tolerance");
}

MixedState MixedState::from_pure(const PureState& psi) {
  const VectorXcd& c = psi.amplitudes();
  return MixedState(c * c.adjoint());
}

CollapseParams::CollapseParams(double t0_in, double gamma0_in)
    : t0(t0_in), gamma0(gamma0_in) {
  if (!(t0 > 0.0)) throw InvariantError("CollapseParams: t0 must be > 0");
  if (gamma0 < 0.0) throw InvariantError("CollapseParams: gamma0 must be >= 0");
}

VectorXd born_weights(const PureState& psi) {
  return psi.amplitudes().cwiseAbs2();
}

double weight_entropy(const VectorXd& weights) {
  double s = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (w > kWeightFloor) s -= w * std::log(w);
  }
  return s;
}

double reduction_entropy(const PureState& psi) {
  return weight_entropy(born_weights(psi));
}

double von_neumann_entropy(const MixedState& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.rho(), Eigen::EigenvaluesOnly);
  VectorXd p = es.eigenvalues();
  for (int i = 0; i < p.size(); ++i) p(i) = std::max(p(i), 0.0);
  return weight_entropy(p);
}

double reduction_entropy(const MixedState& rho) {
  VectorXd diag(rho.dim());
  for (int i = 0; i < rho.dim(); ++i)
    diag(i) = std::max(rho.rho()(i, i).real(), 0.0);
  return weight_entropy(diag) - von_neumann_entropy(rho);
}

double reduction_energy(const PureState& psi, const SplitHamiltonian& h) {
  if (psi.dim() != h.dim())
    throw DimensionError("reduction_energy: state/Hamiltonian dim mismatch");
  const VectorXd w = born_weights(psi);
  const VectorXd hdiag = h.diagonal();
  const MatrixXcd ht = h.total();
  const double mean = psi.amplitudes().dot(ht * psi.amplitudes()).real();
  return w.dot(hdiag) - mean;
}

double reduction_energy(const MixedState& rho, const SplitHamiltonian& h) {
  if (rho.dim() != h.dim())
    throw DimensionError("reduction_energy: state/Hamiltonian dim mismatch");
  const VectorXd hdiag = h.diagonal();
  double diag_part = 0.0;
  for (int i = 0; i < rho.dim(); ++i)
    diag_part += rho.rho()(i, i).real() * hdiag(i);
  const double mean = (rho.rho() * h.total()).trace().real();
  return diag_part - mean;
}

MixedState dephase(const MixedState& rho) {
  MatrixXcd d = MatrixXcd::Zero(rho.dim(), rho.dim());
  for (int i = 0; i < rho.dim(); ++i) d(i, i) = rho.rho()(i, i).real();
  return MixedState(std::move(d));
}

UnitaryPropagator::UnitaryPropagator(const SplitHamiltonian& h) {
  if (h.dim() > kMaxDenseDim)
    throw DimensionError("UnitaryPropagator: dimension too large for dense solve");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.total());
  if (es.info() != Eigen::Success)
    throw NumericsError("UnitaryPropagator: eigendecomposition failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  adjoint_ = eigenvectors_.adjoint();
}

VectorXcd UnitaryPropagator::step_phases(double dt) const {
  check_finite_dt(dt);
  VectorXcd phases(eigenvalues_.size());
  for (int i = 0; i < eigenvalues_.size(); ++i)
    phases(i) = std::polar(1.0, -eigenvalues_(i) * dt);
  return phases;
}

PureState UnitaryPropagator::evolve(const PureState& psi, double dt) const {
  if (psi.dim() != dim())
    throw DimensionError("propagate: state dim mismatch");
  VectorXcd eig = adjoint_ * psi.amplitudes();
  eig.array() *= step_phases(dt).array();
  return PureState(eigenvectors_ * eig);
}

MixedState UnitaryPropagator::evolve(const MixedState& rho, double dt) const {
  if (rho.dim() != dim())
    throw DimensionError("propagate: state dim mismatch");
  const VectorXcd ph = step_phases(dt);
  const MatrixXcd u = eigenvectors_ * ph.asDiagonal() * adjoint_;
  return MixedState(u * rho.rho() * u.adjoint());
}

VectorXcd UnitaryPropagator::to_eigenbasis(const VectorXcd& psi_pref) const {
  return adjoint_ * psi_pref;
}

VectorXcd UnitaryPropagator::to_preferred(const VectorXcd& psi_eig) const {
  return eigenvectors_ * psi_eig;
}

PureState propagate_unitary(const PureState& psi, const SplitHamiltonian& h,
                            double dt) {
  return UnitaryPropagator(h).evolve(psi, dt);
}

MixedState propagate_unitary(const MixedState& rho, const SplitHamiltonian& h,
                             double dt) {
  return UnitaryPropagator(h).evolve(rho, dt);
}

}  // namespace twolaw
