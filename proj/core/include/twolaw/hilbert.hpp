#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "twolaw/errors.hpp"

namespace twolaw {

using Complex = std::complex<double>;
using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;

/// Weights below this threshold are treated as exactly zero when forming
/// entropies (the 0 ln 0 = 0 convention).
inline constexpr double kWeightFloor = 1e-15;

/// Tolerances used by the value-type invariants.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

/// The distinguished "classical" basis onto which collapse projects.
struct PreferredBasis {
  int dim = 0;
  std::vector<std::string> labels;

  PreferredBasis() = default;
  explicit PreferredBasis(int dimension);
  PreferredBasis(int dimension, std::vector<std::string> basis_labels);

  void validate() const;
};

/// H = H0 + H1 with H0 diagonal in the preferred basis (entries e0) and H1 a
/// Hermitian perturbation that carries the correlations lost in a collapse.
class SplitHamiltonian {
 public:
  SplitHamiltonian(PreferredBasis basis, VectorXd e0, MatrixXcd h1);

  int dim() const { return basis_.dim; }
  const PreferredBasis& basis() const { return basis_; }
  const VectorXd& e0() const { return e0_; }
  const MatrixXcd& h1() const { return h1_; }

  /// Full Hamiltonian diag(e0) + H1.
  MatrixXcd total() const;

  /// Diagonal of the full Hamiltonian in the preferred basis.
  VectorXd diagonal() const;

  bool h1_diagonal_is_zero(double tol = 1e-14) const;

 private:
  PreferredBasis basis_;
  VectorXd e0_;
  MatrixXcd h1_;
};

/// Normalized state vector, stored in preferred-basis coordinates.
class PureState {
 public:
  explicit PureState(VectorXcd amplitudes);

  /// Basis vector |n>.
  static PureState basis_state(int dim, int n);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const VectorXcd& amplitudes() const { return amplitudes_; }

 private:
  VectorXcd amplitudes_;
};

/// Density matrix, stored in preferred-basis coordinates.
class MixedState {
 public:
  explicit MixedState(MatrixXcd rho);

  static MixedState from_pure(const PureState& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const MatrixXcd& rho() const { return rho_; }

 private:
  MatrixXcd rho_;
};

/// The two universal constants: energy scale t0 (T0) and collapse rate gamma0.
/// gamma0 == 0 reproduces plain unitary quantum mechanics.
struct CollapseParams {
  double t0 = 1.0;
  double gamma0 = 0.0;

  CollapseParams() = default;
  CollapseParams(double t0_in, double gamma0_in);

  double tau0() const {
    return gamma0 > 0.0 ? 1.0 / gamma0
                        : std::numeric_limits<double>::infinity();
  }
};

/// Born weights w_n = |c_n|^2. Errors out on non-normalized input.
VectorXd born_weights(const PureState& psi);

/// Shannon entropy of a weight vector with the 0 ln 0 = 0 convention
/// (weights below kWeightFloor are dropped). Natural log.
double weight_entropy(const VectorXd& weights);

/// Entropy change of a collapse from the given state onto the preferred
/// basis: S_f - S_i. Pure states have S_i = 0; for mixed states S_i is the
/// von Neumann entropy and S_f the entropy of the preferred-basis diagonal.
double reduction_entropy(const PureState& psi);
double reduction_entropy(const MixedState& rho);

/// Von Neumann entropy -Tr(rho ln rho) via eigendecomposition.
double von_neumann_entropy(const MixedState& rho);

/// Mean energy change of a collapse: sum_n w_n H_nn - <H>.
/// Equals -<psi|H1|psi> whenever diag(H1) = 0.
double reduction_energy(const PureState& psi, const SplitHamiltonian& h);
double reduction_energy(const MixedState& rho, const SplitHamiltonian& h);

/// Full projective dephasing rho -> sum_n P_n rho P_n (keeps the diagonal).
MixedState dephase(const MixedState& rho);

/// Cached exact propagator exp(-iHt) built from one dense eigendecomposition
/// of the full Hamiltonian (hbar = 1). Read-only after construction, safe to
/// share across threads.
class UnitaryPropagator {
 public:
  explicit UnitaryPropagator(const SplitHamiltonian& h);

  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  const VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Columns are energy eigenstates expressed in the preferred basis.
  const MatrixXcd& eigenvectors() const { return eigenvectors_; }

  /// Phase factors exp(-i E_k dt) for one step of length dt.
  VectorXcd step_phases(double dt) const;

  PureState evolve(const PureState& psi, double dt) const;
  MixedState evolve(const MixedState& rho, double dt) const;

  /// Preferred-basis -> eigenbasis coordinates and back.
  VectorXcd to_eigenbasis(const VectorXcd& psi_pref) const;
  VectorXcd to_preferred(const VectorXcd& psi_eig) const;

 private:
  VectorXd eigenvalues_;
  MatrixXcd eigenvectors_;   // V, H = V diag(E) V^dagger
  MatrixXcd adjoint_;        // V^dagger
};

/// One-shot convenience wrapper; builds the propagator on the fly.
PureState propagate_unitary(const PureState& psi, const SplitHamiltonian& h,
                            double dt);
MixedState propagate_unitary(const MixedState& rho, const SplitHamiltonian& h,
                             double dt);

/// max |A - A^dagger| relative to max |A| (0 for the zero matrix).
double hermiticity_defect(const MatrixXcd& a);

}  // namespace twolaw
