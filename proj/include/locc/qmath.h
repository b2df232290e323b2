#pragma once

// Dense complex linear algebra and density-matrix primitives for small
// registers (up to ~12 qubits).
//
// Qubit ordering: qubit 0 is the leftmost label in a ket and the most
// significant bit of a basis index, so |01> is index 1 in dimension 4.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <stdexcept>
#include <vector>

namespace locc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Raised when a matrix fails a physicality check (Hermiticity, trace, PSD).
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kNegativeEigenvalue = 1e-9;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kNorm = 1e-12;
}  // namespace tol

/// Max-entry comparison with an explicit absolute tolerance.
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double abs_tol);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double abs_tol = tol::kHermitian);
bool is_unitary(const ComplexMatrix& u, double abs_tol = tol::kUnitary);

/// Number of qubits n with 2^n == dim; throws if dim is not a power of two.
int qubits_for_dimension(Eigen::Index dim);

class PureState {
 public:
  /// Normalized amplitudes over 2^n basis states; throws if the norm is off by
  /// more than `norm_tol`.
  explicit PureState(ComplexVector amplitudes, double norm_tol = tol::kNorm);

  /// Computational basis state from a bit string such as "010".
  static PureState basis(std::string_view bits);

  int num_qubits() const { return num_qubits_; }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  ComplexMatrix projector() const;

 private:
  int num_qubits_;
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix over an ordered
/// qubit register.
class DensityState {
 public:
  struct Tolerances {
    double hermitian = tol::kHermitian;
    double trace = tol::kTrace;
    double negative_eigenvalue = tol::kNegativeEigenvalue;
  };

  /// Validates all three invariants.
  explicit DensityState(ComplexMatrix matrix) : DensityState(std::move(matrix), Tolerances{}) {}
  DensityState(ComplexMatrix matrix, const Tolerances& tolerances);

  DensityState(const PureState& psi);  // NOLINT(google-explicit-constructor)

  /// Skips the eigenvalue check; used by transformations that preserve
  /// positivity by construction. Dimension, Hermiticity and trace are still
  /// checked.
  static DensityState trusted(ComplexMatrix matrix);

  static DensityState maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return matrix_(r, c); }

  double trace() const { return matrix_.trace().real(); }
  Eigen::VectorXd eigenvalues() const;

 private:
  struct TrustedTag {};
  DensityState(ComplexMatrix matrix, TrustedTag);

  int num_qubits_;
  ComplexMatrix matrix_;
};

/// Kronecker product; `a`'s qubits come first.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
DensityState tensor(const DensityState& a, const DensityState& b);

/// Traces out every qubit not listed in `keep`. Kept qubits retain their
/// relative register order regardless of the order in `keep`.
DensityState partial_trace(const DensityState& rho, std::span<const int> keep);

/// Relabels qubits: new qubit i is old qubit perm[i].
DensityState permute_qubits(const DensityState& rho, std::span<const int> perm);

/// 2^n x 2^n operator acting as `u` on `targets` (targets[0] is u's most
/// significant qubit) and as identity elsewhere. `u` must be unitary.
ComplexMatrix embed_operator(const ComplexMatrix& u, std::span<const int> targets, int n,
                             double unitary_tol = tol::kUnitary);

/// In-place (op on targets) * m, without forming the full embedding.
/// `op` need not be unitary.
void apply_left(ComplexMatrix& m, const ComplexMatrix& op, std::span<const int> targets);
/// In-place m * (op on targets)^dagger.
void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, std::span<const int> targets);
/// op rho op^dagger restricted to `targets`.
ComplexMatrix conjugate(const ComplexMatrix& rho, const ComplexMatrix& op, std::span<const int> targets);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-negative_tol, 0) are clamped to zero; anything more negative throws.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, double hermitian_tol = tol::kHermitian,
                             double negative_tol = tol::kNegativeEigenvalue);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const DensityState& rho, const DensityState& sigma);
/// <psi|sigma|psi>; the pure-state special case.
double state_fidelity(const PureState& psi, const DensityState& sigma);

/// Hermitian G with dF = Re Tr(G dSigma) for F = state_fidelity(rho, sigma),
/// valid wherever F is differentiable (sigma full rank on the support of rho).
ComplexMatrix fidelity_gradient(const DensityState& rho, const DensityState& sigma);

}  // namespace locc
