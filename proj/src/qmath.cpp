#include "locc/qmath.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

namespace locc {

namespace {

std::size_t bit_of(int qubit, int n) { return std::size_t{1} << (n - 1 - qubit); }

// Offsets of the 2^k sub-basis states spanned by `targets` (targets[0] is the
// most significant sub-index bit), plus the mask of those bits.
struct LocalLayout {
  std::vector<std::size_t> offsets;
  std::size_t mask = 0;
};

LocalLayout local_layout(std::span<const int> targets, int n) {
  const auto k = targets.size();
  LocalLayout layout;
  layout.offsets.assign(std::size_t{1} << k, 0);
  for (std::size_t s = 0; s < layout.offsets.size(); ++s) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if ((s >> (k - 1 - i)) & 1U) off |= bit_of(targets[i], n);
    }
    layout.offsets[s] = off;
  }
  for (int t : targets) layout.mask |= bit_of(t, n);
  return layout;
}

void check_targets(std::span<const int> targets, int n) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n) {
      throw std::out_of_range("qubit index " + std::to_string(targets[i]) + " outside register of " +
                              std::to_string(n));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("repeated target qubit");
    }
  }
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> eigh(const ComplexMatrix& m) {
  // Symmetrize so tiny anti-Hermitian noise does not leak into the solver.
  const ComplexMatrix h = (m + m.adjoint()) * 0.5;
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h);
}

}  // namespace

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double abs_tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return max_abs_diff(a, b) <= abs_tol;
}

bool is_hermitian(const ComplexMatrix& m, double abs_tol) {
  return m.rows() == m.cols() && approx_equal(m, m.adjoint(), abs_tol);
}

bool is_unitary(const ComplexMatrix& u, double abs_tol) {
  if (u.rows() != u.cols()) return false;
  return approx_equal(u.adjoint() * u, ComplexMatrix::Identity(u.rows(), u.cols()), abs_tol);
}

int qubits_for_dimension(Eigen::Index dim) {
  if (dim < 1 || !std::has_single_bit(static_cast<std::size_t>(dim))) {
    throw std::invalid_argument("dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(static_cast<std::size_t>(dim));
}

// --- PureState -------------------------------------------------------------

PureState::PureState(ComplexVector amplitudes, double norm_tol)
    : num_qubits_(qubits_for_dimension(amplitudes.size())), amplitudes_(std::move(amplitudes)) {
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > norm_tol) {
    throw InvalidStateError("pure state norm^2 " + std::to_string(norm2) + " differs from 1");
  }
}

PureState PureState::basis(std::string_view bits) {
  if (bits.empty()) throw std::invalid_argument("empty basis label");
  std::size_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis label must be a bit string");
    index = (index << 1) | static_cast<std::size_t>(c - '0');
  }
  ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << bits.size());
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

// --- DensityState ----------------------------------------------------------

DensityState::DensityState(ComplexMatrix matrix, TrustedTag)
    : num_qubits_(0), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidStateError("density matrix must be square");
  num_qubits_ = qubits_for_dimension(matrix_.rows());
  if (!is_hermitian(matrix_, tol::kHermitian)) throw InvalidStateError("density matrix is not Hermitian");
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    throw InvalidStateError(os.str());
  }
}

DensityState::DensityState(ComplexMatrix matrix, const Tolerances& tolerances)
    : num_qubits_(0), matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidStateError("density matrix must be square");
  num_qubits_ = qubits_for_dimension(matrix_.rows());
  if (!is_hermitian(matrix_, tolerances.hermitian)) {
    throw InvalidStateError("density matrix is not Hermitian");
  }
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tolerances.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1";
    throw InvalidStateError(os.str());
  }
  const double min_eig = eigh(matrix_).eigenvalues().minCoeff();
  if (min_eig < -tolerances.negative_eigenvalue) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << min_eig;
    throw InvalidStateError(os.str());
  }
}

DensityState::DensityState(const PureState& psi) : DensityState(psi.projector(), TrustedTag{}) {}

DensityState DensityState::trusted(ComplexMatrix matrix) { return DensityState(std::move(matrix), TrustedTag{}); }

DensityState DensityState::maximally_mixed(int num_qubits) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return trusted(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

Eigen::VectorXd DensityState::eigenvalues() const { return eigh(matrix_).eigenvalues(); }

// --- register operations ---------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityState tensor(const DensityState& a, const DensityState& b) {
  return DensityState::trusted(kron(a.matrix(), b.matrix()));
}

DensityState partial_trace(const DensityState& rho, std::span<const int> keep) {
  const int n = rho.num_qubits();
  check_targets(keep, n);
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }
  const auto keep_off = local_layout(kept, n).offsets;
  const auto trace_off = local_layout(traced, n).offsets;
  const auto dk = static_cast<Eigen::Index>(keep_off.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  const ComplexMatrix& m = rho.matrix();
  for (Eigen::Index j = 0; j < dk; ++j) {
    for (Eigen::Index i = 0; i < dk; ++i) {
      Complex acc = 0.0;
      for (std::size_t t : trace_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[i] | t), static_cast<Eigen::Index>(keep_off[j] | t));
      }
      out(i, j) = acc;
    }
  }
  return DensityState::trusted(std::move(out));
}

DensityState permute_qubits(const DensityState& rho, std::span<const int> perm) {
  const int n = rho.num_qubits();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation length differs from register size");
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("not a permutation of the register");
    seen[p] = true;
  }
  const auto d = static_cast<std::size_t>(rho.dim());
  std::vector<Eigen::Index> map(d);
  for (std::size_t x = 0; x < d; ++x) {
    std::size_t y = 0;
    for (int i = 0; i < n; ++i) {
      if (x & bit_of(perm[i], n)) y |= bit_of(i, n);
    }
    map[x] = static_cast<Eigen::Index>(y);
  }
  ComplexMatrix out(rho.dim(), rho.dim());
  const ComplexMatrix& m = rho.matrix();
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) out(map[r], map[c]) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return DensityState::trusted(std::move(out));
}

ComplexMatrix embed_operator(const ComplexMatrix& u, std::span<const int> targets, int n, double unitary_tol) {
  check_targets(targets, n);
  if (u.rows() != (Eigen::Index{1} << targets.size()) || u.cols() != u.rows()) {
    throw std::invalid_argument("operator dimension does not match target count");
  }
  if (!is_unitary(u, unitary_tol)) throw std::invalid_argument("operator is not unitary");
  const Eigen::Index d = Eigen::Index{1} << n;
  ComplexMatrix out = ComplexMatrix::Identity(d, d);
  apply_left(out, u, targets);
  return out;
}

void apply_left(ComplexMatrix& m, const ComplexMatrix& op, std::span<const int> targets) {
  const int n = qubits_for_dimension(m.rows());
  check_targets(targets, n);
  const auto layout = local_layout(targets, n);
  const auto k = static_cast<Eigen::Index>(layout.offsets.size());
  if (op.rows() != k || op.cols() != k) throw std::invalid_argument("operator dimension does not match target count");
  ComplexVector in(k), out(k);
  const auto d = static_cast<std::size_t>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (std::size_t base = 0; base < d; ++base) {
      if (base & layout.mask) continue;
      for (Eigen::Index s = 0; s < k; ++s) in(s) = m(static_cast<Eigen::Index>(base | layout.offsets[s]), c);
      out.noalias() = op * in;
      for (Eigen::Index s = 0; s < k; ++s) m(static_cast<Eigen::Index>(base | layout.offsets[s]), c) = out(s);
    }
  }
}

void apply_right_adjoint(ComplexMatrix& m, const ComplexMatrix& op, std::span<const int> targets) {
  const int n = qubits_for_dimension(m.cols());
  check_targets(targets, n);
  const auto layout = local_layout(targets, n);
  const auto k = static_cast<Eigen::Index>(layout.offsets.size());
  if (op.rows() != k || op.cols() != k) throw std::invalid_argument("operator dimension does not match target count");
  const ComplexMatrix op_conj = op.conjugate();
  ComplexVector in(k), out(k);
  const auto d = static_cast<std::size_t>(m.cols());
  for (std::size_t base = 0; base < d; ++base) {
    if (base & layout.mask) continue;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index s = 0; s < k; ++s) in(s) = m(r, static_cast<Eigen::Index>(base | layout.offsets[s]));
      out.noalias() = op_conj * in;
      for (Eigen::Index s = 0; s < k; ++s) m(r, static_cast<Eigen::Index>(base | layout.offsets[s])) = out(s);
    }
  }
}

ComplexMatrix conjugate(const ComplexMatrix& rho, const ComplexMatrix& op, std::span<const int> targets) {
  ComplexMatrix out = rho;
  apply_left(out, op, targets);
  apply_right_adjoint(out, op, targets);
  return out;
}

// --- spectral functions ----------------------------------------------------

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, double hermitian_tol, double negative_tol) {
  if (!is_hermitian(m, hermitian_tol)) throw std::invalid_argument("hermitian_sqrt: input is not Hermitian");
  const auto es = eigh(m);
  Eigen::VectorXd roots = es.eigenvalues();
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (roots(i) < -negative_tol) {
      throw InvalidStateError("hermitian_sqrt: eigenvalue " + std::to_string(roots(i)) + " is negative");
    }
    roots(i) = std::sqrt(std::max(roots(i), 0.0));
  }
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// Eigenvalues at or below this are numerical zeros of a unit-trace matrix.
constexpr double kZeroEigenvalue = 1e-15;

// Fidelity restricted to the support of the reference state:
// with rho = U D U^dagger (nonzero part), A = U D^{1/2} and M = A^dagger sigma A,
// sqrt(F) = Tr sqrt(M). Working on the support keeps pure references exact.
struct FidelityCore {
  ComplexMatrix lift;  // A
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> middle;
  double root_sum = 0.0;
};

int numerical_rank(const Eigen::VectorXd& eigenvalues) {
  return static_cast<int>((eigenvalues.array() > kZeroEigenvalue).count());
}

FidelityCore fidelity_core(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const auto es = eigh(rho);
  const auto& vals = es.eigenvalues();
  const int rank = numerical_rank(vals);
  FidelityCore core;
  core.lift.resize(rho.rows(), rank);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol::kNegativeEigenvalue) {
      throw InvalidStateError("state_fidelity: non-physical input (eigenvalue " + std::to_string(vals(i)) + ")");
    }
    if (vals(i) > kZeroEigenvalue) core.lift.col(col++) = es.eigenvectors().col(i) * std::sqrt(vals(i));
  }
  core.middle = eigh(core.lift.adjoint() * sigma * core.lift);
  for (Eigen::Index i = 0; i < core.middle.eigenvalues().size(); ++i) {
    const double lambda = core.middle.eigenvalues()(i);
    if (lambda < -tol::kNegativeEigenvalue) {
      throw InvalidStateError("state_fidelity: non-physical input (eigenvalue " + std::to_string(lambda) + ")");
    }
    if (lambda > kZeroEigenvalue) core.root_sum += std::sqrt(lambda);
  }
  return core;
}

}  // namespace

double state_fidelity(const DensityState& rho, const DensityState& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  // Symmetric in its arguments; the lower-rank one as reference is better conditioned.
  const bool swap = numerical_rank(sigma.eigenvalues()) < numerical_rank(rho.eigenvalues());
  const auto core = swap ? fidelity_core(sigma.matrix(), rho.matrix()) : fidelity_core(rho.matrix(), sigma.matrix());
  return core.root_sum * core.root_sum;
}

double state_fidelity(const PureState& psi, const DensityState& sigma) {
  if (psi.amplitudes().size() != sigma.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  return (psi.amplitudes().adjoint() * sigma.matrix() * psi.amplitudes())(0, 0).real();
}

ComplexMatrix fidelity_gradient(const DensityState& rho, const DensityState& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity_gradient: dimension mismatch");
  const auto core = fidelity_core(rho.matrix(), sigma.matrix());
  // dF = 2 sqrt(F) d Tr sqrt(M), d Tr sqrt(M) = 1/2 sum_i lambda_i^{-1/2} <w_i| A^dagger dSigma A |w_i>.
  const auto& vals = core.middle.eigenvalues();
  const auto& vecs = core.middle.eigenvectors();
  ComplexMatrix inv_root = ComplexMatrix::Zero(vals.size(), vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) > kZeroEigenvalue) inv_root += (1.0 / std::sqrt(vals(i))) * vecs.col(i) * vecs.col(i).adjoint();
  }
  return core.root_sum * (core.lift * inv_root * core.lift.adjoint());
}

}  // namespace locc
