#pragma once

// Exact coefficient calculus for Bell-diagonal states on k pairs.
//
// Coefficient order per pair is (Phi+, Psi+, Phi-, Psi-), digits 0..3. A
// k-pair state is a vector of 4^k weights indexed by base-4 strings with
// pair 0 as the most significant digit. Dense states use the register layout
// (A0, B0, A1, B1, ...).

#include "locc/qmath.h"

#include <array>
#include <optional>
#include <vector>

namespace locc {

enum class BellIndex { PhiPlus = 0, PsiPlus = 1, PhiMinus = 2, PsiMinus = 3 };

/// Two-qubit Bell vector (A, B) for the given index.
ComplexVector bell_vector(BellIndex which);

class BellDiagonal {
 public:
  /// Throws unless size is 4^k, entries are >= -1e-15 and sum to 1 within 1e-12.
  explicit BellDiagonal(std::vector<double> coeffs);
  static BellDiagonal single(const std::array<double, 4>& tuple);
  /// Product state of independent pairs.
  static BellDiagonal product(const std::vector<BellDiagonal>& parts);

  int num_pairs() const { return num_pairs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  friend BellDiagonal tensor(const BellDiagonal& a, const BellDiagonal& b);

 private:
  int num_pairs_ = 0;
  std::vector<double> coeffs_;
};

/// Bell-basis coefficient of a two-qubit density matrix (<B_i|rho|B_i>).
std::array<double, 4> bell_coefficients(const DensityState& two_qubit);

/// RX(+pi/2) on Alice's qubit and RX(-pi/2) on Bob's qubit of `pair`:
/// swaps Phi- and Psi-.
BellDiagonal rx_pair_map(const BellDiagonal& s, int pair);

/// Bilateral CNOT from `control_pair` to `target_pair`.
BellDiagonal bilateral_cnot(const BellDiagonal& s, int control_pair, int target_pair);

struct CoincidenceResult {
  BellDiagonal state;  // on the remaining pairs; num_pairs 0 for a scalar
  double success_probability;
};

/// Both parties measure `pair` and keep equal outcomes. Returns nullopt when
/// the retained mass is below 1e-14.
std::optional<CoincidenceResult> coincidence_measure(const BellDiagonal& s, int pair);

DensityState to_density(const BellDiagonal& s);

struct DistillationResult {
  double fidelity;
  double success_probability;
};

/// Two-copy DEJMPS round on tuples a (kept pair) and b (measured pair).
/// Throws std::domain_error when no mass survives.
DistillationResult dejmps_exact(const std::array<double, 4>& a, const std::array<double, 4>& b);

}  // namespace locc
