#pragma once

#include "locc/qmath.h"

#include <span>
#include <vector>

namespace locc {

/// Trace-preserving channel in Kraus form on a fixed number of qubits.
class QuantumChannel {
 public:
  /// Throws unless all operators share one 2^k dimension and
  /// sum_k K_k^dagger K_k = I within `completeness_tol`.
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus, double completeness_tol = 1e-10);

  static QuantumChannel identity(int num_qubits = 1);

  int input_qubits() const { return input_qubits_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

 private:
  int input_qubits_;
  std::vector<ComplexMatrix> kraus_;
};

/// E0 = |0><0| + sqrt(1-gamma)|1><1|, E1 = sqrt(gamma)|0><1|.
QuantumChannel amplitude_damping(double gamma);

/// sum_k K_k rho K_k^dagger with each K_k acting on `targets`.
DensityState apply_channel(const QuantumChannel& channel, const DensityState& rho, std::span<const int> targets);
DensityState apply_channel(const QuantumChannel& channel, const DensityState& rho);

/// (I (x) channel)(|Phi+><Phi+|), trace normalized. Single-qubit channels only.
DensityState choi_state(const QuantumChannel& channel);

}  // namespace locc
