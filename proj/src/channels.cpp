#include "locc/channels.h"

#include <cmath>
#include <numeric>
#include <string>

namespace locc {

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus, double completeness_tol)
    : input_qubits_(0), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
  const Eigen::Index d = kraus_.front().rows();
  input_qubits_ = qubits_for_dimension(d);
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : kraus_) {
    if (k.rows() != d || k.cols() != d) throw std::invalid_argument("Kraus operators differ in dimension");
    sum += k.adjoint() * k;
  }
  if (!approx_equal(sum, ComplexMatrix::Identity(d, d), completeness_tol)) {
    throw std::invalid_argument("Kraus operators are not trace preserving");
  }
}

QuantumChannel QuantumChannel::identity(int num_qubits) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  return QuantumChannel({ComplexMatrix::Identity(d, d)});
}

QuantumChannel amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::domain_error("amplitude damping parameter " + std::to_string(gamma) + " outside [0, 1]");
  }
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
  e1(0, 1) = std::sqrt(gamma);
  return QuantumChannel({std::move(e0), std::move(e1)});
}

DensityState apply_channel(const QuantumChannel& channel, const DensityState& rho, std::span<const int> targets) {
  if (static_cast<int>(targets.size()) != channel.input_qubits()) {
    throw std::invalid_argument("channel acts on " + std::to_string(channel.input_qubits()) + " qubits, got " +
                                std::to_string(targets.size()) + " targets");
  }
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : channel.kraus()) out += conjugate(rho.matrix(), k, targets);
  return DensityState::trusted(std::move(out));
}

DensityState apply_channel(const QuantumChannel& channel, const DensityState& rho) {
  if (rho.num_qubits() != channel.input_qubits()) throw std::invalid_argument("channel/state dimension mismatch");
  std::vector<int> all(static_cast<std::size_t>(rho.num_qubits()));
  std::iota(all.begin(), all.end(), 0);
  return apply_channel(channel, rho, all);
}

DensityState choi_state(const QuantumChannel& channel) {
  if (channel.input_qubits() != 1) throw std::invalid_argument("choi_state supports single-qubit channels only");
  ComplexVector phi = ComplexVector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const int target[] = {1};
  return apply_channel(channel, DensityState(PureState(phi)), target);
}

}  // namespace locc
