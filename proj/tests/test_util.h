#pragma once

#include "locc/qmath.h"

#include <random>

namespace locc::testing {

inline ComplexMatrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  return qr.householderQ();
}

/// Random full-rank density matrix (Ginibre construction).
inline DensityState random_density(int num_qubits, std::mt19937_64& rng) {
  const int dim = 1 << num_qubits;
  std::normal_distribution<double> n;
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(n(rng), n(rng));
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState(rho);
}

inline PureState random_pure(int num_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  ComplexVector v(1 << num_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(n(rng), n(rng));
  v.normalize();
  return PureState(v);
}

}  // namespace locc::testing
