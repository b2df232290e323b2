#include "locc/qmath.h"

#include "locc/protocols.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <algorithm>

using namespace locc;
using locc::testing::random_density;
using locc::testing::random_pure;
using locc::testing::random_unitary;

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

ComplexMatrix cnot() {
  ComplexMatrix c = ComplexMatrix::Zero(4, 4);
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1;
  return c;
}

}  // namespace

TEST(qmath, pure_state_norm_checked) {
  ComplexVector v(2);
  v << 1, 1;
  EXPECT_THROW(PureState{v}, std::invalid_argument);
  v.normalize();
  EXPECT_NO_THROW(PureState{v});
  EXPECT_EQ(PureState::basis("01").amplitudes()(1), Complex(1, 0));
  EXPECT_THROW(PureState::basis("0a"), std::invalid_argument);
}

TEST(qmath, density_state_rejects_unphysical) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  EXPECT_THROW(DensityState{m}, InvalidStateError);  // trace 2
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityState{neg}, InvalidStateError);
  ComplexMatrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0, 0.5;
  EXPECT_THROW(DensityState{nonherm}, InvalidStateError);
  EXPECT_THROW(DensityState{ComplexMatrix::Identity(3, 3) / 3.0}, std::invalid_argument);
}

TEST(qmath, tensor_of_basis_projectors) {
  const DensityState zero = PureState::basis("0");
  EXPECT_TRUE(approx_equal(tensor(zero, zero).matrix(), PureState::basis("00").projector(), 0));
}

TEST(qmath, tensor_then_trace_recovers_first_factor) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = random_density(2, rng);
    const auto sigma = random_density(1, rng);
    const std::vector<int> keep{0, 1};
    EXPECT_LT(max_abs_diff(partial_trace(tensor(rho, sigma), keep).matrix(), rho.matrix()), 1e-12);
  }
  const auto rho = random_density(1, rng);
  const std::vector<int> keep{0};
  EXPECT_LT(max_abs_diff(partial_trace(tensor(rho, DensityState::maximally_mixed(1)), keep).matrix(), rho.matrix()),
            1e-12);
}

TEST(qmath, tensor_of_s_states_rank_at_most_four) {
  const auto t = tensor(s_state(0.5), s_state(0.5));
  EXPECT_NEAR(t.trace(), 1.0, 1e-12);
  const auto ev = t.eigenvalues();
  EXPECT_LE(std::count_if(ev.begin(), ev.end(), [](double x) { return x > 1e-12; }), 4);
}

TEST(qmath, partial_trace_of_ebit_is_maximally_mixed) {
  const std::vector<int> keep{0};
  EXPECT_LT(max_abs_diff(partial_trace(bell_state(BellIndex::PhiPlus), keep).matrix(),
                         DensityState::maximally_mixed(1).matrix()),
            1e-15);
}

TEST(qmath, partial_trace_drops_second_pair) {
  const std::vector<int> keep{0, 1};
  const auto t = tensor(s_state(0.3), bell_state(BellIndex::PhiPlus));
  EXPECT_LT(max_abs_diff(partial_trace(t, keep).matrix(), s_state(0.3).matrix()), 1e-12);
}

TEST(qmath, partial_trace_keeps_register_order) {
  const DensityState s = PureState::basis("011");
  const std::vector<int> keep{2, 0};
  EXPECT_EQ(max_abs_diff(partial_trace(s, keep).matrix(), PureState::basis("01").projector()), 0.0);
  const std::vector<int> bad{3};
  EXPECT_THROW(partial_trace(s, bad), std::out_of_range);
}

TEST(qmath, permute_qubits_examples) {
  const DensityState s = PureState::basis("01");
  const std::vector<int> id{0, 1}, swap{1, 0};
  EXPECT_TRUE(approx_equal(permute_qubits(s, id).matrix(), s.matrix(), 0));
  EXPECT_TRUE(approx_equal(permute_qubits(s, swap).matrix(), PureState::basis("10").projector(), 0));
  const std::vector<int> bad{0, 0};
  EXPECT_THROW(permute_qubits(s, bad), std::invalid_argument);
}

TEST(qmath, permute_qubits_roundtrip_and_spectrum) {
  std::mt19937_64 rng(2);
  const auto rho = random_density(3, rng);
  const std::vector<int> perm{2, 0, 1};
  std::vector<int> inv(3);
  for (int i = 0; i < 3; ++i) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  const auto there = permute_qubits(rho, perm);
  EXPECT_LT(max_abs_diff(permute_qubits(there, inv).matrix(), rho.matrix()), 1e-14);
  EXPECT_LT((there.eigenvalues() - rho.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
  // New qubit 0 is old qubit 2.
  const std::vector<int> q0{0}, q2{2};
  EXPECT_LT(max_abs_diff(partial_trace(there, q0).matrix(), partial_trace(rho, q2).matrix()), 1e-14);
}

TEST(qmath, embed_operator_examples) {
  const std::vector<int> q0{0}, q1{1}, pair{0, 1};
  EXPECT_TRUE(approx_equal(embed_operator(pauli_x(), q0, 1), pauli_x(), 0));
  const ComplexVector in = PureState::basis("10").amplitudes();
  EXPECT_TRUE(approx_equal(embed_operator(cnot(), pair, 2) * in, PureState::basis("11").amplitudes(), 0));
  ComplexMatrix not_unitary = ComplexMatrix::Identity(2, 2) * 2.0;
  EXPECT_THROW(embed_operator(not_unitary, q0, 1), std::invalid_argument);
  const std::vector<int> dup{1, 1};
  EXPECT_THROW(embed_operator(cnot(), dup, 2), std::invalid_argument);
}

TEST(qmath, embed_disjoint_supports_commute) {
  std::mt19937_64 rng(3);
  const std::vector<int> q0{0}, q1{1};
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = random_unitary(2, rng);
    const auto v = random_unitary(2, rng);
    const ComplexMatrix a = embed_operator(u, q1, 3) * embed_operator(v, q0, 3);
    const ComplexMatrix b = embed_operator(v, q0, 3) * embed_operator(u, q1, 3);
    EXPECT_LT(max_abs_diff(a, b), 1e-12);
  }
}

TEST(qmath, local_application_matches_embedding) {
  std::mt19937_64 rng(4);
  const auto rho = random_density(3, rng);
  const auto u = random_unitary(4, rng);
  const std::vector<int> targets{2, 0};
  const ComplexMatrix full = embed_operator(u, targets, 3);
  EXPECT_LT(max_abs_diff(conjugate(rho.matrix(), u, targets), full * rho.matrix() * full.adjoint()), 1e-12);
}

TEST(qmath, fidelity_examples) {
  std::mt19937_64 rng(5);
  const auto rho = random_density(2, rng);
  EXPECT_NEAR(state_fidelity(rho, rho), 1.0, 1e-10);
  EXPECT_NEAR(state_fidelity(DensityState(PureState::basis("0")), DensityState(PureState::basis("1"))), 0.0, 1e-15);
  EXPECT_NEAR(state_fidelity(bell_state(BellIndex::PhiPlus), s_state(0.4)), 0.7, 1e-12);
  EXPECT_THROW(state_fidelity(rho, DensityState::maximally_mixed(1)), std::invalid_argument);
}

TEST(qmath, fidelity_symmetric_bounded_and_pure_special_case) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_density(2, rng);
    const auto b = random_density(2, rng);
    const double f = state_fidelity(a, b);
    EXPECT_GE(f, -1e-9);
    EXPECT_LE(f, 1 + 1e-9);
    EXPECT_NEAR(f, state_fidelity(b, a), 1e-9);
    const auto psi = random_pure(2, rng);
    const double direct = (psi.amplitudes().adjoint() * b.matrix() * psi.amplitudes())(0, 0).real();
    EXPECT_NEAR(state_fidelity(DensityState(psi), b), direct, 1e-10);
    EXPECT_NEAR(state_fidelity(psi, b), direct, 1e-10);
  }
}

TEST(qmath, fidelity_gradient_matches_finite_difference) {
  std::mt19937_64 rng(7);
  const auto rho = random_density(2, rng);
  const auto sigma = random_density(2, rng);
  const auto direction = random_density(2, rng);
  const ComplexMatrix d = direction.matrix() - sigma.matrix();  // traceless
  const double h = 1e-6;
  const auto up = DensityState::trusted(sigma.matrix() + h * d);
  const auto down = DensityState::trusted(sigma.matrix() - h * d);
  const double numeric = (state_fidelity(rho, up) - state_fidelity(rho, down)) / (2 * h);
  const double analytic = (fidelity_gradient(rho, sigma) * d).trace().real();
  EXPECT_NEAR(numeric, analytic, 1e-7);
}

TEST(qmath, hermitian_sqrt_examples) {
  EXPECT_LT(max_abs_diff(hermitian_sqrt(ComplexMatrix::Identity(3, 3)), ComplexMatrix::Identity(3, 3)), 1e-15);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  ComplexMatrix want = ComplexMatrix::Zero(2, 2);
  want(0, 0) = 2;
  want(1, 1) = 3;
  EXPECT_LT(max_abs_diff(hermitian_sqrt(d), want), 1e-14);
  std::mt19937_64 rng(8);
  const auto rho = random_density(2, rng);
  const ComplexMatrix r = hermitian_sqrt(rho.matrix());
  EXPECT_LT(max_abs_diff(r * r, rho.matrix()), 1e-8);
  ComplexMatrix nonherm(2, 2);
  nonherm << 1, 1, 0, 1;
  EXPECT_THROW(hermitian_sqrt(nonherm), std::invalid_argument);
}
