#include "locc/channels.h"

#include "locc/protocols.h"
#include "test_util.h"

#include <gtest/gtest.h>

using namespace locc;

TEST(channels, amplitude_damping_endpoints) {
  const auto id = amplitude_damping(0.0);
  EXPECT_TRUE(approx_equal(id.kraus()[1], ComplexMatrix::Zero(2, 2), 0));
  const DensityState one = PureState::basis("1");
  EXPECT_LT(max_abs_diff(apply_channel(amplitude_damping(1.0), one).matrix(), PureState::basis("0").projector()),
            1e-15);
  ComplexMatrix half = ComplexMatrix::Identity(2, 2) * 0.5;
  EXPECT_LT(max_abs_diff(apply_channel(amplitude_damping(0.5), one).matrix(), half), 1e-15);
  EXPECT_THROW(amplitude_damping(-0.1), std::domain_error);
  EXPECT_THROW(amplitude_damping(1.1), std::domain_error);
}

TEST(channels, completeness_checked) {
  EXPECT_THROW(QuantumChannel({ComplexMatrix::Identity(2, 2) * 0.5}), std::invalid_argument);
  EXPECT_THROW(QuantumChannel({}), std::invalid_argument);
  for (double g : {0.0, 0.13, 0.5, 0.99, 1.0}) EXPECT_NO_THROW(QuantumChannel(amplitude_damping(g).kraus(), 1e-15));
}

TEST(channels, identity_channel_is_identity) {
  std::mt19937_64 rng(1);
  const auto rho = locc::testing::random_density(2, rng);
  const std::vector<int> q1{1};
  EXPECT_LT(max_abs_diff(apply_channel(QuantumChannel::identity(), rho, q1).matrix(), rho.matrix()), 1e-15);
}

TEST(channels, damped_phi_minus_corner_entry) {
  const auto ad = amplitude_damping(0.5);
  const std::vector<int> q0{0}, q1{1};
  const auto out = apply_channel(ad, apply_channel(ad, bell_state(BellIndex::PhiMinus), q0), q1);
  EXPECT_NEAR(out(0, 0).real(), 0.625, 1e-12);
}

TEST(channels, damping_composes) {
  std::mt19937_64 rng(2);
  const auto rho = locc::testing::random_density(1, rng);
  const double g1 = 0.3, g2 = 0.45;
  const auto twice = apply_channel(amplitude_damping(g2), apply_channel(amplitude_damping(g1), rho));
  const auto once = apply_channel(amplitude_damping(1 - (1 - g1) * (1 - g2)), rho);
  EXPECT_LT(max_abs_diff(twice.matrix(), once.matrix()), 1e-12);
}

TEST(channels, preserves_trace_and_positivity) {
  std::mt19937_64 rng(3);
  for (double g : {0.1, 0.5, 0.9}) {
    const auto rho = locc::testing::random_density(2, rng);
    const std::vector<int> q{1};
    const auto out = apply_channel(amplitude_damping(g), rho, q);
    EXPECT_NEAR(out.trace(), 1.0, 1e-10);
    EXPECT_GE(out.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(channels, arity_mismatch_throws) {
  const std::vector<int> two{0, 1};
  EXPECT_THROW(apply_channel(amplitude_damping(0.2), s_state(0.5), two), std::invalid_argument);
  EXPECT_THROW(apply_channel(amplitude_damping(0.2), s_state(0.5)), std::invalid_argument);
}

TEST(channels, choi_states) {
  EXPECT_LT(max_abs_diff(choi_state(QuantumChannel::identity()).matrix(), bell_state(BellIndex::PhiPlus).matrix()),
            1e-15);
  EXPECT_NEAR(state_fidelity(bell_state(BellIndex::PhiPlus), choi_state(QuantumChannel::identity())), 1.0, 1e-12);
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  want(0, 0) = want(2, 2) = 0.5;
  EXPECT_LT(max_abs_diff(choi_state(amplitude_damping(1.0)).matrix(), want), 1e-15);
  const auto c = choi_state(amplitude_damping(0.3));
  EXPECT_NEAR(c(0, 0).real(), 0.5, 1e-15);
  // |11> damps to |10>: the second slot decays.
  EXPECT_NEAR(c(1, 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(c(2, 2).real(), 0.15, 1e-15);
  EXPECT_NEAR(c(3, 3).real(), 0.35, 1e-15);
  EXPECT_THROW(choi_state(QuantumChannel::identity(2)), std::invalid_argument);
}
