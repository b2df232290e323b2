#include "locc/locc_engine.h"

#include "locc/bell_algebra.h"
#include "locc/protocols.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <numbers>

using namespace locc;

namespace {

constexpr double kPi = std::numbers::pi;

double probability_of(const OutcomeEnsemble& e, const std::string& h) {
  for (const auto& b : e.branches) {
    if (b.history == h) return b.probability;
  }
  return 0.0;
}

const Branch& branch(const OutcomeEnsemble& e, const std::string& h) {
  for (const auto& b : e.branches) {
    if (b.history == h) return b;
  }
  throw std::out_of_range(h);
}

// DEJMPS split into two single-party rounds, in the given order.
LoccProtocol dejmps_sequential(bool alice_first) {
  Circuit a(4), b(4);
  a.rx(0, Angle::fixed(kPi / 2)).rx(1, Angle::fixed(kPi / 2)).cnot(0, 1);
  b.rx(2, Angle::fixed(-kPi / 2)).rx(3, Angle::fixed(-kPi / 2)).cnot(2, 3);
  LoccRound ra{{"A"}, {}, std::vector<Circuit>{a}, {1}};
  LoccRound rb{{"B"}, {}, std::vector<Circuit>{b}, {3}};
  std::vector<LoccRound> rounds = alice_first ? std::vector{ra, rb} : std::vector{rb, ra};
  const Classifier c = make_classifier(2, [](std::string_view h) { return h[0] == h[1] ? kSuccess : kFailure; });
  return LoccProtocol(PartyLayout({{"A", {0, 1}}, {"B", {2, 3}}}), rounds, c, 0);
}

}  // namespace

TEST(locc_engine, party_layout_validation) {
  EXPECT_NO_THROW(PartyLayout({{"A", {0, 2}}, {"B", {1}}}));
  EXPECT_THROW(PartyLayout({{"A", {0, 1}}, {"B", {1}}}), std::invalid_argument);
  EXPECT_THROW(PartyLayout({{"A", {0}}, {"B", {2}}}), std::invalid_argument);
  EXPECT_THROW(PartyLayout({{"A", {0}}, {"A", {1}}}), std::invalid_argument);
  EXPECT_THROW(PartyLayout(std::vector<Party>{{"A", {0}}}).party("B"), std::out_of_range);
}

TEST(locc_engine, measure_plus_state) {
  ComplexVector v(2);
  v << std::sqrt(0.5), std::sqrt(0.5);
  const std::vector<int> q{0};
  const auto e = measure_computational(PureState(v), q);
  ASSERT_EQ(e.branches.size(), 2U);
  EXPECT_NEAR(probability_of(e, "0"), 0.5, 1e-15);
  EXPECT_NEAR(probability_of(e, "1"), 0.5, 1e-15);
  EXPECT_TRUE(e.remaining_qubits.empty());
  EXPECT_THROW(measure_computational(PureState(v), std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(measure_computational(PureState(v), std::vector<int>{1}), std::out_of_range);
}

TEST(locc_engine, measure_half_of_ebit) {
  const std::vector<int> q{0};
  const auto e = measure_computational(bell_state(BellIndex::PhiPlus), q);
  EXPECT_EQ(e.remaining_qubits, (std::vector<int>{1}));
  EXPECT_NEAR(branch(e, "0").probability, 0.5, 1e-15);
  EXPECT_LT(max_abs_diff(branch(e, "0").state.matrix(), PureState::basis("0").projector()), 1e-15);
  EXPECT_LT(max_abs_diff(branch(e, "1").state.matrix(), PureState::basis("1").projector()), 1e-15);
}

TEST(locc_engine, measure_prunes_impossible_outcomes) {
  const std::vector<int> q{0, 1};
  const auto e = measure_computational(PureState::basis("10"), q);
  ASSERT_EQ(e.branches.size(), 1U);
  EXPECT_EQ(e.branches[0].history, "10");
}

TEST(locc_engine, dejmps_ancilla_outcomes) {
  const auto np = dejmps();
  const auto e = execute(np.protocol, np.params, n_copies(s_state(0.5), 2));
  EXPECT_NEAR(probability_of(e, "00"), 0.3125, 1e-12);
  EXPECT_NEAR(probability_of(e, "11"), 0.3125, 1e-12);
  EXPECT_NEAR(e.total_probability(), 1.0, 1e-10);
}

TEST(locc_engine, zero_round_protocol_is_identity) {
  std::mt19937_64 rng(1);
  const auto rho = locc::testing::random_density(2, rng);
  const LoccProtocol p(PartyLayout({{"A", {0}}, {"B", {1}}}), {}, Classifier{{"", kSuccess}}, 0);
  const auto e = execute(p, {}, rho);
  ASSERT_EQ(e.branches.size(), 1U);
  EXPECT_EQ(e.branches[0].history, "");
  EXPECT_NEAR(e.branches[0].probability, 1.0, 1e-15);
  EXPECT_LT(max_abs_diff(e.branches[0].state.matrix(), rho.matrix()), 1e-15);
  const auto stats = success_statistics(e, p.classifier(), rho);
  ASSERT_TRUE(stats);
  EXPECT_NEAR(stats->success_probability, 1.0, 1e-15);
  EXPECT_NEAR(stats->fidelity, 1.0, 1e-10);
}

TEST(locc_engine, identity_rounds_without_measurement) {
  std::mt19937_64 rng(2);
  const auto rho = locc::testing::random_density(2, rng);
  LoccRound r{{"A", "B"}, {}, std::vector<Circuit>{Circuit(2), Circuit(2)}, {}};
  const LoccProtocol p(PartyLayout({{"A", {0}}, {"B", {1}}}), {r, r}, Classifier{{"", kSuccess}}, 0);
  const auto e = execute(p, {}, rho);
  ASSERT_EQ(e.branches.size(), 1U);
  EXPECT_LT(max_abs_diff(e.branches[0].state.matrix(), rho.matrix()), 1e-15);
}

TEST(locc_engine, dejmps_on_ebits) {
  const auto np = dejmps();
  const auto e = execute(np.protocol, np.params, n_copies(bell_state(BellIndex::PhiPlus), 2));
  const auto stats = success_statistics(e, np.protocol.classifier(), bell_state(BellIndex::PhiPlus));
  ASSERT_TRUE(stats);
  EXPECT_NEAR(stats->success_probability, 1.0, 1e-12);
  EXPECT_NEAR(stats->fidelity, 1.0, 1e-12);
  EXPECT_NEAR(probability_of(e, "00") + probability_of(e, "11"), 1.0, 1e-12);
}

TEST(locc_engine, dejmps_statistics_on_s_state) {
  const auto np = dejmps();
  const auto e = execute(np.protocol, np.params, n_copies(s_state(0.5), 2));
  const auto stats = success_statistics(e, np.protocol.classifier(), bell_state(BellIndex::PhiPlus));
  ASSERT_TRUE(stats);
  EXPECT_NEAR(stats->success_probability, 0.625, 1e-12);
  EXPECT_NEAR(stats->fidelity, 0.9, 1e-12);
}

TEST(locc_engine, s_state_protocol_success_branch) {
  const auto np = learned_s_state(0.5);
  const auto e = execute(np.protocol, np.params, n_copies(s_state(0.5), 2));
  EXPECT_NEAR(probability_of(e, "00"), 0.1875, 1e-12);
  const auto stats = success_statistics(e, np.protocol.classifier(), bell_state(BellIndex::PhiPlus));
  ASSERT_TRUE(stats);
  EXPECT_NEAR(stats->fidelity, 0.9330127018922193, 1e-10);
}

TEST(locc_engine, isotropic_four_copy_statistics) {
  const auto np = learned_isotropic_4copy();
  const auto e = execute(np.protocol, np.params, n_copies(isotropic(0.7), 4));
  const auto stats = success_statistics(e, np.protocol.classifier(), bell_state(BellIndex::PhiPlus));
  ASSERT_TRUE(stats);
  EXPECT_NEAR(stats->success_probability, 0.3865375, 1e-12);
  EXPECT_NEAR(stats->fidelity, 0.9369158878504673, 1e-10);
}

TEST(locc_engine, probabilities_sum_to_one) {
  std::mt19937_64 rng(3);
  for (const auto& np : {dejmps(), learned_s_state(0.3), qsd_protocol(0.4), standard_teleportation()}) {
    const auto rho = locc::testing::random_density(np.protocol.num_qubits(), rng);
    EXPECT_NEAR(execute(np.protocol, np.params, rho).total_probability(), 1.0, 1e-10) << np.name;
  }
  const auto ansatz = distillation_ansatz(2);
  std::uniform_real_distribution<double> angle(0, 2 * kPi);
  std::vector<double> params(static_cast<std::size_t>(ansatz.num_params()));
  for (auto& x : params) x = angle(rng);
  EXPECT_NEAR(execute(ansatz, params, locc::testing::random_density(4, rng)).total_probability(), 1.0, 1e-10);
}

TEST(locc_engine, disjoint_rounds_commute) {
  std::mt19937_64 rng(4);
  const auto rho = locc::testing::random_density(4, rng);
  const auto ab = execute(dejmps_sequential(true), {}, rho);
  const auto ba = execute(dejmps_sequential(false), {}, rho);
  ASSERT_EQ(ab.branches.size(), ba.branches.size());
  for (const auto& b : ab.branches) {
    EXPECT_NEAR(b.probability, branch(ba, b.history).probability, 1e-12);
    EXPECT_LT(max_abs_diff(b.state.matrix(), branch(ba, b.history).state.matrix()), 1e-12);
  }
  const auto joint = execute(dejmps().protocol, {}, rho);
  for (const auto& b : joint.branches) EXPECT_NEAR(b.probability, branch(ab, b.history).probability, 1e-12);
}

TEST(locc_engine, s_state_output_is_rank_two_bell_diagonal) {
  for (double p : {0.2, 0.5, 0.9}) {
    const auto np = learned_s_state(p);
    const auto e = execute(np.protocol, np.params, n_copies(s_state(p), 2));
    const auto stats = success_statistics(e, np.protocol.classifier(), bell_state(BellIndex::PhiPlus));
    ASSERT_TRUE(stats);
    ComplexMatrix basis(4, 4);
    for (int i = 0; i < 4; ++i) basis.col(i) = bell_vector(static_cast<BellIndex>(i));
    const ComplexMatrix in_bell = basis.adjoint() * stats->merged_state.matrix() * basis;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const bool allowed = i == j && (i == 0 || i == 2);
        if (!allowed) EXPECT_LT(std::abs(in_bell(i, j)), 1e-10) << i << "," << j;
      }
    }
  }
}

TEST(locc_engine, no_success_is_signalled) {
  const auto np = dejmps();
  const auto e = execute(np.protocol, np.params, n_copies(s_state(0.5), 2));
  const Classifier never = make_classifier(2, [](std::string_view) { return kFailure; });
  EXPECT_FALSE(success_statistics(e, never, DensityState::maximally_mixed(2)));
}

TEST(locc_engine, protocol_validation) {
  const PartyLayout layout({{"A", {0}}, {"B", {1}}});
  const Classifier c1 = make_classifier(1, [](std::string_view) { return kSuccess; });
  Circuit foreign(2);
  foreign.x(1);
  EXPECT_THROW(LoccProtocol(layout, {LoccRound{{"A"}, {}, std::vector<Circuit>{foreign}, {0}}}, c1, 0),
               std::invalid_argument);
  // Measuring a qubit outside the acting party.
  EXPECT_THROW(LoccProtocol(layout, {LoccRound{{"A"}, {}, std::vector<Circuit>{Circuit(2)}, {1}}}, c1, 0),
               std::invalid_argument);
  // Incomplete selector for the second round.
  LoccRound first{{"A"}, {}, std::vector<Circuit>{Circuit(2)}, {0}};
  LoccRound second{{"B"}, {{"0", {Circuit(2)}}}, std::nullopt, {1}};
  const Classifier c2 = make_classifier(2, [](std::string_view) { return kSuccess; });
  EXPECT_THROW(LoccProtocol(layout, {first, second}, c2, 0), std::invalid_argument);
  second.by_history.emplace("1", std::vector<Circuit>{Circuit(2)});
  EXPECT_NO_THROW(LoccProtocol(layout, {first, second}, c2, 0));
  // Incomplete classifier.
  EXPECT_THROW(LoccProtocol(layout, {first, second}, Classifier{{"00", 1}}, 0), std::invalid_argument);
  // Measuring the same qubit twice.
  LoccRound again{{"A"}, {}, std::vector<Circuit>{Circuit(2)}, {0}};
  EXPECT_THROW(LoccProtocol(layout, {first, again}, c2, 0), std::invalid_argument);
  // Parameter count mismatch.
  EXPECT_THROW(LoccProtocol(layout, {LoccRound{{"A"}, {}, std::vector<Circuit>{Circuit(2, 1)}, {0}}}, c1, 0),
               std::invalid_argument);
}

TEST(locc_engine, execute_checks_inputs) {
  const auto np = learned_s_state(0.5);
  EXPECT_THROW(execute(np.protocol, {}, n_copies(s_state(0.5), 2)), std::invalid_argument);
  EXPECT_THROW(execute(np.protocol, np.params, s_state(0.5)), std::invalid_argument);
}

TEST(locc_engine, angle_shift_moves_one_gate) {
  const auto np = qsd_protocol(0.3);
  const auto gates = np.protocol.parameterized_gates();
  ASSERT_EQ(gates.size(), 2U);
  const auto shifted = np.protocol.with_angle_shift(gates[0], 0.5);
  EXPECT_DOUBLE_EQ(shifted.gate_at(gates[0]).angle->offset, 0.5);
  EXPECT_DOUBLE_EQ(shifted.gate_at(gates[1]).angle->offset, 0.0);
}

TEST(locc_engine, protocol_text_roundtrip) {
  for (const auto& np : {dejmps(), qsd_protocol(0.25), standard_teleportation(), learned_isotropic_4copy()}) {
    const auto text = protocol_to_text(np.protocol);
    const auto back = protocol_from_text(text);
    EXPECT_EQ(protocol_to_text(back), text) << np.name;
    std::mt19937_64 rng(5);
    const auto rho = locc::testing::random_density(np.protocol.num_qubits(), rng);
    const auto a = execute(np.protocol, np.params, rho);
    const auto b = execute(back, np.params, rho);
    ASSERT_EQ(a.branches.size(), b.branches.size());
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
      EXPECT_EQ(a.branches[i].history, b.branches[i].history);
      EXPECT_EQ(a.branches[i].probability, b.branches[i].probability);
    }
  }
  EXPECT_THROW(protocol_from_text("[]"), std::invalid_argument);
  EXPECT_THROW(protocol_from_text("not json"), std::invalid_argument);
}
