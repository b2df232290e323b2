#include "locc/protocols.h"

#include <cmath>
#include <numbers>
#include <numeric>

namespace locc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

std::vector<int> range(int begin, int end) {
  std::vector<int> v(static_cast<std::size_t>(end - begin));
  std::iota(v.begin(), v.end(), begin);
  return v;
}

PartyLayout two_parties(std::vector<int> alice, std::vector<int> bob) {
  return PartyLayout({{"A", std::move(alice)}, {"B", std::move(bob)}});
}

// Success when the first half of the history equals the second half, i.e.
// Alice's and Bob's outcomes agree copy by copy.
Classifier coincidence_classifier(int num_measured) {
  return make_classifier(num_measured, [](std::string_view h) {
    const auto half = h.size() / 2;
    return h.substr(0, half) == h.substr(half) ? kSuccess : kFailure;
  });
}

// One DEJMPS step for one party on (keep, measured) qubits.
void dejmps_step(Circuit& c, int keep, int measured, double angle) {
  c.rx(keep, Angle::fixed(angle)).rx(measured, Angle::fixed(angle)).cnot(keep, measured);
}

}  // namespace

// --- states ------------------------------------------------------------------

DensityState bell_state(BellIndex which) { return PureState(bell_vector(which)); }

DensityState s_state(double p) {
  check_unit_interval(p, "p");
  const ComplexMatrix m = p * bell_state(BellIndex::PhiPlus).matrix() + (1 - p) * PureState::basis("00").projector();
  return DensityState(m);
}

DensityState isotropic(double p) {
  check_unit_interval(p, "p");
  const ComplexMatrix m =
      p * bell_state(BellIndex::PhiPlus).matrix() + (1 - p) * DensityState::maximally_mixed(2).matrix();
  return DensityState(m);
}

DensityState n_copies(const DensityState& two_qubit, int n) {
  if (two_qubit.num_qubits() != 2) throw std::invalid_argument("n_copies: expected a two-qubit state");
  if (n < 1) throw std::invalid_argument("n_copies: n must be positive");
  DensityState acc = two_qubit;
  for (int i = 1; i < n; ++i) acc = tensor(acc, two_qubit);
  std::vector<int> perm;
  for (int i = 0; i < n; ++i) perm.push_back(2 * i);
  for (int i = 0; i < n; ++i) perm.push_back(2 * i + 1);
  return permute_qubits(acc, perm);
}

// --- distillation protocols ----------------------------------------------------

NamedProtocol dejmps() {
  Circuit alice(4), bob(4);
  dejmps_step(alice, 0, 1, kPi / 2);
  dejmps_step(bob, 2, 3, -kPi / 2);
  LoccRound round{{"A", "B"}, {}, std::vector<Circuit>{alice, bob}, {1, 3}};
  return {"dejmps", {}, LoccProtocol(two_parties({0, 1}, {2, 3}), {round}, coincidence_classifier(2), 0), {}};
}

NamedProtocol learned_s_state(double p) {
  check_unit_interval(p, "p");
  Circuit alice(4, 1), bob(4, 1);
  alice.cnot(1, 0).ry(1, Angle::param(0));
  bob.cnot(3, 2).cnot(2, 3).ry(3, Angle::param(0));
  LoccRound round{{"A", "B"}, {}, std::vector<Circuit>{alice, bob}, {1, 3}};
  const Classifier classifier = make_classifier(2, [](std::string_view h) { return h == "00" ? kSuccess : kFailure; });
  return {"learned-s-state", {{"p", p}}, LoccProtocol(two_parties({0, 1}, {2, 3}), {round}, classifier, 1),
          {std::acos(1 - p) + kPi}};
}

NamedProtocol learned_isotropic_4copy() {
  Circuit alice(8), bob(8);
  for (auto [c, sign, base] : {std::tuple{&alice, 1.0, 0}, std::tuple{&bob, -1.0, 4}}) {
    for (int i = 0; i < 4; ++i) c->cnot(base + i, base + (i + 1) % 4);
    for (int i = 1; i < 4; ++i) c->rx(base + i, Angle::fixed(sign * kPi / 2));
  }
  LoccRound round{{"A", "B"}, {}, std::vector<Circuit>{alice, bob}, {1, 2, 3, 5, 6, 7}};
  return {"learned-isotropic-4copy", {},
          LoccProtocol(two_parties(range(0, 4), range(4, 8)), {round}, coincidence_classifier(6), 0), {}};
}

NamedProtocol generalized_dejmps_4copy() {
  Circuit a1(8), b1(8), a2(8), b2(8);
  dejmps_step(a1, 0, 1, kPi / 2);
  dejmps_step(a1, 2, 3, kPi / 2);
  dejmps_step(b1, 4, 5, -kPi / 2);
  dejmps_step(b1, 6, 7, -kPi / 2);
  dejmps_step(a2, 0, 2, kPi / 2);
  dejmps_step(b2, 4, 6, -kPi / 2);
  LoccRound first{{"A", "B"}, {}, std::vector<Circuit>{a1, b1}, {1, 3, 5, 7}};
  LoccRound second{{"A", "B"}, {}, std::vector<Circuit>{a2, b2}, {2, 6}};
  return {"generalized-dejmps-4copy", {},
          LoccProtocol(two_parties(range(0, 4), range(4, 8)), {first, second}, coincidence_classifier(6), 0), {}};
}

DistillationResult evaluate_distillation(const LoccProtocol& protocol, std::span<const double> params,
                                         const DensityState& pair) {
  const int copies = protocol.num_qubits() / 2;
  const auto ensemble = execute(protocol, params, n_copies(pair, copies));
  const auto stats = success_statistics(ensemble, protocol.classifier(), bell_state(BellIndex::PhiPlus));
  if (!stats) throw std::domain_error("distillation never succeeds on this input");
  return {stats->fidelity, stats->success_probability};
}

// --- discrimination --------------------------------------------------------------

double qsd_angle(double gamma) {
  check_unit_interval(gamma, "gamma");
  return kPi - std::atan2(2 - gamma, gamma);
}

NamedProtocol qsd_protocol(double gamma) {
  const double theta = qsd_angle(gamma);
  Circuit alice(2, 1), bob0(2, 1), bob1(2, 1);
  alice.ry(0, Angle::fixed(kPi / 2));
  bob0.ry(1, Angle::param(0));
  bob1.ry(1, Angle::param(0, -1.0));
  LoccRound first{{"A"}, {}, std::vector<Circuit>{alice}, {0}};
  LoccRound second{{"B"}, {{"0", {bob0}}, {"1", {bob1}}}, std::nullopt, {1}};
  const Classifier classifier = make_classifier(2, [](std::string_view h) { return h[1] == '1' ? 1 : 0; });
  return {"qsd", {{"gamma", gamma}}, LoccProtocol(two_parties({0}, {1}), {first, second}, classifier, 1), {theta}};
}

Discrimination qsd_hypotheses(double gamma) {
  const auto ad = amplitude_damping(gamma);
  const std::vector<int> both{0, 1};
  DensityState noisy = bell_state(BellIndex::PhiMinus);
  for (int q : both) noisy = apply_channel(ad, noisy, std::vector<int>{q});
  return {bell_state(BellIndex::PhiPlus), noisy};
}

double qsd_success_probability(const LoccProtocol& protocol, std::span<const double> params, double gamma) {
  return 1.0 - loss_eval(qsd_hypotheses(gamma), protocol, params).value / 2.0;
}

LoccProtocol qsd_ansatz() {
  Circuit alice(2, 9);
  alice.rz(0, Angle::param(0)).ry(0, Angle::param(1)).rz(0, Angle::param(2));
  std::map<std::string, std::vector<Circuit>> bob;
  for (int a = 0; a < 2; ++a) {
    Circuit c(2, 9);
    c.rz(1, Angle::param(3 + 3 * a)).ry(1, Angle::param(4 + 3 * a)).rz(1, Angle::param(5 + 3 * a));
    bob.emplace(a ? "1" : "0", std::vector<Circuit>{c});
  }
  LoccRound first{{"A"}, {}, std::vector<Circuit>{alice}, {0}};
  LoccRound second{{"B"}, std::move(bob), std::nullopt, {1}};
  const Classifier classifier = make_classifier(2, [](std::string_view h) { return h[1] == '1' ? 1 : 0; });
  return LoccProtocol(two_parties({0}, {1}), {first, second}, classifier, 9);
}

// --- distillation ansatz -----------------------------------------------------------

LoccProtocol distillation_ansatz(int copies, int depth) {
  if (copies < 2) throw std::invalid_argument("distillation_ansatz: need at least two copies");
  if (depth < 1) throw std::invalid_argument("distillation_ansatz: depth must be positive");
  const int per_party = 2 * copies * depth;
  const int n = 2 * copies;
  std::vector<Circuit> circuits;
  for (int party = 0; party < 2; ++party) {
    Circuit c(n, 2 * per_party);
    int slot = party * per_party;
    const int base = party * copies;
    for (int d = 0; d < depth; ++d) {
      for (int q = base; q < base + copies; ++q) {
        c.ry(q, Angle::param(slot++));
        c.rz(q, Angle::param(slot++));
      }
      for (int q = base; q + 1 < base + copies; ++q) c.cnot(q, q + 1);
    }
    circuits.push_back(std::move(c));
  }
  std::vector<int> measured = range(1, copies);
  for (int q = copies + 1; q < n; ++q) measured.push_back(q);
  const int m = static_cast<int>(measured.size());
  LoccRound round{{"A", "B"}, {}, std::move(circuits), std::move(measured)};
  const Classifier classifier = make_classifier(
      m, [](std::string_view h) { return h.find('1') == std::string_view::npos ? kSuccess : kFailure; });
  return LoccProtocol(two_parties(range(0, copies), range(copies, n)), {round}, classifier, 2 * per_party);
}

// --- channel simulation ---------------------------------------------------------------

namespace {

const Classifier& all_success_2() {
  static const Classifier c = make_classifier(2, [](std::string_view) { return kSuccess; });
  return c;
}

}  // namespace

NamedProtocol standard_teleportation() {
  Circuit alice(3);
  alice.cnot(0, 1).h(0);
  std::map<std::string, std::vector<Circuit>> bob;
  for (int m = 0; m < 2; ++m) {
    for (int a = 0; a < 2; ++a) {
      Circuit c(3);
      if (a) c.x(2);
      if (m) c.rz(2, Angle::fixed(kPi));  // Z up to global phase
      bob.emplace(std::string{char('0' + m), char('0' + a)}, std::vector<Circuit>{c});
    }
  }
  LoccRound first{{"A"}, {}, std::vector<Circuit>{alice}, {0, 1}};
  LoccRound second{{"B"}, std::move(bob), std::nullopt, {}};
  return {"teleportation", {}, LoccProtocol(two_parties({0, 1}, {2}), {first, second}, all_success_2(), 0), {}};
}

LoccProtocol channel_sim_ansatz() {
  constexpr int kSlots = 18;
  Circuit alice(3, kSlots);
  alice.ry(0, Angle::param(0)).ry(1, Angle::param(1)).cnot(0, 1);
  alice.rz(0, Angle::param(2)).ry(0, Angle::param(3)).rz(1, Angle::param(4)).ry(1, Angle::param(5));
  std::map<std::string, std::vector<Circuit>> bob;
  for (int h = 0; h < 4; ++h) {
    Circuit c(3, kSlots);
    c.rz(2, Angle::param(6 + 3 * h)).ry(2, Angle::param(7 + 3 * h)).rz(2, Angle::param(8 + 3 * h));
    bob.emplace(std::string{char('0' + h / 2), char('0' + h % 2)}, std::vector<Circuit>{c});
  }
  LoccRound first{{"A"}, {}, std::vector<Circuit>{alice}, {0, 1}};
  LoccRound second{{"B"}, std::move(bob), std::nullopt, {}};
  return LoccProtocol(two_parties({0, 1}, {2}), {first, second}, all_success_2(), kSlots);
}

ParameterVector channel_sim_teleport_params() {
  ParameterVector t(18, 0.0);
  t[2] = kPi;
  t[3] = kPi / 2;
  for (int m = 0; m < 2; ++m) {
    for (int a = 0; a < 2; ++a) {
      const auto k = static_cast<std::size_t>(6 + 3 * (2 * m + a));
      t[k] = kPi * a;
      t[k + 1] = kPi * a;
      t[k + 2] = kPi * m;
    }
  }
  return t;
}

ChannelSimSetup channel_sim_setup(double gamma) {
  const auto ad = amplitude_damping(gamma);
  const DensityState resource = choi_state(ad);
  return {gamma, ChannelSim{ad, default_channel_training_set(), resource}, resource};
}

NamedProtocol channel_sim_trained(double gamma, const OptimizerConfig& cfg) {
  const auto setup = channel_sim_setup(gamma);
  const LoccProtocol ansatz = channel_sim_ansatz();
  OptimizerConfig local = cfg;
  if (local.initial_points.empty()) local.initial_points.push_back(channel_sim_teleport_params());
  const TrainingTrace trace = train(setup.loss, ansatz, local);
  return {"channel-sim-trained", {{"gamma", gamma}}, ansatz, trace.final_params()};
}

FidelityStats channel_fidelity_stats(const LoccProtocol& protocol, std::span<const double> params,
                                     const DensityState& resource, const QuantumChannel& target,
                                     const std::vector<PureState>& states) {
  if (states.empty()) throw std::invalid_argument("channel_fidelity_stats: no states");
  std::vector<double> f;
  f.reserve(states.size());
  for (const auto& psi : states) {
    const auto e = execute(protocol, params, tensor(DensityState(psi), resource));
    ComplexMatrix out = e.weighted_sum([](const Branch&) { return true; });
    out /= out.trace().real();
    f.push_back(state_fidelity(apply_channel(target, DensityState(psi)), DensityState::trusted(out)));
  }
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  double var = 0.0;
  for (double x : f) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(f.size()))};
}

// --- closed forms --------------------------------------------------------------------

DistillationResult learned_s_state_oracle(double p) {
  check_unit_interval(p, "p");
  return {(1 + std::sqrt(2 * p - p * p)) / 2, p * p - p * p * p / 2};
}

DistillationResult dejmps_s_state_oracle(double p) {
  check_unit_interval(p, "p");
  return {(1 + p) * (1 + p) / (2 + 2 * p * p), (1 + p * p) / 2};
}

DistillationResult dejmps_isotropic_oracle(double p) {
  check_unit_interval(p, "p");
  const double a0 = (1 + 3 * p) / 4;
  const double a1 = (1 - p) / 4;
  const double succ = a0 * a0 + 5 * a1 * a1 + 2 * a0 * a1;
  return {(a0 * a0 + a1 * a1) / succ, succ};
}

DistillationResult learned_isotropic_4copy_oracle(double p) {
  check_unit_interval(p, "p");
  const double p2 = p * p;
  return {(1 - 2 * p + 9 * p2) / (4 - 8 * p + 12 * p2), (1 + 4 * p2 * p + 3 * p2 * p2) / 8};
}

DistillationResult generalized_dejmps_4copy_oracle(double p) {
  check_unit_interval(p, "p");
  const double p2 = p * p;
  const double p3 = p2 * p;
  const double p4 = p2 * p2;
  return {(1 + 10 * p2 + 8 * p3 + 13 * p4) / (4 + 8 * p2 + 20 * p4), (1 + 2 * p2 + 5 * p4) / 8};
}

double qsd_oracle(double gamma) {
  check_unit_interval(gamma, "gamma");
  return 0.5 + std::sqrt(2 - 2 * gamma + gamma * gamma) / (2 * std::sqrt(2.0));
}

}  // namespace locc
