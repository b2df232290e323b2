#pragma once

// Reference states, fixed protocols, training ansatzes and closed-form
// oracles.
//
// n-copy distillation registers hold Alice's qubits A0..A(n-1) first and Bob's
// B0..B(n-1) after; copy 0 is the one kept. n_copies() builds that layout from
// a two-qubit (A, B) state.

#include "locc/bell_algebra.h"
#include "locc/channels.h"
#include "locc/locc_engine.h"
#include "locc/trainer.h"

#include <map>
#include <string>

namespace locc {

// --- states ------------------------------------------------------------------

DensityState bell_state(BellIndex which);
/// p |Phi+><Phi+| + (1-p) |00><00|.
DensityState s_state(double p);
/// p |Phi+><Phi+| + (1-p) I/4.
DensityState isotropic(double p);
/// rho^{(x)n} reordered to A0..A(n-1), B0..B(n-1).
DensityState n_copies(const DensityState& two_qubit, int n);

// --- protocols ---------------------------------------------------------------

struct NamedProtocol {
  std::string name;
  std::map<std::string, double> inputs;  // builder arguments such as "p" or "gamma"
  LoccProtocol protocol;
  ParameterVector params;
};

/// Two-copy DEJMPS: RX(+pi/2) on Alice, RX(-pi/2) on Bob, bilateral CNOT,
/// coincidence on copy 1.
NamedProtocol dejmps();
/// Two-copy protocol for S states; one trainable angle shared by both parties.
NamedProtocol learned_s_state(double p);
/// Four-copy protocol for isotropic states; keeps copy 0 when all three
/// measured pairs coincide.
NamedProtocol learned_isotropic_4copy();
/// Two DEJMPS rounds: copies (0,1) and (2,3), then (0,2).
NamedProtocol generalized_dejmps_4copy();

/// Discrimination of |Phi+> from AD(gamma)x AD(gamma) applied to |Phi->.
/// Alice measures after RY(pi/2); Bob rotates by +-theta(gamma) and measures;
/// Bob's bit is the declared hypothesis.
NamedProtocol qsd_protocol(double gamma);
/// Bob's rotation angle used by qsd_protocol.
double qsd_angle(double gamma);
Discrimination qsd_hypotheses(double gamma);
/// Average success probability with equal priors.
double qsd_success_probability(const LoccProtocol& protocol, std::span<const double> params, double gamma);

/// Message M = qubit 0, Alice's half A = 1, Bob's half B = 2.
NamedProtocol standard_teleportation();

// --- distillation evaluation ---------------------------------------------------

/// Runs a k-copy distillation protocol (2k qubits) on copies of `pair` and
/// reports the success mixture's fidelity to |Phi+>. Throws std::domain_error
/// if nothing succeeds.
DistillationResult evaluate_distillation(const LoccProtocol& protocol, std::span<const double> params,
                                         const DensityState& pair);
inline DistillationResult evaluate_distillation(const NamedProtocol& np, const DensityState& pair) {
  return evaluate_distillation(np.protocol, np.params, pair);
}

// --- ansatzes ------------------------------------------------------------------

/// Each party: `depth` layers of [RY, RZ on every qubit] then a CNOT chain.
/// Alice's slots come first. Copies 1..k-1 are measured; success = all zeros.
LoccProtocol distillation_ansatz(int copies, int depth = 2);
/// Alice RZ-RY-RZ then measures; Bob applies an outcome-dependent RZ-RY-RZ and
/// measures. 9 slots.
LoccProtocol qsd_ansatz();
/// Teleportation-shaped: Alice RY, RY, CNOT, RZ-RY on each of her qubits
/// (6 slots), Bob RZ-RY-RZ per outcome (12 slots).
LoccProtocol channel_sim_ansatz();
/// Slots that make channel_sim_ansatz() standard teleportation.
ParameterVector channel_sim_teleport_params();

struct ChannelSimSetup {
  double gamma;
  LossSpec loss;  // ChannelSim
  DensityState resource;
};
/// AD(gamma) target, its Choi state as resource, the default training set.
ChannelSimSetup channel_sim_setup(double gamma);

/// Trains channel_sim_ansatz(). The first restart starts at teleportation
/// unless cfg supplies its own initial points.
NamedProtocol channel_sim_trained(double gamma, const OptimizerConfig& cfg);

struct FidelityStats {
  double mean;
  double stddev;  // population
};

/// Fidelity of the protocol output to target(psi) over `states`; each input
/// is psi on qubit 0 followed by `resource`.
FidelityStats channel_fidelity_stats(const LoccProtocol& protocol, std::span<const double> params,
                                     const DensityState& resource, const QuantumChannel& target,
                                     const std::vector<PureState>& states);

// --- closed forms ----------------------------------------------------------------

/// F = (1 + sqrt(2p - p^2)) / 2, p_succ = p^2 - p^3/2.
DistillationResult learned_s_state_oracle(double p);
/// F = (1+p)^2 / (2 + 2p^2), p_succ = (1+p^2)/2.
DistillationResult dejmps_s_state_oracle(double p);
/// DEJMPS on two isotropic copies.
DistillationResult dejmps_isotropic_oracle(double p);
/// F = (1 - 2p + 9p^2) / (4 - 8p + 12p^2), p_succ = (1 + 4p^3 + 3p^4) / 8.
DistillationResult learned_isotropic_4copy_oracle(double p);
/// F = (1 + 10p^2 + 8p^3 + 13p^4) / (4 + 8p^2 + 20p^4), p_succ = (1 + 2p^2 + 5p^4) / 8.
DistillationResult generalized_dejmps_4copy_oracle(double p);
/// 1/2 + sqrt(2 - 2 gamma + gamma^2) / (2 sqrt 2).
double qsd_oracle(double gamma);

}  // namespace locc
