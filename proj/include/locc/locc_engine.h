#pragma once

// Execution of finite-round LOCC protocols on dense density matrices.
//
// A protocol is a list of rounds. In each round some parties apply local
// circuits, chosen by the classical history so far, and then measure a set of
// their qubits in the computational basis. Measured qubits leave the register.
// The engine walks the resulting outcome tree depth-first and returns every
// terminal branch with its joint probability.
//
// Histories are bit strings over measured qubits in register order. A
// selector key for round r covers the qubits measured before round r; a
// terminal history covers every qubit the protocol measures.

#include "locc/circuit.h"
#include "locc/qmath.h"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace locc {

struct Party {
  std::string label;
  std::vector<int> qubits;
};

class PartyLayout {
 public:
  /// Throws unless the parties' qubit sets are disjoint and cover 0..n-1.
  explicit PartyLayout(std::vector<Party> parties);

  int num_qubits() const { return num_qubits_; }
  const std::vector<Party>& parties() const { return parties_; }
  const Party& party(std::string_view label) const;

 private:
  std::vector<Party> parties_;
  int num_qubits_ = 0;
};

struct LoccRound {
  std::vector<std::string> acting_parties;
  /// One circuit per acting party (same order), keyed by prior history.
  std::map<std::string, std::vector<Circuit>> by_history;
  /// Used when `by_history` has no entry for the current history.
  std::optional<std::vector<Circuit>> any_history;
  std::vector<int> measured_qubits;

  const std::vector<Circuit>& circuits_for(const std::string& history) const;
};

/// Label per terminal history. Distillation uses kSuccess/kFailure; state
/// discrimination stores the index of the declared hypothesis.
using Classifier = std::map<std::string, int>;
inline constexpr int kFailure = 0;
inline constexpr int kSuccess = 1;

/// Builds a complete table over all 2^num_measured terminal histories.
Classifier make_classifier(int num_measured, const std::function<int(std::string_view)>& label);

/// Identifies one parameterized gate inside a protocol.
struct GateLocation {
  std::size_t round = 0;
  std::optional<std::string> history;  // nullopt: the round's any_history entry
  std::size_t party = 0;
  std::size_t gate = 0;
};

class LoccProtocol {
 public:
  LoccProtocol(PartyLayout layout, std::vector<LoccRound> rounds, Classifier classifier, int num_params);

  const PartyLayout& layout() const { return layout_; }
  const std::vector<LoccRound>& rounds() const { return rounds_; }
  const Classifier& classifier() const { return classifier_; }
  int num_params() const { return num_params_; }
  int num_qubits() const { return layout_.num_qubits(); }

  /// All measured qubits, ascending; positions in a terminal history.
  const std::vector<int>& measured_qubits() const { return measured_; }
  /// Qubits never measured, ascending; the register of every branch state.
  std::vector<int> remaining_qubits() const;

  int label(const std::string& history) const;

  std::vector<GateLocation> parameterized_gates() const;
  const GateSpec& gate_at(const GateLocation& loc) const;
  /// Copy with the gate's angle offset by `delta` radians.
  LoccProtocol with_angle_shift(const GateLocation& loc, double delta) const;

 private:
  void validate() const;
  std::vector<Circuit>& circuits_at(const GateLocation& loc);

  PartyLayout layout_;
  std::vector<LoccRound> rounds_;
  Classifier classifier_;
  int num_params_;
  std::vector<int> measured_;
};

struct Branch {
  std::string history;
  double probability = 0.0;
  DensityState state;  // normalized, on OutcomeEnsemble::remaining_qubits
};

struct OutcomeEnsemble {
  std::vector<int> remaining_qubits;  // original register indices
  std::vector<Branch> branches;

  double total_probability() const;
  /// sum of probability * state over branches accepted by `select`.
  ComplexMatrix weighted_sum(const std::function<bool(const Branch&)>& select) const;
};

/// Branches with probability below this are dropped.
inline constexpr double kPruneThreshold = 1e-14;

/// Projective computational-basis measurement of `qubits`.
OutcomeEnsemble measure_computational(const DensityState& rho, std::span<const int> qubits);

OutcomeEnsemble execute(const LoccProtocol& protocol, std::span<const double> params, const DensityState& input);

struct SuccessStatistics {
  double success_probability = 0.0;
  double fidelity = 0.0;
  DensityState merged_state;
};

/// Mixture of the branches labelled kSuccess and its fidelity to `target`.
/// Returns nullopt when no success branch carries probability.
std::optional<SuccessStatistics> success_statistics(const OutcomeEnsemble& ensemble, const Classifier& classifier,
                                                    const DensityState& target);

/// Structured-text (JSON) protocol document; schema in docs/protocol-format.md.
std::string protocol_to_text(const LoccProtocol& protocol);
LoccProtocol protocol_from_text(std::string_view text);

}  // namespace locc
