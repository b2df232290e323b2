#pragma once

// Parameterized gate circuits over a qubit register.
//
// Rotations use the half-angle convention RX(t) = exp(-i t X / 2) and likewise
// for RY and RZ. A rotation angle is either fixed or bound to a parameter slot
// as scale * params[slot] + offset, so one trainable angle can drive several
// gates (possibly with opposite signs).

#include "locc/qmath.h"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace locc {

using ParameterVector = std::vector<double>;

enum class GateKind { RX, RY, RZ, H, X, CNOT };

std::string_view gate_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);
bool is_rotation(GateKind kind);

struct Angle {
  std::optional<int> slot;
  double scale = 1.0;
  double offset = 0.0;

  static Angle fixed(double radians) { return Angle{std::nullopt, 1.0, radians}; }
  static Angle param(int slot, double scale = 1.0, double offset = 0.0) { return Angle{slot, scale, offset}; }

  bool parameterized() const { return slot.has_value(); }
  /// Throws std::out_of_range for an unbound slot.
  double resolve(std::span<const double> params) const;

  bool operator==(const Angle&) const = default;
};

struct GateSpec {
  GateKind kind;
  std::vector<int> targets;  // CNOT: {control, target}
  std::optional<Angle> angle;

  static GateSpec rx(int q, Angle a) { return {GateKind::RX, {q}, a}; }
  static GateSpec ry(int q, Angle a) { return {GateKind::RY, {q}, a}; }
  static GateSpec rz(int q, Angle a) { return {GateKind::RZ, {q}, a}; }
  static GateSpec h(int q) { return {GateKind::H, {q}, std::nullopt}; }
  static GateSpec x(int q) { return {GateKind::X, {q}, std::nullopt}; }
  static GateSpec cnot(int control, int target) { return {GateKind::CNOT, {control, target}, std::nullopt}; }

  bool operator==(const GateSpec&) const = default;
};

/// Unitary of a single gate; parameterized angles are read from `params`.
ComplexMatrix gate_matrix(const GateSpec& gate, std::span<const double> params = {});

class Circuit {
 public:
  explicit Circuit(int num_qubits, int num_params = 0);

  /// Validates target ranges, arity and angle presence before appending.
  Circuit& add(GateSpec gate);

  Circuit& rx(int q, Angle a) { return add(GateSpec::rx(q, a)); }
  Circuit& ry(int q, Angle a) { return add(GateSpec::ry(q, a)); }
  Circuit& rz(int q, Angle a) { return add(GateSpec::rz(q, a)); }
  Circuit& h(int q) { return add(GateSpec::h(q)); }
  Circuit& x(int q) { return add(GateSpec::x(q)); }
  Circuit& cnot(int control, int target) { return add(GateSpec::cnot(control, target)); }

  int num_qubits() const { return num_qubits_; }
  int num_params() const { return num_params_; }
  const std::vector<GateSpec>& gates() const { return gates_; }
  std::vector<GateSpec>& mutable_gates() { return gates_; }
  bool empty() const { return gates_.empty(); }

  /// Qubits touched by any gate, ascending.
  std::vector<int> support() const;

  bool operator==(const Circuit&) const = default;

 private:
  int num_qubits_;
  int num_params_;
  std::vector<GateSpec> gates_;
};

/// U rho U^dagger for the composed circuit.
DensityState apply_circuit(const Circuit& circuit, std::span<const double> params, const DensityState& rho);

/// Applies the circuit to `m` in place. Gate target q is mapped to matrix
/// qubit `position[q]`; a negative position throws (the qubit is gone).
void apply_circuit_in_place(ComplexMatrix& m, const Circuit& circuit, std::span<const double> params,
                            std::span<const int> position);

/// Gate-wise inverse: reversed order, negated angles.
Circuit inverse(const Circuit& circuit);

/// Structured-text (JSON) form: {"num_qubits", "num_params", "gates": [...]}.
std::string circuit_to_text(const Circuit& circuit);
Circuit circuit_from_text(std::string_view text);

}  // namespace locc
