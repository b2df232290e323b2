#include "locc/circuit.h"

#include "json_io.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

namespace locc {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 6> kGateNames{{
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::H, "H"},
    {GateKind::X, "X"},
    {GateKind::CNOT, "CNOT"},
}};

std::size_t arity(GateKind kind) { return kind == GateKind::CNOT ? 2 : 1; }

}  // namespace

std::string_view gate_name(GateKind kind) {
  for (const auto& [k, name] : kGateNames) {
    if (k == kind) return name;
  }
  return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kGateNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

bool is_rotation(GateKind kind) { return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ; }

double Angle::resolve(std::span<const double> params) const {
  if (!slot) return offset;
  if (*slot < 0 || static_cast<std::size_t>(*slot) >= params.size()) {
    throw std::out_of_range("parameter slot " + std::to_string(*slot) + " is unbound");
  }
  return scale * params[static_cast<std::size_t>(*slot)] + offset;
}

ComplexMatrix gate_matrix(const GateSpec& gate, std::span<const double> params) {
  using namespace std::complex_literals;
  ComplexMatrix m(2, 2);
  if (is_rotation(gate.kind)) {
    if (!gate.angle) throw std::invalid_argument("rotation gate without an angle");
    const double half = gate.angle->resolve(params) / 2.0;
    const double c = std::cos(half);
    const double s = std::sin(half);
    switch (gate.kind) {
      case GateKind::RX: m << c, -1i * s, -1i * s, c; break;
      case GateKind::RY: m << c, -s, s, c; break;
      default: m << std::exp(-1i * half), 0.0, 0.0, std::exp(1i * half); break;
    }
    return m;
  }
  switch (gate.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      m << r, r, r, -r;
      return m;
    }
    case GateKind::X: m << 0.0, 1.0, 1.0, 0.0; return m;
    default: {
      ComplexMatrix cx = ComplexMatrix::Zero(4, 4);
      cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
      return cx;
    }
  }
}

Circuit::Circuit(int num_qubits, int num_params) : num_qubits_(num_qubits), num_params_(num_params) {
  if (num_qubits < 0 || num_params < 0) throw std::invalid_argument("negative circuit size");
}

Circuit& Circuit::add(GateSpec gate) {
  const std::string name(gate_name(gate.kind));
  if (gate.targets.size() != arity(gate.kind)) {
    throw std::invalid_argument(name + " takes " + std::to_string(arity(gate.kind)) + " target(s)");
  }
  for (int t : gate.targets) {
    if (t < 0 || t >= num_qubits_) throw std::out_of_range(name + " target " + std::to_string(t) + " out of range");
  }
  if (gate.kind == GateKind::CNOT && gate.targets[0] == gate.targets[1]) {
    throw std::invalid_argument("CNOT control and target coincide");
  }
  if (is_rotation(gate.kind) != gate.angle.has_value()) {
    throw std::invalid_argument(is_rotation(gate.kind) ? name + " needs an angle" : name + " takes no angle");
  }
  if (gate.angle && gate.angle->slot && (*gate.angle->slot < 0 || *gate.angle->slot >= num_params_)) {
    throw std::out_of_range(name + " parameter slot " + std::to_string(*gate.angle->slot) + " >= num_params " +
                            std::to_string(num_params_));
  }
  gates_.push_back(std::move(gate));
  return *this;
}

std::vector<int> Circuit::support() const {
  std::set<int> qubits;
  for (const auto& g : gates_) qubits.insert(g.targets.begin(), g.targets.end());
  return {qubits.begin(), qubits.end()};
}

void apply_circuit_in_place(ComplexMatrix& m, const Circuit& circuit, std::span<const double> params,
                            std::span<const int> position) {
  std::vector<int> mapped;
  for (const auto& g : circuit.gates()) {
    mapped.clear();
    for (int t : g.targets) {
      const int p = (t >= 0 && static_cast<std::size_t>(t) < position.size()) ? position[t] : -1;
      if (p < 0) throw std::invalid_argument("gate acts on qubit " + std::to_string(t) + " which is not present");
      mapped.push_back(p);
    }
    const ComplexMatrix u = gate_matrix(g, params);
    apply_left(m, u, mapped);
    apply_right_adjoint(m, u, mapped);
  }
}

DensityState apply_circuit(const Circuit& circuit, std::span<const double> params, const DensityState& rho) {
  if (rho.num_qubits() != circuit.num_qubits()) throw std::invalid_argument("circuit/state register size mismatch");
  if (static_cast<int>(params.size()) != circuit.num_params()) {
    throw std::invalid_argument("expected " + std::to_string(circuit.num_params()) + " parameters, got " +
                                std::to_string(params.size()));
  }
  std::vector<int> identity(static_cast<std::size_t>(circuit.num_qubits()));
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  ComplexMatrix m = rho.matrix();
  apply_circuit_in_place(m, circuit, params, identity);
  return DensityState::trusted(std::move(m));
}

Circuit inverse(const Circuit& circuit) {
  Circuit inv(circuit.num_qubits(), circuit.num_params());
  for (auto it = circuit.gates().rbegin(); it != circuit.gates().rend(); ++it) {
    GateSpec g = *it;
    if (g.angle) {
      g.angle->scale = -g.angle->scale;
      g.angle->offset = -g.angle->offset;
    }
    inv.add(std::move(g));
  }
  return inv;
}

// --- text form ---------------------------------------------------------------

namespace detail {

nlohmann::json circuit_to_json(const Circuit& circuit) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : circuit.gates()) {
    nlohmann::json jg{{"kind", gate_name(g.kind)}, {"targets", g.targets}};
    if (g.angle) {
      if (g.angle->slot) {
        jg["param"] = *g.angle->slot;
        if (g.angle->scale != 1.0) jg["scale"] = g.angle->scale;
        if (g.angle->offset != 0.0) jg["offset"] = g.angle->offset;
      } else {
        jg["angle"] = g.angle->offset;
      }
    }
    gates.push_back(std::move(jg));
  }
  return {{"num_qubits", circuit.num_qubits()}, {"num_params", circuit.num_params()}, {"gates", std::move(gates)}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c(j.at("num_qubits").get<int>(), j.value("num_params", 0));
  for (const auto& jg : j.at("gates")) {
    GateSpec g{gate_kind_from_name(jg.at("kind").get<std::string>()), jg.at("targets").get<std::vector<int>>(),
               std::nullopt};
    if (jg.contains("param")) {
      g.angle = Angle::param(jg["param"].get<int>(), jg.value("scale", 1.0), jg.value("offset", 0.0));
    } else if (jg.contains("angle")) {
      g.angle = Angle::fixed(jg["angle"].get<double>());
    }
    c.add(std::move(g));
  }
  return c;
}

}  // namespace detail

std::string circuit_to_text(const Circuit& circuit) { return detail::circuit_to_json(circuit).dump(2) + "\n"; }

Circuit circuit_from_text(std::string_view text) {
  try {
    return detail::circuit_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed circuit document: ") + e.what());
  }
}

}  // namespace locc
