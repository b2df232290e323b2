#include "locc/locc_engine.h"

#include "json_io.h"

#include <algorithm>
#include <set>

namespace locc {

namespace {

std::string all_bitstrings_error(std::size_t len) {
  return "table must cover all " + std::to_string(std::size_t{1} << len) + " histories of length " +
         std::to_string(len);
}

bool is_bitstring(std::string_view s, std::size_t len) {
  return s.size() == len && std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

std::string bits_of(std::size_t value, std::size_t len) {
  std::string s(len, '0');
  for (std::size_t i = 0; i < len; ++i) {
    if ((value >> (len - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

// History over the given measured qubits (ascending) from recorded outcomes.
std::string history_of(const std::vector<int>& measured, const std::map<int, int>& outcomes) {
  std::string s;
  s.reserve(measured.size());
  for (int q : measured) s.push_back(outcomes.at(q) ? '1' : '0');
  return s;
}

struct Node {
  ComplexMatrix weighted;  // unnormalized; trace is the joint probability
  std::vector<int> alive;  // original index of each matrix qubit, ascending
  std::map<int, int> outcomes;
};

// Splits `node` on the computational-basis outcomes of `qubits` (original
// indices, ascending). Children keep the unmeasured qubits in order.
std::vector<Node> split(const Node& node, const std::vector<int>& qubits) {
  const int n = static_cast<int>(node.alive.size());
  auto bit = [n](int pos) { return std::size_t{1} << (n - 1 - pos); };
  std::vector<std::size_t> measured_bits;
  for (int q : qubits) {
    const auto it = std::find(node.alive.begin(), node.alive.end(), q);
    if (it == node.alive.end()) throw std::invalid_argument("qubit " + std::to_string(q) + " already measured");
    measured_bits.push_back(bit(static_cast<int>(it - node.alive.begin())));
  }
  std::vector<int> rest;
  std::vector<std::size_t> rest_bits;
  for (int pos = 0; pos < n; ++pos) {
    const int q = node.alive[static_cast<std::size_t>(pos)];
    if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) {
      rest.push_back(q);
      rest_bits.push_back(bit(pos));
    }
  }
  const std::size_t dr = std::size_t{1} << rest.size();
  std::vector<std::size_t> base(dr, 0);
  for (std::size_t i = 0; i < dr; ++i) {
    for (std::size_t k = 0; k < rest.size(); ++k) {
      if ((i >> (rest.size() - 1 - k)) & 1U) base[i] |= rest_bits[k];
    }
  }
  std::vector<Node> children;
  for (std::size_t outcome = 0; outcome < (std::size_t{1} << qubits.size()); ++outcome) {
    std::size_t off = 0;
    Node child;
    child.alive = rest;
    child.outcomes = node.outcomes;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
      const int b = static_cast<int>((outcome >> (qubits.size() - 1 - k)) & 1U);
      if (b) off |= measured_bits[k];
      child.outcomes[qubits[k]] = b;
    }
    const auto d = static_cast<Eigen::Index>(dr);
    child.weighted.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        child.weighted(i, j) = node.weighted(static_cast<Eigen::Index>(base[static_cast<std::size_t>(i)] | off),
                                             static_cast<Eigen::Index>(base[static_cast<std::size_t>(j)] | off));
      }
    }
    children.push_back(std::move(child));
  }
  return children;
}

Branch normalize(const Node& node, std::string history) {
  const double p = node.weighted.trace().real();
  ComplexMatrix m = node.weighted / p;
  m = (m + m.adjoint()).eval() * 0.5;
  return Branch{std::move(history), p, DensityState::trusted(std::move(m))};
}

}  // namespace

// --- layout ------------------------------------------------------------------

PartyLayout::PartyLayout(std::vector<Party> parties) : parties_(std::move(parties)) {
  std::set<int> seen;
  std::set<std::string> labels;
  std::size_t count = 0;
  for (const auto& p : parties_) {
    if (!labels.insert(p.label).second) throw std::invalid_argument("duplicate party label " + p.label);
    for (int q : p.qubits) {
      if (q < 0 || !seen.insert(q).second) throw std::invalid_argument("party qubit sets overlap or are negative");
      ++count;
    }
  }
  num_qubits_ = static_cast<int>(count);
  if (!seen.empty() && *seen.rbegin() != num_qubits_ - 1) {
    throw std::invalid_argument("party qubit sets do not cover the register");
  }
}

const Party& PartyLayout::party(std::string_view label) const {
  for (const auto& p : parties_) {
    if (p.label == label) return p;
  }
  throw std::out_of_range("unknown party " + std::string(label));
}

const std::vector<Circuit>& LoccRound::circuits_for(const std::string& history) const {
  if (const auto it = by_history.find(history); it != by_history.end()) return it->second;
  if (any_history) return *any_history;
  throw std::out_of_range("no circuit selected for history '" + history + "'");
}

Classifier make_classifier(int num_measured, const std::function<int(std::string_view)>& label) {
  Classifier c;
  for (std::size_t v = 0; v < (std::size_t{1} << num_measured); ++v) {
    auto h = bits_of(v, static_cast<std::size_t>(num_measured));
    c.emplace(h, label(h));
  }
  return c;
}

// --- protocol ----------------------------------------------------------------

LoccProtocol::LoccProtocol(PartyLayout layout, std::vector<LoccRound> rounds, Classifier classifier, int num_params)
    : layout_(std::move(layout)), rounds_(std::move(rounds)), classifier_(std::move(classifier)),
      num_params_(num_params) {
  std::set<int> measured;
  for (const auto& r : rounds_) measured.insert(r.measured_qubits.begin(), r.measured_qubits.end());
  measured_.assign(measured.begin(), measured.end());
  for (auto& r : rounds_) std::sort(r.measured_qubits.begin(), r.measured_qubits.end());
  validate();
}

void LoccProtocol::validate() const {
  if (num_params_ < 0) throw std::invalid_argument("negative parameter count");
  std::set<int> gone;
  for (std::size_t ri = 0; ri < rounds_.size(); ++ri) {
    const auto& r = rounds_[ri];
    const std::string where = "round " + std::to_string(ri) + ": ";
    std::set<int> owned;
    for (const auto& label : r.acting_parties) {
      const auto& p = layout_.party(label);
      owned.insert(p.qubits.begin(), p.qubits.end());
    }
    auto check_set = [&](const std::vector<Circuit>& circuits) {
      if (circuits.size() != r.acting_parties.size()) throw std::invalid_argument(where + "one circuit per acting party");
      for (std::size_t k = 0; k < circuits.size(); ++k) {
        const auto& c = circuits[k];
        if (c.num_qubits() != num_qubits()) throw std::invalid_argument(where + "circuit register size mismatch");
        if (c.num_params() != num_params_) throw std::invalid_argument(where + "circuit parameter count mismatch");
        const auto& mine = layout_.party(r.acting_parties[k]).qubits;
        for (int q : c.support()) {
          if (std::find(mine.begin(), mine.end(), q) == mine.end()) {
            throw std::invalid_argument(where + "party " + r.acting_parties[k] + " acts on foreign qubit " +
                                        std::to_string(q));
          }
          if (gone.count(q)) throw std::invalid_argument(where + "acts on measured qubit " + std::to_string(q));
        }
      }
    };
    for (const auto& [h, circuits] : r.by_history) {
      if (!is_bitstring(h, gone.size())) throw std::invalid_argument(where + "bad history key '" + h + "'");
      check_set(circuits);
    }
    if (r.any_history) {
      check_set(*r.any_history);
    } else if (r.by_history.size() != (std::size_t{1} << gone.size())) {
      throw std::invalid_argument(where + "circuit " + all_bitstrings_error(gone.size()));
    }
    for (int q : r.measured_qubits) {
      if (!owned.count(q)) throw std::invalid_argument(where + "measures qubit outside the acting parties");
      if (!gone.insert(q).second) throw std::invalid_argument(where + "measures qubit twice");
    }
  }
  for (const auto& [h, label] : classifier_) {
    if (!is_bitstring(h, measured_.size())) throw std::invalid_argument("bad classifier history '" + h + "'");
  }
  if (classifier_.size() != (std::size_t{1} << measured_.size())) {
    throw std::invalid_argument("classifier " + all_bitstrings_error(measured_.size()));
  }
}

std::vector<int> LoccProtocol::remaining_qubits() const {
  std::vector<int> rest;
  for (int q = 0; q < num_qubits(); ++q) {
    if (!std::binary_search(measured_.begin(), measured_.end(), q)) rest.push_back(q);
  }
  return rest;
}

int LoccProtocol::label(const std::string& history) const {
  const auto it = classifier_.find(history);
  if (it == classifier_.end()) throw std::out_of_range("unclassified history '" + history + "'");
  return it->second;
}

std::vector<GateLocation> LoccProtocol::parameterized_gates() const {
  std::vector<GateLocation> out;
  auto scan = [&](std::size_t ri, const std::optional<std::string>& h, const std::vector<Circuit>& circuits) {
    for (std::size_t p = 0; p < circuits.size(); ++p) {
      const auto& gates = circuits[p].gates();
      for (std::size_t g = 0; g < gates.size(); ++g) {
        if (gates[g].angle && gates[g].angle->parameterized()) out.push_back({ri, h, p, g});
      }
    }
  };
  for (std::size_t ri = 0; ri < rounds_.size(); ++ri) {
    for (const auto& [h, circuits] : rounds_[ri].by_history) scan(ri, h, circuits);
    if (rounds_[ri].any_history) scan(ri, std::nullopt, *rounds_[ri].any_history);
  }
  return out;
}

const GateSpec& LoccProtocol::gate_at(const GateLocation& loc) const {
  const auto& r = rounds_.at(loc.round);
  const auto& circuits = loc.history ? r.by_history.at(*loc.history) : r.any_history.value();
  return circuits.at(loc.party).gates().at(loc.gate);
}

std::vector<Circuit>& LoccProtocol::circuits_at(const GateLocation& loc) {
  auto& r = rounds_.at(loc.round);
  return loc.history ? r.by_history.at(*loc.history) : r.any_history.value();
}

LoccProtocol LoccProtocol::with_angle_shift(const GateLocation& loc, double delta) const {
  LoccProtocol copy = *this;
  auto& gate = copy.circuits_at(loc).at(loc.party).mutable_gates().at(loc.gate);
  if (!gate.angle) throw std::invalid_argument("gate has no angle to shift");
  gate.angle->offset += delta;
  return copy;
}

// --- ensembles -----------------------------------------------------------------

double OutcomeEnsemble::total_probability() const {
  double s = 0.0;
  for (const auto& b : branches) s += b.probability;
  return s;
}

ComplexMatrix OutcomeEnsemble::weighted_sum(const std::function<bool(const Branch&)>& select) const {
  const Eigen::Index d = Eigen::Index{1} << remaining_qubits.size();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& b : branches) {
    if (select(b)) sum += b.probability * b.state.matrix();
  }
  return sum;
}

OutcomeEnsemble measure_computational(const DensityState& rho, std::span<const int> qubits) {
  if (qubits.empty()) throw std::invalid_argument("measure_computational: empty qubit set");
  std::vector<int> sorted(qubits.begin(), qubits.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= rho.num_qubits()) throw std::out_of_range("measured qubit out of range");
    if (i > 0 && sorted[i] == sorted[i - 1]) throw std::invalid_argument("measured qubit repeated");
  }
  Node root;
  root.weighted = rho.matrix();
  for (int q = 0; q < rho.num_qubits(); ++q) root.alive.push_back(q);
  OutcomeEnsemble e;
  for (const auto& child : split(root, sorted)) {
    e.remaining_qubits = child.alive;
    if (child.weighted.trace().real() < kPruneThreshold) continue;
    e.branches.push_back(normalize(child, history_of(sorted, child.outcomes)));
  }
  return e;
}

OutcomeEnsemble execute(const LoccProtocol& protocol, std::span<const double> params, const DensityState& input) {
  if (input.num_qubits() != protocol.num_qubits()) throw std::invalid_argument("execute: input register size mismatch");
  if (static_cast<int>(params.size()) != protocol.num_params()) {
    throw std::invalid_argument("execute: expected " + std::to_string(protocol.num_params()) + " parameters, got " +
                                std::to_string(params.size()));
  }
  const int n = protocol.num_qubits();
  std::vector<Node> frontier(1);
  frontier[0].weighted = input.matrix();
  for (int q = 0; q < n; ++q) frontier[0].alive.push_back(q);

  std::vector<int> measured_so_far;
  double pruned = 0.0;
  std::vector<int> position(static_cast<std::size_t>(n));
  for (const auto& round : protocol.rounds()) {
    std::vector<Node> next;
    for (auto& node : frontier) {
      const auto& circuits = round.circuits_for(history_of(measured_so_far, node.outcomes));
      std::fill(position.begin(), position.end(), -1);
      for (std::size_t i = 0; i < node.alive.size(); ++i) position[static_cast<std::size_t>(node.alive[i])] = static_cast<int>(i);
      for (const auto& c : circuits) apply_circuit_in_place(node.weighted, c, params, position);
      if (round.measured_qubits.empty()) {
        next.push_back(std::move(node));
        continue;
      }
      for (auto& child : split(node, round.measured_qubits)) {
        const double p = child.weighted.trace().real();
        if (p < kPruneThreshold) {
          pruned += std::max(p, 0.0);
          continue;
        }
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
    measured_so_far.insert(measured_so_far.end(), round.measured_qubits.begin(), round.measured_qubits.end());
    std::sort(measured_so_far.begin(), measured_so_far.end());
  }
  if (pruned > 1e-12) throw std::logic_error("execute: pruned probability mass " + std::to_string(pruned));

  OutcomeEnsemble e;
  e.remaining_qubits = protocol.remaining_qubits();
  for (const auto& node : frontier) e.branches.push_back(normalize(node, history_of(protocol.measured_qubits(), node.outcomes)));
  return e;
}

std::optional<SuccessStatistics> success_statistics(const OutcomeEnsemble& ensemble, const Classifier& classifier,
                                                    const DensityState& target) {
  auto is_success = [&](const Branch& b) {
    const auto it = classifier.find(b.history);
    if (it == classifier.end()) throw std::out_of_range("unclassified history '" + b.history + "'");
    return it->second == kSuccess;
  };
  ComplexMatrix merged = ensemble.weighted_sum(is_success);
  const double p = merged.trace().real();
  if (p < kPruneThreshold) return std::nullopt;
  merged /= p;
  DensityState state = DensityState::trusted(std::move(merged));
  const double f = state_fidelity(target, state);
  return SuccessStatistics{p, f, std::move(state)};
}

// --- text form -------------------------------------------------------------------

namespace {

nlohmann::json circuits_to_json(const std::vector<Circuit>& circuits) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : circuits) j.push_back(detail::circuit_to_json(c));
  return j;
}

std::vector<Circuit> circuits_from_json(const nlohmann::json& j) {
  std::vector<Circuit> out;
  for (const auto& jc : j) out.push_back(detail::circuit_from_json(jc));
  return out;
}

constexpr const char* kAnyHistory = "*";

}  // namespace

std::string protocol_to_text(const LoccProtocol& protocol) {
  nlohmann::json parties = nlohmann::json::array();
  for (const auto& p : protocol.layout().parties()) parties.push_back({{"label", p.label}, {"qubits", p.qubits}});
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : protocol.rounds()) {
    nlohmann::json circuits = nlohmann::json::object();
    for (const auto& [h, cs] : r.by_history) circuits[h] = circuits_to_json(cs);
    if (r.any_history) circuits[kAnyHistory] = circuits_to_json(*r.any_history);
    rounds.push_back({{"acting", r.acting_parties}, {"measure", r.measured_qubits}, {"circuits", std::move(circuits)}});
  }
  nlohmann::json classifier = nlohmann::json::object();
  for (const auto& [h, label] : protocol.classifier()) classifier[h] = label;
  const nlohmann::json doc{{"num_params", protocol.num_params()},
                           {"parties", std::move(parties)},
                           {"rounds", std::move(rounds)},
                           {"classifier", std::move(classifier)}};
  return doc.dump(2) + "\n";
}

LoccProtocol protocol_from_text(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    std::vector<Party> parties;
    for (const auto& jp : doc.at("parties")) {
      parties.push_back({jp.at("label").get<std::string>(), jp.at("qubits").get<std::vector<int>>()});
    }
    std::vector<LoccRound> rounds;
    for (const auto& jr : doc.at("rounds")) {
      LoccRound r;
      r.acting_parties = jr.at("acting").get<std::vector<std::string>>();
      r.measured_qubits = jr.value("measure", std::vector<int>{});
      for (const auto& [h, jc] : jr.at("circuits").items()) {
        if (h == kAnyHistory) {
          r.any_history = circuits_from_json(jc);
        } else {
          r.by_history.emplace(h, circuits_from_json(jc));
        }
      }
      rounds.push_back(std::move(r));
    }
    Classifier classifier;
    for (const auto& [h, label] : doc.at("classifier").items()) classifier.emplace(h, label.get<int>());
    return LoccProtocol(PartyLayout(std::move(parties)), std::move(rounds), std::move(classifier),
                        doc.value("num_params", 0));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed protocol document: ") + e.what());
  }
}

}  // namespace locc
