#pragma once

// Variational training of LoccProtocol parameters.
//
// Every loss here is a smooth function of a few matrices that depend
// linearly on the protocol's action (for example the unnormalized success
// mixture). Gradients apply the two-term shift rule to those matrices, one
// gate occurrence at a time, and chain through the loss. For losses that are
// themselves linear this is the textbook rule [L(t+pi/2) - L(t-pi/2)] / 2.

#include "locc/channels.h"
#include "locc/locc_engine.h"

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace locc {

/// 1 - fidelity of the kSuccess mixture to `target`.
struct DistillInfidelity {
  DensityState input;
  DensityState target;
};

/// P(declare 1 | hypothesis0) + P(declare 0 | hypothesis1); the classifier
/// label of a terminal history is the declared hypothesis.
struct Discrimination {
  DensityState hypothesis0;
  DensityState hypothesis1;
};

/// -sum over the training set of F(target(psi), protocol output). Each input
/// is psi on qubit 0 followed by `resource`; the output is the outcome-averaged
/// state on the protocol's remaining qubits.
struct ChannelSim {
  QuantumChannel target;
  std::vector<DensityState> training_set;
  DensityState resource;
};

/// sum over branches of probability * weights[label]. Mostly for tests.
struct Expectation {
  DensityState input;
  std::vector<double> label_weights;
};

using LossSpec = std::variant<DistillInfidelity, Discrimination, ChannelSim, Expectation>;

/// Throws unless the states are linearly independent (Gram matrix rank).
void check_training_set(const std::vector<DensityState>& states);

/// |0>, |1>, |+>, |+i>.
std::vector<DensityState> default_channel_training_set();

struct LossValue {
  double value = 0.0;
  bool no_success = false;  // distillation only: loss fixed at 1
};

LossValue loss_eval(const LossSpec& spec, const LoccProtocol& protocol, std::span<const double> params);

/// Exact gradient via the shift rule (see header comment). Throws
/// std::invalid_argument if a parameterized gate is not RX/RY/RZ.
std::vector<double> gradient_parameter_shift(const LossSpec& spec, const LoccProtocol& protocol,
                                             std::span<const double> params);

/// Central differences with step h.
std::vector<double> gradient_finite_difference(const LossSpec& spec, const LoccProtocol& protocol,
                                               std::span<const double> params, double h = 1e-5);

enum class OptimizerKind { Adam, GradientDescent };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.1;
  int max_iters = 300;
  double convergence_tol = 1e-9;
  int convergence_window = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  int restarts = 8;
  /// Starting points used by the first restarts instead of random draws.
  std::vector<ParameterVector> initial_points;

  void validate() const;
};

struct TraceEntry {
  int restart;
  int iteration;
  double loss;
};

struct RestartResult {
  ParameterVector params;  // best seen in this restart
  double loss = 0.0;
  double initial_loss = 0.0;
  int iterations = 0;
  bool aborted = false;  // loss became NaN
};

struct TrainingTrace {
  std::vector<TraceEntry> entries;
  std::vector<RestartResult> restarts;
  int best_restart = -1;  // -1 when every restart aborted

  const RestartResult& best() const;
  const ParameterVector& final_params() const { return best().params; }
  double best_loss() const { return best().loss; }
};

/// Runs cfg.restarts independent descents and keeps the best. Bit-identical
/// for a fixed seed; restart r draws from std::seed_seq{seed, r}.
TrainingTrace train(const LossSpec& spec, const LoccProtocol& protocol, const OptimizerConfig& cfg);

/// Minimizes a plain function with a supplied gradient using the same loop.
/// Used by tests and small one-off problems.
RestartResult minimize(const std::function<double(std::span<const double>)>& loss,
                       const std::function<std::vector<double>(std::span<const double>)>& gradient,
                       ParameterVector start, const OptimizerConfig& cfg, std::vector<TraceEntry>* trace = nullptr,
                       int restart_index = 0);

/// CSV with header "restart,iteration,loss".
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);

}  // namespace locc
