#include "locc/trainer.h"

#include "locc/parallel.h"
#include "number_format.h"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace locc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ComplexMatrix scalar(double v) { return ComplexMatrix::Constant(1, 1, Complex(v, 0.0)); }

double probability_with_label(const OutcomeEnsemble& e, const LoccProtocol& protocol, int label) {
  double p = 0.0;
  for (const auto& b : e.branches) {
    if (protocol.label(b.history) == label) p += b.probability;
  }
  return p;
}

DensityState channel_input(const DensityState& psi, const DensityState& resource) { return tensor(psi, resource); }

// Matrices that depend linearly on the protocol's action for a fixed input.
std::vector<ComplexMatrix> linear_outputs(const LossSpec& spec, const LoccProtocol& protocol,
                                          std::span<const double> params) {
  return std::visit(
      Overloaded{
          [&](const DistillInfidelity& s) {
            const auto e = execute(protocol, params, s.input);
            return std::vector<ComplexMatrix>{
                e.weighted_sum([&](const Branch& b) { return protocol.label(b.history) == kSuccess; })};
          },
          [&](const Discrimination& s) {
            const auto e0 = execute(protocol, params, s.hypothesis0);
            const auto e1 = execute(protocol, params, s.hypothesis1);
            return std::vector<ComplexMatrix>{scalar(probability_with_label(e0, protocol, 1)),
                                              scalar(probability_with_label(e1, protocol, 0))};
          },
          [&](const ChannelSim& s) {
            std::vector<ComplexMatrix> out;
            for (const auto& psi : s.training_set) {
              const auto e = execute(protocol, params, channel_input(psi, s.resource));
              out.push_back(e.weighted_sum([](const Branch&) { return true; }));
            }
            return out;
          },
          [&](const Expectation& s) {
            const auto e = execute(protocol, params, s.input);
            double v = 0.0;
            for (const auto& b : e.branches) {
              const int label = protocol.label(b.history);
              if (label < 0 || static_cast<std::size_t>(label) >= s.label_weights.size()) {
                throw std::out_of_range("Expectation: no weight for label " + std::to_string(label));
              }
              v += b.probability * s.label_weights[static_cast<std::size_t>(label)];
            }
            return std::vector<ComplexMatrix>{scalar(v)};
          },
      },
      spec);
}

DensityState normalized(const ComplexMatrix& w) {
  ComplexMatrix m = w / w.trace().real();
  m = (m + m.adjoint()).eval() * 0.5;
  return DensityState::trusted(std::move(m));
}

struct LossWithCotangents {
  LossValue value;
  std::vector<ComplexMatrix> cotangents;  // dL = sum_i Re Tr(G_i dW_i)
};

LossWithCotangents loss_from_outputs(const LossSpec& spec, const std::vector<ComplexMatrix>& w, bool want_cotangents) {
  return std::visit(
      Overloaded{
          [&](const DistillInfidelity& s) {
            LossWithCotangents r;
            const double t = w[0].trace().real();
            if (t < kPruneThreshold) {
              r.value = {1.0, true};
              r.cotangents.push_back(ComplexMatrix::Zero(w[0].rows(), w[0].cols()));
              return r;
            }
            const DensityState sigma = normalized(w[0]);
            r.value = {1.0 - state_fidelity(s.target, sigma), false};
            if (want_cotangents) {
              // sigma = W / Tr W, so dsigma = (dW - sigma Tr dW) / t.
              const ComplexMatrix g = fidelity_gradient(s.target, sigma);
              const double g_sigma = (g * sigma.matrix()).trace().real();
              ComplexMatrix id = ComplexMatrix::Identity(g.rows(), g.cols());
              r.cotangents.push_back(-(g - g_sigma * id) / t);
            }
            return r;
          },
          [&](const Discrimination&) {
            LossWithCotangents r;
            r.value = {w[0](0, 0).real() + w[1](0, 0).real(), false};
            r.cotangents = {scalar(1.0), scalar(1.0)};
            return r;
          },
          [&](const ChannelSim& s) {
            LossWithCotangents r;
            double total = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
              const DensityState want = apply_channel(s.target, s.training_set[i]);
              const DensityState got = normalized(w[i]);
              total -= state_fidelity(want, got);
              if (want_cotangents) r.cotangents.push_back(-fidelity_gradient(want, got));
            }
            r.value = {total, false};
            return r;
          },
          [&](const Expectation&) {
            LossWithCotangents r;
            r.value = {w[0](0, 0).real(), false};
            r.cotangents = {scalar(1.0)};
            return r;
          },
      },
      spec);
}

void check_spec(const LossSpec& spec) {
  if (const auto* s = std::get_if<ChannelSim>(&spec)) {
    if (s->target.input_qubits() != 1) throw std::invalid_argument("ChannelSim: target must be a single-qubit channel");
    for (const auto& psi : s->training_set) {
      if (psi.num_qubits() != 1) throw std::invalid_argument("ChannelSim: training states must be single-qubit");
    }
    check_training_set(s->training_set);
  }
}

}  // namespace

void check_training_set(const std::vector<DensityState>& states) {
  if (states.empty()) throw std::invalid_argument("training set is empty");
  const auto n = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& a = states[static_cast<std::size_t>(i)].matrix();
      const auto& b = states[static_cast<std::size_t>(j)].matrix();
      if (a.rows() != b.rows()) throw std::invalid_argument("training states differ in dimension");
      gram(i, j) = (a.adjoint() * b).trace().real();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double top = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 1e-10 * top) {
    throw std::invalid_argument("training states are linearly dependent");
  }
}

std::vector<DensityState> default_channel_training_set() {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector plus(2), plus_i(2);
  plus << r, r;
  plus_i << r, Complex(0.0, r);
  return {PureState::basis("0"), PureState::basis("1"), PureState(plus), PureState(plus_i)};
}

LossValue loss_eval(const LossSpec& spec, const LoccProtocol& protocol, std::span<const double> params) {
  check_spec(spec);
  return loss_from_outputs(spec, linear_outputs(spec, protocol, params), false).value;
}

std::vector<double> gradient_parameter_shift(const LossSpec& spec, const LoccProtocol& protocol,
                                             std::span<const double> params) {
  check_spec(spec);
  std::vector<double> grad(params.size(), 0.0);
  const auto gates = protocol.parameterized_gates();
  for (const auto& loc : gates) {
    if (!is_rotation(protocol.gate_at(loc).kind)) {
      throw std::invalid_argument("shift rule needs RX/RY/RZ, got " + std::string(gate_name(protocol.gate_at(loc).kind)));
    }
  }
  if (gates.empty()) return grad;
  const auto base = loss_from_outputs(spec, linear_outputs(spec, protocol, params), true);
  if (base.value.no_success) return grad;
  constexpr double kShift = std::numbers::pi / 2;
  for (const auto& loc : gates) {
    const Angle& angle = *protocol.gate_at(loc).angle;
    const auto plus = linear_outputs(spec, protocol.with_angle_shift(loc, kShift), params);
    const auto minus = linear_outputs(spec, protocol.with_angle_shift(loc, -kShift), params);
    double d = 0.0;
    for (std::size_t i = 0; i < plus.size(); ++i) {
      const ComplexMatrix dw = 0.5 * (plus[i] - minus[i]);
      d += base.cotangents[i].transpose().cwiseProduct(dw).sum().real();
    }
    grad[static_cast<std::size_t>(*angle.slot)] += angle.scale * d;
  }
  return grad;
}

std::vector<double> gradient_finite_difference(const LossSpec& spec, const LoccProtocol& protocol,
                                               std::span<const double> params, double h) {
  std::vector<double> x(params.begin(), params.end());
  std::vector<double> grad(params.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const double up = loss_eval(spec, protocol, x).value;
    x[j] = keep - h;
    const double down = loss_eval(spec, protocol, x).value;
    x[j] = keep;
    grad[j] = (up - down) / (2 * h);
  }
  return grad;
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (convergence_window < 1) throw std::invalid_argument("convergence_window must be at least 1");
}

const RestartResult& TrainingTrace::best() const {
  if (best_restart < 0) throw std::runtime_error("training failed: every restart diverged");
  return restarts[static_cast<std::size_t>(best_restart)];
}

RestartResult minimize(const std::function<double(std::span<const double>)>& loss,
                       const std::function<std::vector<double>(std::span<const double>)>& gradient,
                       ParameterVector start, const OptimizerConfig& cfg, std::vector<TraceEntry>* trace,
                       int restart_index) {
  cfg.validate();
  RestartResult r;
  ParameterVector x = std::move(start);
  r.initial_loss = loss(x);
  r.loss = r.initial_loss;
  r.params = x;
  if (std::isnan(r.initial_loss)) {
    r.aborted = true;
    return r;
  }
  std::vector<double> m(x.size(), 0.0), v(x.size(), 0.0);
  double prev = r.initial_loss;
  int stable = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto g = gradient(x);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (cfg.kind == OptimizerKind::GradientDescent) {
        x[j] -= cfg.learning_rate * g[j];
        continue;
      }
      m[j] = cfg.beta1 * m[j] + (1 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1 - cfg.beta2) * g[j] * g[j];
      const double mh = m[j] / (1 - std::pow(cfg.beta1, it));
      const double vh = v[j] / (1 - std::pow(cfg.beta2, it));
      x[j] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
    }
    const double l = loss(x);
    r.iterations = it;
    if (trace) trace->push_back({restart_index, it, l});
    if (std::isnan(l)) {
      r.aborted = true;
      break;
    }
    if (l < r.loss) {
      r.loss = l;
      r.params = x;
    }
    stable = std::abs(l - prev) < cfg.convergence_tol ? stable + 1 : 0;
    prev = l;
    if (stable >= cfg.convergence_window) break;
  }
  return r;
}

TrainingTrace train(const LossSpec& spec, const LoccProtocol& protocol, const OptimizerConfig& cfg) {
  cfg.validate();
  check_spec(spec);
  const auto n = static_cast<std::size_t>(protocol.num_params());
  for (const auto& p : cfg.initial_points) {
    if (p.size() != n) throw std::invalid_argument("initial point has the wrong parameter count");
  }
  const auto restarts = static_cast<std::size_t>(cfg.restarts);
  std::vector<RestartResult> results(restarts);
  std::vector<std::vector<TraceEntry>> traces(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    ParameterVector start;
    if (r < cfg.initial_points.size()) {
      start = cfg.initial_points[r];
    } else {
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
      start.resize(n);
      for (auto& a : start) a = angle(rng);
    }
    results[r] = minimize([&](std::span<const double> x) { return loss_eval(spec, protocol, x).value; },
                          [&](std::span<const double> x) { return gradient_parameter_shift(spec, protocol, x); },
                          std::move(start), cfg, &traces[r], static_cast<int>(r));
  });
  TrainingTrace out;
  for (std::size_t r = 0; r < restarts; ++r) {
    out.entries.insert(out.entries.end(), traces[r].begin(), traces[r].end());
    // An aborted restart still reports its best finite point.
    if (!std::isnan(results[r].loss)) {
      if (out.best_restart < 0 || results[r].loss < results[static_cast<std::size_t>(out.best_restart)].loss) {
        out.best_restart = static_cast<int>(r);
      }
    }
  }
  out.restarts = std::move(results);
  return out;
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
  out << "restart,iteration,loss\n";
  for (const auto& e : trace.entries) {
    out << e.restart << ',' << e.iteration << ',' << detail::format_double(e.loss) << '\n';
  }
}

}  // namespace locc
