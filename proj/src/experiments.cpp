#include "locc/experiments.h"

#include "locc/parallel.h"
#include "locc/protocols.h"
#include "locc/trainer.h"
#include "number_format.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace locc {

namespace {

struct NameEntry {
  ExperimentId id;
  const char* name;
};
constexpr NameEntry kNames[] = {{ExperimentId::SDistill, "s-distill"},
                                {ExperimentId::IsoDistill, "iso-distill"},
                                {ExperimentId::Qsd, "qsd"},
                                {ExperimentId::ChannelSim, "channel-sim"},
                                {ExperimentId::Train, "train"}};

double parse_double(std::string_view s) {
  std::size_t used = 0;
  const std::string str(s);
  const double v = std::stod(str, &used);
  if (used != str.size()) throw std::invalid_argument("bad number '" + str + "'");
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::filesystem::path> emit(const ExperimentConfig& cfg, const std::string& stem, const Table& table,
                                        std::string_view title) {
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<std::filesystem::path> files{cfg.out_dir / (stem + ".csv")};
  write_file(files.back(), table_to_csv(table));
  if (cfg.svg) {
    files.push_back(cfg.out_dir / (stem + ".svg"));
    write_file(files.back(), table_to_svg(table, title));
  }
  return files;
}

OptimizerConfig optimizer_for(const ExperimentConfig& cfg) {
  OptimizerConfig o;
  o.seed = cfg.seed;
  o.restarts = cfg.restarts;
  o.max_iters = cfg.max_iters;
  return o;
}

Table distillation_table(const std::vector<double>& ps, bool isotropic_input) {
  Table t;
  t.rows.resize(ps.size());
  const NamedProtocol baseline = isotropic_input ? generalized_dejmps_4copy() : dejmps();
  if (isotropic_input) {
    t.columns = {"p", "F_learned", "psucc_learned", "F_gen_dejmps", "psucc_gen_dejmps"};
  } else {
    t.columns = {"p", "F_learned", "psucc_learned", "F_dejmps", "psucc_dejmps"};
  }
  parallel_for(ps.size(), [&](std::size_t i) {
    const double p = ps[i];
    const DensityState pair = isotropic_input ? isotropic(p) : s_state(p);
    const auto ours = evaluate_distillation(isotropic_input ? learned_isotropic_4copy() : learned_s_state(p), pair);
    const auto theirs = evaluate_distillation(baseline, pair);
    t.rows[i] = {p, ours.fidelity, ours.success_probability, theirs.fidelity, theirs.success_probability};
  });
  return t;
}

Table qsd_table(const std::vector<double>& gammas) {
  Table t;
  t.columns = {"gamma", "psucc_optimized", "psucc_noiseless_protocol"};
  t.rows.resize(gammas.size());
  const NamedProtocol noiseless = qsd_protocol(0.0);
  parallel_for(gammas.size(), [&](std::size_t i) {
    const double g = gammas[i];
    const NamedProtocol tuned = qsd_protocol(g);
    t.rows[i] = {g, qsd_success_probability(tuned.protocol, tuned.params, g),
                 qsd_success_probability(noiseless.protocol, noiseless.params, g)};
  });
  return t;
}

Table channel_sim_table(const ExperimentConfig& cfg) {
  Table t;
  t.columns = {"gamma", "mean_fid_trained", "mean_fid_teleport", "stddev_trained", "stddev_teleport"};
  const auto states = haar_states(cfg.samples, cfg.seed);
  const NamedProtocol tele = standard_teleportation();
  for (double g : cfg.points()) {
    const auto setup = channel_sim_setup(g);
    const auto& target = std::get<ChannelSim>(setup.loss).target;
    const NamedProtocol trained = channel_sim_trained(g, optimizer_for(cfg));
    const auto ours = channel_fidelity_stats(trained.protocol, trained.params, setup.resource, target, states);
    const auto base = channel_fidelity_stats(tele.protocol, tele.params, setup.resource, target, states);
    t.rows.push_back({g, ours.mean, base.mean, ours.stddev, base.stddev});
  }
  return t;
}

std::vector<std::filesystem::path> run_training(const ExperimentConfig& cfg) {
  const double v = cfg.task_value;
  const OptimizerConfig opt = optimizer_for(cfg);
  Table summary;
  TrainingTrace trace;
  switch (cfg.task) {
    case TrainTask::Distill: {
      const LoccProtocol ansatz = distillation_ansatz(2);
      trace = train(DistillInfidelity{n_copies(s_state(v), 2), bell_state(BellIndex::PhiPlus)}, ansatz, opt);
      const auto got = evaluate_distillation(ansatz, trace.final_params(), s_state(v));
      const auto want = learned_s_state_oracle(v);
      summary.columns = {"p", "best_loss", "fidelity", "psucc", "fidelity_reference"};
      summary.rows.push_back({v, trace.best_loss(), got.fidelity, got.success_probability, want.fidelity});
      break;
    }
    case TrainTask::Qsd: {
      const LoccProtocol ansatz = qsd_ansatz();
      trace = train(qsd_hypotheses(v), ansatz, opt);
      summary.columns = {"gamma", "best_loss", "psucc", "psucc_reference"};
      summary.rows.push_back(
          {v, trace.best_loss(), qsd_success_probability(ansatz, trace.final_params(), v), qsd_oracle(v)});
      break;
    }
    case TrainTask::ChannelSim: {
      const auto setup = channel_sim_setup(v);
      OptimizerConfig warm = opt;
      warm.initial_points.push_back(channel_sim_teleport_params());
      const LoccProtocol ansatz = channel_sim_ansatz();
      trace = train(setup.loss, ansatz, warm);
      const auto states = haar_states(cfg.samples, cfg.seed);
      const auto& target = std::get<ChannelSim>(setup.loss).target;
      const auto tele = standard_teleportation();
      summary.columns = {"gamma", "best_loss", "mean_fid_trained", "mean_fid_teleport"};
      summary.rows.push_back(
          {v, trace.best_loss(),
           channel_fidelity_stats(ansatz, trace.final_params(), setup.resource, target, states).mean,
           channel_fidelity_stats(tele.protocol, tele.params, setup.resource, target, states).mean});
      break;
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  std::vector<std::filesystem::path> files{cfg.out_dir / "train_trace.csv"};
  write_file(files.back(), csv.str());
  files.push_back(cfg.out_dir / "train_summary.csv");
  write_file(files.back(), table_to_csv(summary));
  return files;
}

}  // namespace

TrainTask train_task_from_name(std::string_view name) {
  if (name == "distill") return TrainTask::Distill;
  if (name == "qsd") return TrainTask::Qsd;
  if (name == "channel-sim") return TrainTask::ChannelSim;
  throw std::invalid_argument("unknown training task '" + std::string(name) + "' (distill|qsd|channel-sim)");
}

std::string experiment_name(ExperimentId id) {
  for (const auto& e : kNames) {
    if (e.id == id) return e.name;
  }
  throw std::logic_error("unnamed experiment");
}

ExperimentId experiment_from_name(std::string_view name) {
  for (const auto& e : kNames) {
    if (name == e.name) return e.id;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

Grid Grid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw std::invalid_argument("grid must look like start:stop:points");
  Grid g;
  try {
    g.start = parse_double(text.substr(0, a));
    g.stop = parse_double(text.substr(a + 1, b - a - 1));
    const double pts = parse_double(text.substr(b + 1));
    if (pts != std::floor(pts)) throw std::invalid_argument("grid point count must be an integer");
    g.points = static_cast<int>(pts);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("grid must look like start:stop:points, got '" + std::string(text) + "'");
  }
  g.validate();
  return g;
}

void Grid::validate() const {
  if (!(start >= 0.0 && stop <= 1.0 && start <= stop)) throw std::invalid_argument("grid must lie within [0, 1]");
  if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
}

std::vector<double> Grid::values() const {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
  return v;
}

void ExperimentConfig::validate() const {
  if (grid) grid->validate();
  if (gamma && !(*gamma >= 0.0 && *gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  if (restarts < 1) throw std::invalid_argument("restarts must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(task_value >= 0.0 && task_value <= 1.0)) throw std::invalid_argument("training value must lie in [0, 1]");
}

std::vector<double> ExperimentConfig::points() const {
  if (id == ExperimentId::ChannelSim && gamma) return {*gamma};
  if (grid) return grid->values();
  switch (id) {
    case ExperimentId::SDistill:
    case ExperimentId::IsoDistill: return Grid{0.05, 0.95, 19}.values();
    case ExperimentId::Qsd: return Grid{0.0, 1.0, 21}.values();
    case ExperimentId::ChannelSim: return Grid{0.0, 0.9, 10}.values();
    case ExperimentId::Train: return {task_value};
  }
  return {};
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") {
        cfg.id = experiment_from_name(value.get<std::string>());
      } else if (key == "grid") {
        cfg.grid = Grid::parse(value.get<std::string>());
      } else if (key == "gamma") {
        cfg.gamma = value.get<double>();
      } else if (key == "samples") {
        cfg.samples = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "restarts") {
        cfg.restarts = value.get<int>();
      } else if (key == "out") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "format") {
        const auto f = value.get<std::string>();
        if (f != "csv" && f != "csv+svg") throw std::invalid_argument("format must be csv or csv+svg");
        cfg.svg = f == "csv+svg";
      } else if (key == "task") {
        cfg.task = train_task_from_name(value.get<std::string>());
      } else if (key == "p") {
        cfg.task_value = value.get<double>();
      } else if (key == "max_iters") {
        cfg.max_iters = value.get<int>();
      } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.id) {
    case ExperimentId::SDistill:
      return emit(cfg, "s_distill", distillation_table(cfg.points(), false), "S-state distillation fidelity");
    case ExperimentId::IsoDistill:
      return emit(cfg, "iso_distill", distillation_table(cfg.points(), true), "isotropic 4-copy distillation");
    case ExperimentId::Qsd:
      return emit(cfg, "qsd", qsd_table(cfg.points()), "state discrimination success probability");
    case ExperimentId::ChannelSim:
      return emit(cfg, "channel_sim", channel_sim_table(cfg), "amplitude damping simulation fidelity");
    case ExperimentId::Train: return run_training(cfg);
  }
  throw std::logic_error("unhandled experiment");
}

PureState random_pure_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexVector v(2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double re = n(rng);
    const double im = n(rng);
    v(i) = Complex(re, im);
  }
  v.normalize();
  return PureState(v);
}

std::vector<PureState> haar_states(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_pure_state(rng));
  return out;
}

std::string table_to_csv(const Table& table) {
  std::string s;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) s += ',';
    s += table.columns[c];
  }
  s += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::logic_error("table row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) s += ',';
      s += detail::format_double(row[c]);
    }
    s += '\n';
  }
  return s;
}

std::string table_to_svg(const Table& table, std::string_view title) {
  constexpr double kW = 640, kH = 420, kLeft = 60, kRight = 180, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!table.rows.empty()) {
    x0 = x1 = table.rows[0][0];
    y0 = y1 = table.rows[0].size() > 1 ? table.rows[0][1] : 0.0;
    for (const auto& r : table.rows) {
      x0 = std::min(x0, r[0]);
      x1 = std::max(x1, r[0]);
      for (std::size_t c = 1; c < r.size(); ++c) {
        y0 = std::min(y0, r[c]);
        y1 = std::max(y1, r[c]);
      }
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1 - (y - y0) / (y1 - y0)) * ph; };
  auto num = [](double v) { return detail::format_double(std::round(v * 100) / 100); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"" << kH - 20 << "\" font-size=\"11\">" << num(x0) << "</text>\n";
  s << "<text x=\"" << kLeft + pw - 20 << "\" y=\"" << kH - 20 << "\" font-size=\"11\">" << num(x1) << "</text>\n";
  s << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 8 << "\" font-size=\"12\">"
    << (table.columns.empty() ? "" : table.columns[0]) << "</text>\n";
  s << "<text x=\"8\" y=\"" << kTop + ph << "\" font-size=\"11\">" << detail::format_double(y0) << "</text>\n";
  s << "<text x=\"8\" y=\"" << kTop + 10 << "\" font-size=\"11\">" << detail::format_double(y1) << "</text>\n";
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    const char* color = kColors[(c - 1) % std::size(kColors)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : table.rows) s << px(r[0]) << ',' << py(r[c]) << ' ';
    s << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(c);
    s << "<text x=\"" << kLeft + pw + 10 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\"" << color << "\">"
      << table.columns[c] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace locc
