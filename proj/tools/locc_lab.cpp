// locc-lab: regenerate the distillation, discrimination and channel
// simulation data sets, or train an ansatz from the command line.

#include "locc/experiments.h"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
  std::string grid;
  double gamma = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  int restarts = 0;
  int max_iters = 0;
  std::string out;
  std::string format;
  std::string config;
  std::string task;
  double p = 0.0;
};

struct Options {
  CLI::Option* grid = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* restarts = nullptr;
  CLI::Option* max_iters = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* config = nullptr;
  CLI::Option* task = nullptr;
  CLI::Option* p = nullptr;
};

Options add_common(CLI::App* sub, Flags& f) {
  Options o;
  o.grid = sub->add_option("--grid", f.grid, "start:stop:points");
  o.seed = sub->add_option("--seed", f.seed, "random seed");
  o.restarts = sub->add_option("--restarts", f.restarts, "training restarts");
  o.max_iters = sub->add_option("--max-iters", f.max_iters, "optimizer iterations per restart");
  o.samples = sub->add_option("--samples", f.samples, "Haar-random test states");
  o.gamma = sub->add_option("--gamma", f.gamma, "single noise level");
  o.out = sub->add_option("--out", f.out, "output directory");
  o.format = sub->add_option("--format", f.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
  o.config = sub->add_option("--config", f.config, "JSON config file; flags override it");
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

locc::ExperimentConfig build_config(locc::ExperimentId id, const Flags& f, const Options& o) {
  locc::ExperimentConfig cfg;
  cfg.id = id;
  if (o.config->count()) {
    locc::apply_config_text(cfg, slurp(f.config));
    cfg.id = id;
  }
  if (o.grid->count()) cfg.grid = locc::Grid::parse(f.grid);
  if (o.gamma->count()) cfg.gamma = f.gamma;
  if (o.samples->count()) cfg.samples = f.samples;
  if (o.seed->count()) cfg.seed = f.seed;
  if (o.restarts->count()) cfg.restarts = f.restarts;
  if (o.max_iters->count()) cfg.max_iters = f.max_iters;
  if (o.out->count()) cfg.out_dir = f.out;
  if (o.format->count()) cfg.svg = f.format == "csv+svg";
  if (o.task && o.task->count()) cfg.task = locc::train_task_from_name(f.task);
  if (o.p && o.p->count()) cfg.task_value = f.p;
  if (id == locc::ExperimentId::Train && o.gamma->count()) cfg.task_value = f.gamma;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOCC protocol simulation and training experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, Options>> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"s-distill", "two-copy S-state distillation versus DEJMPS"},
      {"iso-distill", "four-copy isotropic distillation versus generalized DEJMPS"},
      {"qsd", "noisy Bell-state discrimination"},
      {"channel-sim", "amplitude damping channel simulation versus teleportation"},
      {"train", "train an ansatz (--task distill|qsd|channel-sim, --p value)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    Options o = add_common(sub, flags);
    if (std::string_view(name) == "train") {
      o.task = sub->add_option("--task", flags.task, "distill, qsd or channel-sim")
                   ->check(CLI::IsMember({"distill", "qsd", "channel-sim"}));
      o.p = sub->add_option("--p", flags.p, "p for distillation, gamma for the others");
    }
    subs.emplace_back(sub, o);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; everything else is a usage error.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (const auto& [sub, opts] : subs) {
      if (!sub->parsed()) continue;
      const auto cfg = build_config(locc::experiment_from_name(sub->get_name()), flags, opts);
      for (const auto& path : locc::run_experiment(cfg)) std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "locc-lab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
