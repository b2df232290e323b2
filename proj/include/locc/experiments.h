#pragma once

// Experiment runner behind the locc-lab command line.

#include "locc/qmath.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace locc {

enum class ExperimentId { SDistill, IsoDistill, Qsd, ChannelSim, Train };

std::string experiment_name(ExperimentId id);
ExperimentId experiment_from_name(std::string_view name);

/// Inclusive evenly spaced grid.
struct Grid {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  /// Parses "start:stop:points".
  static Grid parse(std::string_view text);
  /// Throws unless 0 <= start <= stop <= 1 and points >= 2.
  void validate() const;
  std::vector<double> values() const;
};

enum class TrainTask { Distill, Qsd, ChannelSim };

/// "distill", "qsd" or "channel-sim".
TrainTask train_task_from_name(std::string_view name);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::SDistill;
  std::optional<Grid> grid;     // defaults per experiment
  std::optional<double> gamma;  // channel-sim: single point instead of a grid
  int samples = 1000;
  std::uint64_t seed = 7;
  int restarts = 8;
  std::filesystem::path out_dir = ".";
  bool svg = true;  // --format csv+svg
  TrainTask task = TrainTask::Distill;
  double task_value = 0.5;  // p for distillation, gamma otherwise
  int max_iters = 300;

  void validate() const;
  /// Points this config evaluates, after defaults.
  std::vector<double> points() const;
};

/// Applies the keys present in a JSON object onto `cfg`. Unknown keys throw.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);

/// Writes the experiment's files under cfg.out_dir and returns their paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

/// Haar-random single-qubit state: two standard complex Gaussians, normalized.
PureState random_pure_state(std::mt19937_64& rng);
std::vector<PureState> haar_states(int count, std::uint64_t seed);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header row, comma separated, shortest round-trip numbers, LF endings.
std::string table_to_csv(const Table& table);
/// Line plot of every column against the first one.
std::string table_to_svg(const Table& table, std::string_view title);

}  // namespace locc
