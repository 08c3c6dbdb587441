#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winpred/synthetic.hpp"
#include "winpred/train.hpp"

namespace winpred {

// Where a command finds its recordings. Either one `csv` (optionally split
// chronologically by `split` fractions for commands that train) or explicit
// per-split files. `triggers_csv` optionally names the opening-cause log.
struct DataPaths {
  std::string csv;
  std::vector<double> split;  // train/val/test fractions for `csv`
  std::string train_csv;
  std::string val_csv;
  std::string test_csv;
  std::string triggers_csv;

  bool has_explicit_split_files() const { return !train_csv.empty(); }
};

struct LagSweepOptions {
  std::vector<std::size_t> lags{10, 20, 30, 40, 50, 60};
  std::size_t repeats = 5;
};

struct AnalyzeOptions {
  std::string model;
  std::size_t episodes = 4;
};

struct EvalOptions {
  std::string model;
};

// Everything a run can configure, parsed from one JSON file with sections
// (objects) per concern. Unknown keys are rejected so typos cannot silently
// fall back to defaults.
struct RunConfig {
  std::string out = "out";
  std::size_t jobs = 1;

  bool has_synthetic = false;
  SyntheticConfig synthetic;

  Hyperparams hp;

  bool has_grid = false;
  GridSpec grid;  // grid.base mirrors hp

  DataPaths data;
  EvalOptions eval;
  AnalyzeOptions analyze;
  LagSweepOptions sweep;

  // One seed to rule the run: replaces the generator, training, and grid
  // base seeds alike.
  void override_seed(std::uint64_t seed);
};

RunConfig load_run_config(const std::string& path);

}  // namespace winpred
