// Command-line front end for the window-state prediction pipeline: synthetic
// data generation, training, grid search, evaluation, lag sweeps, and model
// analysis, driven by a JSON config file. Every subcommand is a thin wrapper
// over the library and writes its artifacts into the output directory.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "winpred/analysis.hpp"
#include "winpred/config.hpp"
#include "winpred/dataset.hpp"
#include "winpred/evaluate.hpp"
#include "winpred/model_io.hpp"
#include "winpred/report_io.hpp"
#include "winpred/stacking.hpp"
#include "winpred/synthetic.hpp"
#include "winpred/train.hpp"

namespace fs = std::filesystem;
using namespace winpred;

namespace {

Dataset load_recording(const std::string& path) {
  return load_csv(path, FeatureSchema::default_schema());
}

struct SplitData {
  Dataset train, val, test;
};

// Either explicit per-split files or one recording cut chronologically.
SplitData load_split_data(const DataPaths& data, bool need_test) {
  if (data.has_explicit_split_files()) {
    if (data.val_csv.empty()) {
      throw std::invalid_argument("data.val_csv is required alongside data.train_csv");
    }
    if (need_test && data.test_csv.empty()) {
      throw std::invalid_argument("this command needs data.test_csv");
    }
    SplitData result;
    result.train = load_recording(data.train_csv);
    result.val = load_recording(data.val_csv);
    if (!data.test_csv.empty()) result.test = load_recording(data.test_csv);
    return result;
  }
  if (data.csv.empty()) {
    throw std::invalid_argument(
        "config needs a data section with either csv + split or "
        "train_csv/val_csv[/test_csv]");
  }
  if (data.split.size() != 3) {
    throw std::invalid_argument(
        "data.split (three chronological fractions) is required with data.csv");
  }
  const Dataset whole = load_recording(data.csv);
  SplitData result;
  std::tie(result.train, result.val, result.test) =
      split(whole, SplitFractions{data.split[0], data.split[1], data.split[2]});
  return result;
}

struct StackedSets {
  SampleSet train, val;
  Normalizer norm;
};

StackedSets stack_and_normalize(const Dataset& train_data, const Dataset& val_data,
                                std::size_t seq, std::size_t lag) {
  const auto train_list = stack_all(train_data, seq, lag);
  const auto val_list = stack_all(val_data, seq, lag);
  if (train_list.size() < 2) {
    throw std::runtime_error("training split yields too few stacked samples");
  }
  if (val_list.empty()) {
    throw std::runtime_error("validation split yields no stacked samples");
  }
  StackedSets sets;
  sets.norm = fit_normalizer(train_list);
  sets.train = to_sample_set(train_list, SplitTag::train);
  sets.val = to_sample_set(val_list, SplitTag::val);
  apply_normalizer(sets.norm, sets.train);
  apply_normalizer(sets.norm, sets.val);
  return sets;
}

void print_range_warnings(const Hyperparams& hp) {
  for (const std::string& warning : hp.range_warnings()) {
    std::cerr << "warning: " << warning << '\n';
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void cmd_gen_data(const RunConfig& config, bool quiet) {
  if (!config.has_synthetic) {
    throw std::invalid_argument("config has no synthetic section");
  }
  config.synthetic.validate();
  const SyntheticOutput output = generate_synthetic(config.synthetic);
  fs::create_directories(config.out);
  save_csv(output.dataset, join_path(config.out, "synthetic.csv"));
  save_triggers_csv(output.triggers,
                    join_path(config.out, "synthetic.triggers.csv"));
  if (!quiet) {
    const SummaryStats stats = summary_stats(output.dataset);
    std::cout << "records: " << output.dataset.size() << '\n'
              << "openings logged: " << output.triggers.size() << '\n'
              << "mean co2: " << stats.mean_co2 << " ppm\n"
              << "mean t_indoor: " << stats.mean_t_indoor << " C\n"
              << "mean rh: " << stats.mean_rh << " %\n"
              << "actions per hour: " << stats.actions_per_hour << '\n'
              << "open fraction: " << stats.open_fraction << '\n';
  }
}

void cmd_train(const RunConfig& config, bool quiet) {
  print_range_warnings(config.hp);
  config.hp.validate();
  const SplitData data = load_split_data(config.data, /*need_test=*/false);
  const StackedSets sets = stack_and_normalize(data.train, data.val,
                                               config.hp.seq_minutes,
                                               config.hp.lag_minutes);
  TrainResult result = train(sets.train, sets.val, config.hp);

  fs::create_directories(config.out);
  ModelBundle bundle;
  bundle.normalizer = sets.norm;
  bundle.seq_minutes = config.hp.seq_minutes;
  bundle.lag_minutes = config.hp.lag_minutes;
  bundle.n_static = data.train.schema.static_count();
  bundle.mlp = std::move(result.best_model);
  save_model(bundle, join_path(config.out, "model_best.bin"));
  bundle.mlp = std::move(result.final_model);
  save_model(bundle, join_path(config.out, "model.bin"));

  write_train_report_json(result.report, join_path(config.out, "train_report.json"));
  write_checkpoints_csv(result.report, join_path(config.out, "checkpoints.csv"));
  write_loss_trace_csv(result.report, join_path(config.out, "loss_trace.csv"));
  if (!quiet) {
    std::cout << "iterations: " << result.report.total_iterations << '\n'
              << "final validation loss: " << result.report.final_val_loss << '\n'
              << "final validation acc: " << result.report.final_val_metrics.acc
              << '\n'
              << "final validation f1: "
              << (result.report.final_val_metrics.f1_defined
                      ? std::to_string(result.report.final_val_metrics.f1)
                      : "undefined")
              << '\n'
              << "wall seconds: " << result.report.wall_seconds << '\n';
  }
}

void cmd_grid(const RunConfig& config, bool quiet) {
  if (!config.has_grid) {
    throw std::invalid_argument("config has no grid section");
  }
  const std::vector<Hyperparams> grid = expand_grid(config.grid);
  const SplitData data = load_split_data(config.data, /*need_test=*/false);
  const std::string model_dir = join_path(config.out, "models");
  fs::create_directories(model_dir);
  const std::vector<TrialResult> trials =
      grid_search(grid, data.train, data.val, config.jobs, model_dir);
  write_trials_json(trials, join_path(config.out, "trials.json"));
  write_trials_csv(trials, join_path(config.out, "trials.csv"));
  if (!quiet) {
    std::cout << "trials: " << trials.size() << '\n';
    if (!trials.empty() && !trials.front().failed) {
      const TrialResult& best = trials.front();
      std::cout << "best grid index: " << best.grid_index << '\n'
                << "best validation f1: "
                << (best.val_metrics.f1_defined ? std::to_string(best.val_metrics.f1)
                                                : "undefined")
                << '\n';
    }
  }
}

bool has_recording(const DataPaths& data) {
  return !data.test_csv.empty() || !data.csv.empty();
}

// The recording a saved model is judged against: an explicit test file, the
// test slice of a split single recording, or the whole single recording.
Dataset load_eval_recording(const DataPaths& data) {
  if (!data.test_csv.empty()) return load_recording(data.test_csv);
  if (data.csv.empty()) {
    throw std::invalid_argument(
        "config needs data.test_csv (or data.csv) naming the recording");
  }
  Dataset whole = load_recording(data.csv);
  if (data.split.size() == 3) {
    Dataset test;
    std::tie(std::ignore, std::ignore, test) =
        split(whole, SplitFractions{data.split[0], data.split[1], data.split[2]});
    return test;
  }
  return whole;
}

void cmd_eval(const RunConfig& config, bool quiet) {
  if (config.eval.model.empty()) {
    throw std::invalid_argument("config needs eval.model naming a saved model");
  }
  const ModelBundle bundle = load_model(config.eval.model);
  const Dataset recording = load_eval_recording(config.data);
  const EvalReport report = evaluate_model(bundle, recording);
  fs::create_directories(config.out);
  write_eval_report_json(report, join_path(config.out, "eval_report.json"));
  write_metrics_csv(report, join_path(config.out, "metrics.csv"));
  write_durations_csv(report, join_path(config.out, "durations.csv"));
  if (!quiet) {
    std::cout << "samples: " << report.n_samples << '\n'
              << "accuracy: " << report.metrics.acc << '\n'
              << "f1: "
              << (report.metrics.f1_defined ? std::to_string(report.metrics.f1)
                                            : "undefined")
              << '\n'
              << "correct actions: " << report.action_matched << " of "
              << report.action_eligible << '\n';
  }
}

void cmd_lag_sweep(const RunConfig& config, bool quiet) {
  print_range_warnings(config.hp);
  config.hp.validate();
  const SplitData data = load_split_data(config.data, /*need_test=*/true);
  const LagSweepResult result =
      lag_sweep(config.hp, config.sweep.lags, data.train, data.val, data.test,
                config.sweep.repeats, config.jobs);
  fs::create_directories(config.out);
  write_lag_sweep_csv(result, join_path(config.out, "lag_sweep.csv"));
  if (!quiet) {
    for (const LagCell& cell : result.cells) {
      std::cout << "lag " << cell.lag_minutes << ": mean f1 "
                << cell.summary.f1.mean << " over " << cell.summary.f1.n
                << " runs\n";
    }
  }
}

void cmd_analyze(const RunConfig& config, bool quiet) {
  if (config.analyze.model.empty()) {
    throw std::invalid_argument("config needs analyze.model naming a saved model");
  }
  const ModelBundle bundle = load_model(config.analyze.model);
  fs::create_directories(config.out);

  const SparsityReport sparsity = zero_fractions(bundle.mlp);
  write_sparsity_csv(sparsity, join_path(config.out, "sparsity.csv"));

  const WeightMap map = first_layer_map(bundle.mlp, FeatureSchema::default_schema(),
                                        bundle.seq_minutes);
  write_weight_map_csv(map, join_path(config.out, "weight_map.csv"));

  if (has_recording(config.data)) {
    const Dataset recording = load_eval_recording(config.data);
    std::vector<TriggerEvent> triggers;
    bool has_triggers = false;
    if (!config.data.triggers_csv.empty()) {
      triggers = load_triggers_csv(config.data.triggers_csv);
      has_triggers = true;
    }
    const CaseStudySet episodes =
        extract_case_studies(bundle, recording, config.analyze.episodes,
                             has_triggers ? &triggers : nullptr);
    const std::string episode_dir = join_path(config.out, "episodes");
    fs::create_directories(episode_dir);
    std::vector<std::string> files;
    for (std::size_t k = 0; k < episodes.episodes.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%03zu.csv", k);
      files.emplace_back(name);
      write_episode_csv(episodes.episodes[k], join_path(episode_dir, name));
    }
    write_episode_index_csv(episodes, files, join_path(episode_dir, "index.csv"));
    if (!quiet) {
      std::cout << "episodes: " << episodes.episodes.size() << " of "
                << episodes.requested << " requested";
      if (!episodes.complete) std::cout << " (fewer than requested exist)";
      std::cout << '\n';
    }
  }
  if (!quiet) {
    std::cout << "zero-weight fraction: " << sparsity.global_fraction << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"window-state prediction pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  std::string out;
  bool quiet = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--jobs", jobs, "worker threads for parallel commands");
    cmd->add_option("--seed", seed, "override every configured seed");
    cmd->add_option("--out", out, "output directory (overrides the config)");
    cmd->add_flag("--quiet", quiet, "suppress progress output");
    return cmd;
  };

  add_common(app.add_subcommand(
      "gen-data", "generate a synthetic recording and its trigger log"));
  add_common(app.add_subcommand("train", "train one model and save it"));
  add_common(app.add_subcommand("grid", "run a hyperparameter grid search"));
  add_common(app.add_subcommand("eval", "evaluate a saved model on a recording"));
  add_common(app.add_subcommand(
      "lag-sweep", "re-train across prediction lags and summarize"));
  add_common(app.add_subcommand("analyze", "sparsity, weight map, and episodes"));

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  try {
    RunConfig config = load_run_config(config_path);
    if (cmd->count("--seed") > 0) config.override_seed(seed);
    if (cmd->count("--jobs") > 0) config.jobs = jobs;
    if (cmd->count("--out") > 0) config.out = out;

    const std::string name = cmd->get_name();
    if (name == "gen-data") {
      cmd_gen_data(config, quiet);
    } else if (name == "train") {
      cmd_train(config, quiet);
    } else if (name == "grid") {
      cmd_grid(config, quiet);
    } else if (name == "eval") {
      cmd_eval(config, quiet);
    } else if (name == "lag-sweep") {
      cmd_lag_sweep(config, quiet);
    } else {
      cmd_analyze(config, quiet);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
