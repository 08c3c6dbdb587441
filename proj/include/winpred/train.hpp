#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "winpred/dataset.hpp"
#include "winpred/metrics.hpp"
#include "winpred/network.hpp"
#include "winpred/rng.hpp"
#include "winpred/stacking.hpp"

namespace winpred {

// Training configuration. The documented search ranges (see range_warnings)
// are enforced strictly when a grid is expanded; hand-written configs may
// step outside them and only earn a warning.
struct Hyperparams {
  std::vector<std::size_t> hidden_widths{227, 314, 394, 34, 26};
  double l1_lambda = 0.01;
  double lr = 0.03;
  std::size_t base_iterations = 50000;
  std::size_t batch_size = 128;
  std::size_t seq_minutes = 60;   // history length i per indoor channel
  std::size_t lag_minutes = 10;   // prediction target offset l
  std::size_t checkpoint_interval = 1000;
  std::uint64_t seed = 1;
  double positive_class_weight = 1.0;

  // hard errors only (empty architecture, zero batch, ...)
  void validate() const;
  // one human-readable line per value outside the documented search range
  std::vector<std::string> range_warnings() const;
  // total optimization steps: base phase plus the two fixed decay phases
  std::size_t total_iterations() const { return base_iterations + 20000; }
};

// One validation measurement taken every checkpoint_interval iterations.
// val_loss includes the L1 penalty term.
struct TrainCheckpoint {
  std::size_t iteration = 0;
  double val_loss = 0.0;
  ClassificationMetrics val_metrics;
};

struct TrainReport {
  // (iteration, batch cross-entropy + penalty), downsampled
  std::vector<std::pair<std::size_t, double>> batch_loss_trace;
  std::vector<TrainCheckpoint> checkpoints;
  std::size_t best_checkpoint = 0;  // index into checkpoints, minimal val_loss
  double final_val_loss = 0.0;
  ClassificationMetrics final_val_metrics;
  // (end iteration, learning rate) for the three schedule phases
  std::vector<std::pair<std::size_t, double>> phases;
  std::size_t total_iterations = 0;
  double epochs_completed = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Mlp final_model;  // parameters after the last iteration
  Mlp best_model;   // parameters at the minimal-validation-loss checkpoint
  TrainReport report;
};

// Seeded mini-batch order: a full shuffled pass over all sample indices per
// epoch, with the final short batch used as-is before reshuffling.
class EpochSampler {
 public:
  EpochSampler(std::size_t n_samples, std::uint64_t seed);
  // fills `out` with the next batch of at most batch_size indices
  void next_batch(std::size_t batch_size, std::vector<std::size_t>& out);
  std::size_t samples_consumed() const { return consumed_; }
  std::size_t n_samples() const { return order_.size(); }

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_;
  std::size_t consumed_ = 0;
  Rng rng_;
};

// Optimization core: exactly `iterations` mini-batch proximal steps at one
// fixed learning rate, advancing the sampler in place. The optional callback
// fires after each step with (step index within this call, batch
// cross-entropy measured before the step). Throws std::runtime_error with a
// diagnostic when the loss turns non-finite.
void run_iterations(Mlp& mlp, const SampleSet& train, EpochSampler& sampler,
                    std::size_t iterations, double lr, double l1_lambda,
                    std::size_t batch_size, double positive_class_weight = 1.0,
                    const std::function<void(std::size_t, double)>& on_step = {});

// Full training run: base_iterations at lr, then 10k at lr/10, then 10k at
// lr/100. Samples must already be stacked and normalized consistently with
// hp. Validation happens every checkpoint_interval iterations and at the end;
// the checkpoint with minimal validation loss names the best model. Sample
// sets carrying the same (non-unspecified) split tag are rejected, keeping
// validation data disjoint from training data.
TrainResult train(const SampleSet& train_set, const SampleSet& val_set,
                  const Hyperparams& hp);

// One grid-search trial outcome. Ranking: validation F1 descending, ties by
// accuracy, then by fewer parameters, then by grid index. Failed trials sink
// to the end.
struct TrialResult {
  std::size_t grid_index = 0;
  Hyperparams hp;
  bool failed = false;
  std::string error;
  double val_loss = 0.0;
  ClassificationMetrics val_metrics;  // final validation metrics
  std::size_t parameter_count = 0;
  std::string model_file;  // empty when models are not persisted
};

// Cartesian grid specification; every axis must stay inside the documented
// search ranges (expand_grid enforces them strictly).
struct GridSpec {
  std::vector<std::vector<std::size_t>> hidden_widths_options;
  std::vector<double> l1_lambdas;
  std::vector<double> lrs;
  std::vector<std::size_t> base_iterations_options;
  std::vector<std::size_t> seq_minutes_options;
  std::vector<std::size_t> lag_minutes_options;
  Hyperparams base;  // batch size, checkpoint interval, seed, class weight
};

std::vector<Hyperparams> expand_grid(const GridSpec& spec);

// Trains every grid point and returns the ranked results. Stacked sample
// sets are built once per distinct (seq_minutes, lag_minutes) pair and shared
// read-only across trials; each trial derives its own seed from (base seed,
// grid index), so results do not depend on the parallelism degree. When
// model_dir is non-empty, each successful trial's final model is saved there.
std::vector<TrialResult> grid_search(const std::vector<Hyperparams>& grid,
                                     const Dataset& train_data,
                                     const Dataset& val_data,
                                     std::size_t parallelism,
                                     const std::string& model_dir = "");

// Six-number summary of one metric across repeated trainings.
struct MetricDistribution {
  double min = 0.0, q25 = 0.0, mean = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  std::size_t n = 0;  // values the summary is computed from (NaN excluded)
};

MetricDistribution summarize_distribution(const std::vector<double>& values);

struct RepeatSummary {
  std::vector<std::uint64_t> seeds;                // successful runs, in order
  std::vector<ClassificationMetrics> per_seed;     // test metrics per run
  std::vector<std::string> failures;               // "seed <s>: <error>"
  MetricDistribution acc, tpr, tnr, f1;
};

// Trains n models with seeds hp.seed+0 ... hp.seed+n-1 and summarizes their
// test-set metrics. Per-run failures are recorded, not fatal. Runs may be
// trained in parallel; the summary is aggregated in seed order either way.
RepeatSummary repeat_train(const Hyperparams& hp, std::size_t n,
                           const SampleSet& train_set, const SampleSet& val_set,
                           const SampleSet& test_set, std::size_t parallelism = 1);

}  // namespace winpred
