#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winpred/dataset.hpp"
#include "winpred/metrics.hpp"
#include "winpred/model_io.hpp"
#include "winpred/train.hpp"

namespace winpred {

// Aligned predicted/actual window states at the label timestamps
// (observation origin + lag), broken into contiguous segments wherever the
// recording has a gap.
struct EvalSeries {
  std::vector<std::vector<std::uint8_t>> predicted;
  std::vector<std::vector<std::uint8_t>> actual;
  // label timestamp of each segment's first entry, minutes since epoch
  std::vector<std::int64_t> segment_start;
};

struct EvalReport {
  std::size_t n_samples = 0;
  ConfusionCounts counts;
  ClassificationMetrics metrics;
  // windowed opening-action rule at the model's lag, pooled over segments
  std::size_t action_matched = 0;
  std::size_t action_eligible = 0;
  double action_correct = 0.0;  // NaN when no eligible observation exists
  AbsoluteMetrics predicted_behavior;
  AbsoluteMetrics actual_behavior;
  EvalSeries series;
};

// Runs the model over every stackable observation of the dataset and compares
// the predicted future window state against the recorded one. The bundle must
// carry its normalizer and stacking geometry. Throws std::invalid_argument on
// geometry/schema mismatch and std::runtime_error when no sample fits.
EvalReport evaluate_model(const ModelBundle& bundle, const Dataset& data);

struct LagCell {
  std::size_t lag_minutes = 0;
  std::size_t total_iterations = 0;  // schedule actually used for this lag
  RepeatSummary summary;
};

struct LagSweepResult {
  std::vector<LagCell> cells;
};

// Re-trains the model for each prediction lag (repeats seeds per lag,
// summarized like repeat_train) after re-stacking all three datasets at that
// lag. Lags must be strictly increasing members of {10, 20, ..., 60}. Runs
// with lag >= 30 get 20k extra base iterations. Repeats run in parallel up to
// `parallelism`; lags are processed in order.
LagSweepResult lag_sweep(const Hyperparams& hp, const std::vector<std::size_t>& lags,
                         const Dataset& train_data, const Dataset& val_data,
                         const Dataset& test_data, std::size_t repeats,
                         std::size_t parallelism);

}  // namespace winpred
