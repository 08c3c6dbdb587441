#include "winpred/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace winpred {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

EvalReport evaluate_model(const ModelBundle& bundle, const Dataset& data) {
  bundle.validate();
  if (bundle.normalizer.dim() == 0) {
    throw std::invalid_argument("model bundle carries no normalizer");
  }
  if (bundle.n_static == 0) {
    throw std::invalid_argument("model bundle carries no stacking geometry");
  }
  if (bundle.n_static != data.schema.static_count()) {
    throw std::invalid_argument(
        "model expects " + std::to_string(bundle.n_static) +
        " static features but the dataset schema has " +
        std::to_string(data.schema.static_count()));
  }

  const std::size_t i = bundle.seq_minutes;
  const std::size_t l = bundle.lag_minutes;
  const auto samples = stack_all(data, i, l);
  if (samples.empty()) {
    throw std::runtime_error(
        "no observation in the dataset supports the model's history and lag");
  }
  SampleSet set = to_sample_set(samples, SplitTag::unspecified);
  apply_normalizer(bundle.normalizer, set);

  // chunked forward pass keeps peak memory bounded on long recordings
  std::vector<std::uint8_t> predicted;
  predicted.reserve(set.size());
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < set.X.rows(); start += kChunk) {
    const Eigen::Index take = std::min(kChunk, set.X.rows() - start);
    const auto chunk_preds =
        predict_batch(bundle.mlp, set.X.middleRows(start, take));
    predicted.insert(predicted.end(), chunk_preds.begin(), chunk_preds.end());
  }

  EvalReport report;
  report.n_samples = set.size();
  report.counts = confusion(predicted, set.y);
  report.metrics = classification_metrics(report.counts);

  // break into contiguous segments along the observation timeline
  std::size_t seg_begin = 0;
  auto flush_segment = [&](std::size_t end) {
    report.series.predicted.emplace_back(predicted.begin() + seg_begin,
                                         predicted.begin() + end);
    report.series.actual.emplace_back(set.y.begin() + seg_begin,
                                      set.y.begin() + end);
    report.series.segment_start.push_back(set.origin_t[seg_begin] +
                                          static_cast<std::int64_t>(l));
  };
  for (std::size_t k = 1; k < set.size(); ++k) {
    if (set.origin_t[k] != set.origin_t[k - 1] + 1) {
      flush_segment(k);
      seg_begin = k;
    }
  }
  flush_segment(set.size());

  for (std::size_t s = 0; s < report.series.predicted.size(); ++s) {
    const auto [matched, eligible] =
        action_counts(report.series.predicted[s], report.series.actual[s], l);
    report.action_matched += matched;
    report.action_eligible += eligible;
  }
  report.action_correct =
      report.action_eligible == 0
          ? kNaN
          : static_cast<double>(report.action_matched) /
                static_cast<double>(report.action_eligible);

  report.predicted_behavior = absolute_metrics_segmented(report.series.predicted);
  report.actual_behavior = absolute_metrics_segmented(report.series.actual);
  return report;
}

LagSweepResult lag_sweep(const Hyperparams& hp, const std::vector<std::size_t>& lags,
                         const Dataset& train_data, const Dataset& val_data,
                         const Dataset& test_data, std::size_t repeats,
                         std::size_t parallelism) {
  if (lags.empty()) throw std::invalid_argument("lag list is empty");
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (lags[k] < 10 || lags[k] > 60 || lags[k] % 10 != 0) {
      throw std::invalid_argument("lag " + std::to_string(lags[k]) +
                                  " is not one of {10, 20, 30, 40, 50, 60}");
    }
    if (k > 0 && lags[k] <= lags[k - 1]) {
      throw std::invalid_argument("lags must be strictly increasing");
    }
  }
  if (repeats < 2) throw std::invalid_argument("lag sweep needs >= 2 repeats per lag");

  LagSweepResult result;
  for (const std::size_t lag : lags) {
    const auto train_list = stack_all(train_data, hp.seq_minutes, lag);
    const auto val_list = stack_all(val_data, hp.seq_minutes, lag);
    const auto test_list = stack_all(test_data, hp.seq_minutes, lag);
    if (train_list.size() < 2 || val_list.empty() || test_list.empty()) {
      throw std::runtime_error("lag " + std::to_string(lag) +
                               ": a split has no usable samples after stacking");
    }
    const Normalizer norm = fit_normalizer(train_list);
    SampleSet train_set = to_sample_set(train_list, SplitTag::train);
    SampleSet val_set = to_sample_set(val_list, SplitTag::val);
    SampleSet test_set = to_sample_set(test_list, SplitTag::test);
    apply_normalizer(norm, train_set);
    apply_normalizer(norm, val_set);
    apply_normalizer(norm, test_set);

    Hyperparams lag_hp = hp;
    lag_hp.lag_minutes = lag;
    // harder (longer-lag) targets train for 20k extra base iterations
    if (lag >= 30) lag_hp.base_iterations += 20000;

    LagCell cell;
    cell.lag_minutes = lag;
    cell.total_iterations = lag_hp.total_iterations();
    cell.summary =
        repeat_train(lag_hp, repeats, train_set, val_set, test_set, parallelism);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

}  // namespace winpred
