#include "winpred/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "winpred/evaluate.hpp"

namespace winpred {

SparsityReport zero_fractions(const Mlp& mlp) {
  mlp.validate();
  SparsityReport report;
  for (std::size_t n = 0; n < mlp.n_layers(); ++n) {
    const Eigen::MatrixXd& w = mlp.weights[n];
    LayerSparsity layer;
    layer.layer = n;
    layer.total = static_cast<std::size_t>(w.size());
    layer.zeros = static_cast<std::size_t>((w.array() == 0.0).count());
    layer.near_zeros = static_cast<std::size_t>((w.array().abs() < 1e-8).count());
    layer.fraction = layer.total == 0
                         ? 0.0
                         : static_cast<double>(layer.zeros) /
                               static_cast<double>(layer.total);
    report.total += layer.total;
    report.zeros += layer.zeros;
    report.layers.push_back(layer);
  }
  report.global_fraction =
      report.total == 0 ? 0.0
                        : static_cast<double>(report.zeros) /
                              static_cast<double>(report.total);
  return report;
}

WeightMap first_layer_map(const Mlp& mlp, const FeatureSchema& schema,
                          std::size_t seq_minutes) {
  mlp.validate();
  schema.validate();
  if (seq_minutes < 1) {
    throw std::invalid_argument("sequence duration must be >= 1");
  }
  const std::size_t expected = schema.static_count() + 3 * seq_minutes;
  if (mlp.input_dim() != expected) {
    throw std::invalid_argument(
        "first layer takes " + std::to_string(mlp.input_dim()) +
        " inputs but the schema and sequence duration give " +
        std::to_string(expected));
  }

  WeightMap map;
  map.abs_weights = mlp.weights[0].cwiseAbs();
  const auto h1 = map.abs_weights.cols();

  std::vector<std::pair<std::string, std::size_t>> layout;
  layout.emplace_back("static", schema.static_count());
  for (const std::string& channel : FeatureSchema::indoor_sequence_names()) {
    layout.emplace_back(channel, seq_minutes);
  }

  std::size_t offset = 0;
  for (const auto& [label, width] : layout) {
    const auto block = map.abs_weights.middleRows(
        static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(width));
    BlockSummary summary;
    summary.label = label;
    summary.offset = offset;
    summary.width = width;
    summary.mean_abs_weight = block.mean();
    summary.nonzero_fraction =
        static_cast<double>((block.array() != 0.0).count()) /
        static_cast<double>(block.size());
    map.blocks.push_back(std::move(summary));
    offset += width;
  }
  return map;
}

CaseStudySet extract_case_studies(const ModelBundle& bundle, const Dataset& data,
                                  std::size_t n,
                                  const std::vector<TriggerEvent>* triggers) {
  const EvalReport report = evaluate_model(bundle, data);
  const std::int64_t i = static_cast<std::int64_t>(bundle.seq_minutes);
  const std::int64_t l = static_cast<std::int64_t>(bundle.lag_minutes);

  CaseStudySet set;
  set.requested = n;

  std::size_t found = 0;
  for (std::size_t s = 0; s < report.series.actual.size(); ++s) {
    const auto& actual = report.series.actual[s];
    const auto& predicted = report.series.predicted[s];
    const std::int64_t first_label_t = report.series.segment_start[s];

    std::size_t k = 0;
    while (k < actual.size()) {
      if (actual[k] == 0) {
        ++k;
        continue;
      }
      const std::size_t run_begin = k;
      while (k < actual.size() && actual[k] != 0) ++k;
      // an open stretch already underway at the segment's first label has no
      // datable opening minute
      if (run_begin == 0) continue;

      std::size_t hit = run_begin;
      while (hit < k && predicted[hit] == 0) ++hit;
      if (hit == k) continue;  // the model never called this opening

      ++found;
      if (set.episodes.size() == n) continue;  // keep counting for `complete`

      EpisodeTrace episode;
      episode.opening_t = first_label_t + static_cast<std::int64_t>(run_begin);
      const std::int64_t hit_label_t =
          first_label_t + static_cast<std::int64_t>(hit);
      episode.observation_t = hit_label_t - l;
      episode.lead_minutes = episode.opening_t - episode.observation_t;

      if (triggers != nullptr) {
        for (const TriggerEvent& event : *triggers) {
          if (event.timestamp == episode.opening_t) {
            episode.cause = event.cause;
            break;
          }
        }
      }

      const std::int64_t trace_begin = episode.observation_t - i;
      const std::int64_t trace_end =
          std::max(episode.observation_t, episode.opening_t);
      const auto first = std::lower_bound(
          data.records.begin(), data.records.end(), trace_begin,
          [](const ClimateRecord& rec, std::int64_t t) { return rec.timestamp < t; });
      for (auto it = first; it != data.records.end() && it->timestamp <= trace_end;
           ++it) {
        episode.trace.push_back(*it);
      }
      set.episodes.push_back(std::move(episode));
    }
  }
  set.complete = found >= n;
  return set;
}

}  // namespace winpred
