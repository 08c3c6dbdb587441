#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "winpred/dataset.hpp"
#include "winpred/model_io.hpp"
#include "winpred/network.hpp"
#include "winpred/synthetic.hpp"

namespace winpred {

// Per-layer count of weights the L1 proximal update drove to exactly 0.0.
// Exact bitwise zeros are the primary figure (the soft-threshold update
// produces literal zeros); the near-zero count is a tolerance-based guard in
// case a future optimizer only gets arbitrarily close.
struct LayerSparsity {
  std::size_t layer = 0;       // 0 = input-facing layer
  std::size_t total = 0;       // weight entries, biases excluded
  std::size_t zeros = 0;       // entries equal to 0.0
  std::size_t near_zeros = 0;  // entries with |w| < 1e-8 (includes the zeros)
  double fraction = 0.0;       // zeros / total
};

struct SparsityReport {
  std::vector<LayerSparsity> layers;
  std::size_t total = 0;
  std::size_t zeros = 0;
  double global_fraction = 0.0;
};

SparsityReport zero_fractions(const Mlp& mlp);

// First hidden layer organized by what each input column means: the static
// block at the observation minute, then the three stacked history sequences.
struct BlockSummary {
  std::string label;            // "static", "co2", "rh", "t_indoor"
  std::size_t offset = 0;       // first input column of the block
  std::size_t width = 0;        // number of input columns
  double mean_abs_weight = 0.0;
  double nonzero_fraction = 0.0;  // exact-zero complement
};

struct WeightMap {
  Eigen::MatrixXd abs_weights;       // input_dim x first-hidden-width
  std::vector<BlockSummary> blocks;  // partition widths (n_static, i, i, i)
};

// Throws std::invalid_argument when the network's input width does not equal
// schema.static_count() + 3 * seq_minutes.
WeightMap first_layer_map(const Mlp& mlp, const FeatureSchema& schema,
                          std::size_t seq_minutes);

// One correctly anticipated window opening: the model's input context around
// the prediction, the recorded outcome, and (when a trigger log is supplied)
// the simulated occupant's reason for opening.
struct EpisodeTrace {
  std::int64_t observation_t = 0;  // minute whose forward pass flagged the opening
  std::int64_t opening_t = 0;      // minute the window actually opened
  std::int64_t lead_minutes = 0;   // opening_t - observation_t
  std::optional<TriggerCause> cause;
  // records covering the model's input minutes [observation_t - i,
  // observation_t], extended through opening_t when the opening falls later
  std::vector<ClimateRecord> trace;
};

struct CaseStudySet {
  std::vector<EpisodeTrace> episodes;  // chronological by opening time
  std::size_t requested = 0;
  bool complete = false;  // at least `requested` episodes were found
};

// Walks the evaluation series for openings the model predicted correctly:
// an opening qualifies when at least one label of its open stretch has
// predicted = actual = open, and the earliest such label anchors the episode.
// Keeps the first `n` openings, one episode each. Openings already in
// progress when a recording segment starts cannot be dated and are skipped.
// A model that never predicts open yields an empty, incomplete set.
// Evaluation errors (inconsistent bundle, unusable recording) propagate from
// evaluate_model.
CaseStudySet extract_case_studies(const ModelBundle& bundle, const Dataset& data,
                                  std::size_t n,
                                  const std::vector<TriggerEvent>* triggers = nullptr);

}  // namespace winpred
