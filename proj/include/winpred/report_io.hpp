#pragma once

#include <string>
#include <vector>

#include "winpred/analysis.hpp"
#include "winpred/evaluate.hpp"
#include "winpred/train.hpp"

namespace winpred {

// Report serialization. All CSVs use a comma delimiter, dot decimal point,
// and a header row; undefined values print as `nan`. Doubles are written
// shortest-round-trip, so identical in-memory reports produce byte-identical
// files. Timing fields are deliberately left out of the serialized training
// report for the same reason. Every writer throws std::runtime_error when
// the file cannot be written.

void write_train_report_json(const TrainReport& report, const std::string& path);
void write_checkpoints_csv(const TrainReport& report, const std::string& path);
void write_loss_trace_csv(const TrainReport& report, const std::string& path);

void write_trials_json(const std::vector<TrialResult>& trials, const std::string& path);
void write_trials_csv(const std::vector<TrialResult>& trials, const std::string& path);

void write_eval_report_json(const EvalReport& report, const std::string& path);
void write_metrics_csv(const EvalReport& report, const std::string& path);
void write_durations_csv(const EvalReport& report, const std::string& path);

void write_lag_sweep_csv(const LagSweepResult& result, const std::string& path);

void write_sparsity_csv(const SparsityReport& report, const std::string& path);
void write_weight_map_csv(const WeightMap& map, const std::string& path);
void write_episode_csv(const EpisodeTrace& episode, const std::string& path);
// One row per episode: the trace file name plus timing and cause metadata.
void write_episode_index_csv(const CaseStudySet& set,
                             const std::vector<std::string>& trace_files,
                             const std::string& path);

}  // namespace winpred
