#include "winpred/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace winpred {

namespace {

using nlohmann::ordered_json;

std::string num(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (result.ec != std::errc{}) {
    throw std::runtime_error("failed to format a number");
  }
  return std::string(buffer, result.ptr);
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ordered_json defined_or_null(double value, bool defined) {
  if (!defined || std::isnan(value)) return nullptr;
  return value;
}

ordered_json metrics_to_json(const ClassificationMetrics& m) {
  return {{"acc", m.acc},
          {"tpr", defined_or_null(m.tpr, m.tpr_defined)},
          {"tnr", defined_or_null(m.tnr, m.tnr_defined)},
          {"f1", defined_or_null(m.f1, m.f1_defined)}};
}

ordered_json durations_to_json(const DurationSummary& d) {
  const bool has_runs = d.n_runs > 0;
  return {{"q25_hours", defined_or_null(d.q25, has_runs)},
          {"median_hours", defined_or_null(d.median, has_runs)},
          {"q75_hours", defined_or_null(d.q75, has_runs)},
          {"iqr_hours", defined_or_null(d.iqr, has_runs)},
          {"n_runs", d.n_runs}};
}

ordered_json behavior_to_json(const AbsoluteMetrics& b) {
  return {{"open_fraction", b.open_fraction},
          {"actions_per_day", b.actions_per_day},
          {"opening_durations", durations_to_json(b.opening_durations)},
          {"closing_durations", durations_to_json(b.closing_durations)}};
}

ordered_json hp_to_json(const Hyperparams& hp) {
  return {{"hidden_widths", hp.hidden_widths},
          {"l1_lambda", hp.l1_lambda},
          {"lr", hp.lr},
          {"base_iterations", hp.base_iterations},
          {"batch_size", hp.batch_size},
          {"seq_minutes", hp.seq_minutes},
          {"lag_minutes", hp.lag_minutes},
          {"checkpoint_interval", hp.checkpoint_interval},
          {"seed", hp.seed},
          {"positive_class_weight", hp.positive_class_weight}};
}

std::string widths_label(const std::vector<std::size_t>& widths) {
  std::string label;
  for (std::size_t w : widths) {
    if (!label.empty()) label += 'x';
    label += std::to_string(w);
  }
  return label;
}

void metrics_csv_cells(std::ofstream& out, const ClassificationMetrics& m) {
  out << num(m.acc) << ',' << num(m.tpr_defined ? m.tpr : NAN) << ','
      << num(m.tnr_defined ? m.tnr : NAN) << ',' << num(m.f1_defined ? m.f1 : NAN);
}

void dump_json(const ordered_json& j, const std::string& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace

void write_train_report_json(const TrainReport& report, const std::string& path) {
  ordered_json checkpoints = ordered_json::array();
  for (const TrainCheckpoint& cp : report.checkpoints) {
    checkpoints.push_back({{"iteration", cp.iteration},
                           {"val_loss", cp.val_loss},
                           {"val_metrics", metrics_to_json(cp.val_metrics)}});
  }
  ordered_json phases = ordered_json::array();
  for (const auto& [end_iteration, lr] : report.phases) {
    phases.push_back({{"end_iteration", end_iteration}, {"lr", lr}});
  }
  ordered_json trace = ordered_json::array();
  for (const auto& [iteration, loss] : report.batch_loss_trace) {
    trace.push_back(ordered_json::array({iteration, loss}));
  }
  dump_json({{"total_iterations", report.total_iterations},
             {"epochs_completed", report.epochs_completed},
             {"phases", phases},
             {"best_checkpoint", report.best_checkpoint},
             {"final_val_loss", report.final_val_loss},
             {"final_val_metrics", metrics_to_json(report.final_val_metrics)},
             {"checkpoints", checkpoints},
             {"batch_loss_trace", trace}},
            path);
}

void write_checkpoints_csv(const TrainReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "iteration,val_loss,acc,tpr,tnr,f1\n";
  for (const TrainCheckpoint& cp : report.checkpoints) {
    out << cp.iteration << ',' << num(cp.val_loss) << ',';
    metrics_csv_cells(out, cp.val_metrics);
    out << '\n';
  }
  finish(out, path);
}

void write_loss_trace_csv(const TrainReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "iteration,batch_loss\n";
  for (const auto& [iteration, loss] : report.batch_loss_trace) {
    out << iteration << ',' << num(loss) << '\n';
  }
  finish(out, path);
}

void write_trials_json(const std::vector<TrialResult>& trials, const std::string& path) {
  ordered_json rows = ordered_json::array();
  for (std::size_t rank = 0; rank < trials.size(); ++rank) {
    const TrialResult& t = trials[rank];
    rows.push_back({{"rank", rank},
                    {"grid_index", t.grid_index},
                    {"failed", t.failed},
                    {"error", t.error},
                    {"hyperparams", hp_to_json(t.hp)},
                    {"val_loss", t.failed ? ordered_json(nullptr) : ordered_json(t.val_loss)},
                    {"val_metrics", t.failed ? ordered_json(nullptr)
                                             : metrics_to_json(t.val_metrics)},
                    {"parameter_count", t.parameter_count},
                    {"model_file", t.model_file}});
  }
  dump_json(rows, path);
}

void write_trials_csv(const std::vector<TrialResult>& trials, const std::string& path) {
  auto out = open_out(path);
  out << "rank,grid_index,failed,hidden_widths,l1_lambda,lr,base_iterations,"
         "batch_size,seq_minutes,lag_minutes,seed,positive_class_weight,"
         "val_loss,acc,tpr,tnr,f1,parameter_count,model_file,error\n";
  for (std::size_t rank = 0; rank < trials.size(); ++rank) {
    const TrialResult& t = trials[rank];
    out << rank << ',' << t.grid_index << ',' << (t.failed ? 1 : 0) << ','
        << widths_label(t.hp.hidden_widths) << ',' << num(t.hp.l1_lambda) << ','
        << num(t.hp.lr) << ',' << t.hp.base_iterations << ',' << t.hp.batch_size
        << ',' << t.hp.seq_minutes << ',' << t.hp.lag_minutes << ','
        << t.hp.seed << ',' << num(t.hp.positive_class_weight) << ','
        << num(t.failed ? NAN : t.val_loss) << ',';
    if (t.failed) {
      out << "nan,nan,nan,nan";
    } else {
      metrics_csv_cells(out, t.val_metrics);
    }
    out << ',' << t.parameter_count << ',' << csv_escape(t.model_file) << ','
        << csv_escape(t.error) << '\n';
  }
  finish(out, path);
}

void write_eval_report_json(const EvalReport& report, const std::string& path) {
  ordered_json segments = ordered_json::array();
  for (std::size_t s = 0; s < report.series.segment_start.size(); ++s) {
    segments.push_back({{"start", report.series.segment_start[s]},
                        {"length", report.series.predicted[s].size()}});
  }
  dump_json(
      {{"n_samples", report.n_samples},
       {"confusion",
        {{"tp", report.counts.tp},
         {"fp", report.counts.fp},
         {"tn", report.counts.tn},
         {"fn", report.counts.fn}}},
       {"metrics", metrics_to_json(report.metrics)},
       {"actions",
        {{"matched", report.action_matched},
         {"eligible", report.action_eligible},
         {"correct_fraction",
          defined_or_null(report.action_correct, report.action_eligible > 0)}}},
       {"predicted_behavior", behavior_to_json(report.predicted_behavior)},
       {"actual_behavior", behavior_to_json(report.actual_behavior)},
       {"segments", segments}},
      path);
}

void write_metrics_csv(const EvalReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "n_samples,tp,fp,tn,fn,acc,tpr,tnr,f1,action_matched,action_eligible,"
         "action_correct,predicted_open_fraction,predicted_actions_per_day,"
         "actual_open_fraction,actual_actions_per_day\n";
  out << report.n_samples << ',' << report.counts.tp << ',' << report.counts.fp
      << ',' << report.counts.tn << ',' << report.counts.fn << ',';
  metrics_csv_cells(out, report.metrics);
  out << ',' << report.action_matched << ',' << report.action_eligible << ','
      << num(report.action_correct) << ','
      << num(report.predicted_behavior.open_fraction) << ','
      << num(report.predicted_behavior.actions_per_day) << ','
      << num(report.actual_behavior.open_fraction) << ','
      << num(report.actual_behavior.actions_per_day) << '\n';
  finish(out, path);
}

void write_durations_csv(const EvalReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "series,state,n_runs,q25_hours,median_hours,q75_hours,iqr_hours\n";
  const auto row = [&out](const char* series, const char* state,
                          const DurationSummary& d) {
    out << series << ',' << state << ',' << d.n_runs << ',' << num(d.q25) << ','
        << num(d.median) << ',' << num(d.q75) << ',' << num(d.iqr) << '\n';
  };
  row("actual", "open", report.actual_behavior.opening_durations);
  row("actual", "closed", report.actual_behavior.closing_durations);
  row("predicted", "open", report.predicted_behavior.opening_durations);
  row("predicted", "closed", report.predicted_behavior.closing_durations);
  finish(out, path);
}

void write_lag_sweep_csv(const LagSweepResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "lag,metric,min,q25,mean,median,q75,max\n";
  for (const LagCell& cell : result.cells) {
    const auto row = [&](const char* metric, const MetricDistribution& d) {
      out << cell.lag_minutes << ',' << metric << ',' << num(d.min) << ','
          << num(d.q25) << ',' << num(d.mean) << ',' << num(d.median) << ','
          << num(d.q75) << ',' << num(d.max) << '\n';
    };
    row("acc", cell.summary.acc);
    row("tpr", cell.summary.tpr);
    row("tnr", cell.summary.tnr);
    row("f1", cell.summary.f1);
  }
  finish(out, path);
}

void write_sparsity_csv(const SparsityReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "layer,total,zeros,fraction\n";
  for (const LayerSparsity& layer : report.layers) {
    out << layer.layer << ',' << layer.total << ',' << layer.zeros << ','
        << num(layer.fraction) << '\n';
  }
  out << "global," << report.total << ',' << report.zeros << ','
      << num(report.global_fraction) << '\n';
  finish(out, path);
}

void write_weight_map_csv(const WeightMap& map, const std::string& path) {
  std::vector<const char*> column_block(
      static_cast<std::size_t>(map.abs_weights.rows()), "");
  for (const BlockSummary& block : map.blocks) {
    for (std::size_t c = block.offset; c < block.offset + block.width; ++c) {
      column_block[c] = block.label.c_str();
    }
  }
  auto out = open_out(path);
  out << "neuron,column,block,abs_weight\n";
  for (Eigen::Index j = 0; j < map.abs_weights.cols(); ++j) {
    for (Eigen::Index c = 0; c < map.abs_weights.rows(); ++c) {
      out << j << ',' << c << ',' << column_block[static_cast<std::size_t>(c)]
          << ',' << num(map.abs_weights(c, j)) << '\n';
    }
  }
  finish(out, path);
}

void write_episode_csv(const EpisodeTrace& episode, const std::string& path) {
  auto out = open_out(path);
  out << "timestamp,co2,t_indoor,rh,window_open\n";
  for (const ClimateRecord& rec : episode.trace) {
    out << rec.timestamp << ',' << num(rec.co2) << ',' << num(rec.t_indoor)
        << ',' << num(rec.rh) << ',' << (rec.window_open ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_episode_index_csv(const CaseStudySet& set,
                             const std::vector<std::string>& trace_files,
                             const std::string& path) {
  if (trace_files.size() != set.episodes.size()) {
    throw std::invalid_argument("one trace file name per episode required");
  }
  auto out = open_out(path);
  out << "episode,file,observation_t,opening_t,lead_minutes,cause\n";
  for (std::size_t k = 0; k < set.episodes.size(); ++k) {
    const EpisodeTrace& e = set.episodes[k];
    out << k << ',' << csv_escape(trace_files[k]) << ',' << e.observation_t
        << ',' << e.opening_t << ',' << e.lead_minutes << ','
        << (e.cause ? to_string(*e.cause) : "") << '\n';
  }
  finish(out, path);
}

}  // namespace winpred
