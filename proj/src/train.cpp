#include "winpred/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "winpred/model_io.hpp"

namespace winpred {

namespace {

constexpr std::uint64_t kInitSeedTag = 0x11;
constexpr std::uint64_t kBatchSeedTag = 0x22;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Validation pass in bounded chunks: (loss including the L1 term, confusion).
std::pair<double, ConfusionCounts> eval_on(const Mlp& mlp, const SampleSet& set,
                                           double l1_lambda,
                                           double positive_class_weight) {
  constexpr Eigen::Index kChunk = 4096;
  const Eigen::Index n = set.X.rows();
  double ce = 0.0, total_weight = 0.0;
  ConfusionCounts counts;
  for (Eigen::Index start = 0; start < n; start += kChunk) {
    const Eigen::Index take = std::min(kChunk, n - start);
    const Eigen::MatrixXd probs = forward(mlp, set.X.middleRows(start, take));
    for (Eigen::Index r = 0; r < take; ++r) {
      const std::size_t row = static_cast<std::size_t>(start + r);
      const bool open = set.y[row] != 0;
      const double w = open ? positive_class_weight : 1.0;
      ce -= w * std::log(std::max(probs(r, open ? 1 : 0), 1e-12));
      total_weight += w;
      const bool pred_open = probs(r, 1) >= 0.5;
      if (pred_open && open) ++counts.tp;
      if (pred_open && !open) ++counts.fp;
      if (!pred_open && !open) ++counts.tn;
      if (!pred_open && open) ++counts.fn;
    }
  }
  return {ce / total_weight + l1_lambda * l1_weight_sum(mlp), counts};
}

// Runs fn(0..n_tasks-1) over a worker pool; fn must not throw (each task
// records its own failure).
void parallel_for(std::size_t n_tasks, std::size_t parallelism,
                  const std::function<void(std::size_t)>& fn) {
  if (parallelism <= 1 || n_tasks <= 1) {
    for (std::size_t k = 0; k < n_tasks; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min(parallelism, n_tasks);
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t k = next.fetch_add(1);
        if (k >= n_tasks) break;
        fn(k);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void Hyperparams::validate() const {
  if (hidden_widths.empty()) {
    throw std::invalid_argument("at least one hidden layer is required");
  }
  for (std::size_t w : hidden_widths) {
    if (w < 1) throw std::invalid_argument("hidden layer width must be >= 1");
  }
  if (!(l1_lambda >= 0.0)) throw std::invalid_argument("l1 penalty must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (base_iterations < 1) throw std::invalid_argument("base iteration count must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (seq_minutes < 1) throw std::invalid_argument("sequence duration must be >= 1 minute");
  if (lag_minutes < 1) throw std::invalid_argument("prediction lag must be >= 1 minute");
  if (checkpoint_interval < 1) {
    throw std::invalid_argument("checkpoint interval must be >= 1");
  }
  if (!(positive_class_weight > 0.0)) {
    throw std::invalid_argument("positive class weight must be > 0");
  }
}

std::vector<std::string> Hyperparams::range_warnings() const {
  std::vector<std::string> warnings;
  auto warn = [&](const std::string& msg) { warnings.push_back(msg); };
  if (hidden_widths.size() < 2 || hidden_widths.size() > 9) {
    warn("hidden layer count " + std::to_string(hidden_widths.size()) +
         " outside the searched range [2, 9]");
  }
  for (std::size_t w : hidden_widths) {
    if (w > 400) {
      warn("hidden width " + std::to_string(w) + " outside the searched range [1, 400]");
      break;
    }
  }
  if (l1_lambda < 1e-5 || l1_lambda > 1e-1) {
    warn("l1 penalty " + std::to_string(l1_lambda) +
         " outside the searched range [1e-5, 1e-1]");
  }
  if (lr < 0.01 || lr > 0.2) {
    warn("learning rate " + std::to_string(lr) +
         " outside the searched range [0.01, 0.2]");
  }
  if (base_iterations < 10000 || base_iterations > 90000) {
    warn("base iteration count " + std::to_string(base_iterations) +
         " outside the searched range [10k, 90k]");
  }
  if (batch_size != 128) {
    warn("batch size " + std::to_string(batch_size) + " differs from the fixed 128");
  }
  static constexpr std::size_t kSeqOptions[] = {30, 60, 90, 120, 180, 240};
  if (std::find(std::begin(kSeqOptions), std::end(kSeqOptions), seq_minutes) ==
      std::end(kSeqOptions)) {
    warn("sequence duration " + std::to_string(seq_minutes) +
         " not one of the searched durations {30, 60, 90, 120, 180, 240}");
  }
  if (lag_minutes < 10 || lag_minutes > 60) {
    warn("prediction lag " + std::to_string(lag_minutes) +
         " outside the studied range [10, 60]");
  }
  return warnings;
}

EpochSampler::EpochSampler(std::size_t n_samples, std::uint64_t seed) : rng_(seed) {
  if (n_samples == 0) throw std::invalid_argument("sampler needs at least one sample");
  order_.resize(n_samples);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  pos_ = n_samples;  // first call starts a fresh shuffled epoch
}

void EpochSampler::next_batch(std::size_t batch_size, std::vector<std::size_t>& out) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (pos_ >= order_.size()) {
    shuffle(order_, rng_);
    pos_ = 0;
  }
  // the trailing short batch of an epoch is used as-is
  const std::size_t take = std::min(batch_size, order_.size() - pos_);
  out.assign(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
             order_.begin() + static_cast<std::ptrdiff_t>(pos_ + take));
  pos_ += take;
  consumed_ += take;
}

void run_iterations(Mlp& mlp, const SampleSet& train, EpochSampler& sampler,
                    std::size_t iterations, double lr, double l1_lambda,
                    std::size_t batch_size, double positive_class_weight,
                    const std::function<void(std::size_t, double)>& on_step) {
  if (train.size() == 0) throw std::invalid_argument("training set is empty");
  if (sampler.n_samples() != train.size()) {
    throw std::invalid_argument("sampler does not match the training set size");
  }
  if (mlp.input_dim() != train.dim()) {
    throw std::invalid_argument("network input dimension does not match the samples");
  }
  std::vector<std::size_t> idx;
  std::vector<std::uint8_t> yb;
  ActivationCache cache;
  for (std::size_t k = 0; k < iterations; ++k) {
    sampler.next_batch(batch_size, idx);
    Eigen::MatrixXd Xb(static_cast<Eigen::Index>(idx.size()), train.X.cols());
    yb.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      Xb.row(static_cast<Eigen::Index>(r)) =
          train.X.row(static_cast<Eigen::Index>(idx[r]));
      yb[r] = train.y[idx[r]];
    }
    const Eigen::MatrixXd probs = forward(mlp, Xb, &cache);
    if (!probs.allFinite()) {
      throw std::runtime_error(
          "training diverged: non-finite loss at step " + std::to_string(k + 1) +
          " of this phase (lr " + std::to_string(lr) + ", l1 " +
          std::to_string(l1_lambda) + ")");
    }
    double ce = 0.0;
    if (on_step) {
      double total_weight = 0.0;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const bool open = yb[r] != 0;
        const double w = open ? positive_class_weight : 1.0;
        ce -= w * std::log(std::max(
                  probs(static_cast<Eigen::Index>(r), open ? 1 : 0), 1e-12));
        total_weight += w;
      }
      ce /= total_weight;
    }
    const GradientSet grads = backward(mlp, cache, yb, positive_class_weight);
    mlp = prox_step(std::move(mlp), grads, lr, l1_lambda);
    if (on_step) on_step(k, ce);
  }
}

TrainResult train(const SampleSet& train_set, const SampleSet& val_set,
                  const Hyperparams& hp) {
  hp.validate();
  if (train_set.size() == 0) throw std::invalid_argument("training set is empty");
  if (val_set.size() == 0) throw std::invalid_argument("validation set is empty");
  if (train_set.dim() != val_set.dim()) {
    throw std::invalid_argument("training and validation sample dimensions differ");
  }
  if (train_set.tag != SplitTag::unspecified && train_set.tag == val_set.tag) {
    throw std::invalid_argument(
        "training and validation sets carry the same split tag; validation "
        "data must be disjoint in time from training data");
  }

  std::vector<std::size_t> widths;
  widths.reserve(hp.hidden_widths.size() + 2);
  widths.push_back(train_set.dim());
  widths.insert(widths.end(), hp.hidden_widths.begin(), hp.hidden_widths.end());
  widths.push_back(2);

  Mlp mlp = init_mlp(widths, derive_seed(hp.seed, kInitSeedTag));
  EpochSampler sampler(train_set.size(), derive_seed(hp.seed, kBatchSeedTag));

  TrainReport report;
  report.total_iterations = hp.total_iterations();
  report.phases = {{hp.base_iterations, hp.lr},
                   {hp.base_iterations + 10000, hp.lr / 10.0},
                   {hp.base_iterations + 20000, hp.lr / 100.0}};
  const std::size_t trace_interval =
      std::max<std::size_t>(1, report.total_iterations / 1000);

  Mlp best_model = mlp;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  std::size_t global = 0;

  const auto t0 = std::chrono::steady_clock::now();
  auto on_step = [&](std::size_t, double ce) {
    ++global;
    if (global == 1 || global == report.total_iterations ||
        global % trace_interval == 0) {
      report.batch_loss_trace.emplace_back(
          global, ce + hp.l1_lambda * l1_weight_sum(mlp));
    }
    if (global % hp.checkpoint_interval == 0 || global == report.total_iterations) {
      const auto [vloss, counts] =
          eval_on(mlp, val_set, hp.l1_lambda, hp.positive_class_weight);
      TrainCheckpoint cp;
      cp.iteration = global;
      cp.val_loss = vloss;
      cp.val_metrics = classification_metrics(counts);
      report.checkpoints.push_back(cp);
      // strict improvement: on ties the earliest checkpoint stays the best
      if (vloss < best_loss) {
        best_loss = vloss;
        best_index = report.checkpoints.size() - 1;
        best_model = mlp;
      }
    }
  };

  for (const auto& [phase_end, phase_lr] : report.phases) {
    run_iterations(mlp, train_set, sampler, phase_end - global, phase_lr,
                   hp.l1_lambda, hp.batch_size, hp.positive_class_weight, on_step);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.epochs_completed = static_cast<double>(sampler.samples_consumed()) /
                            static_cast<double>(train_set.size());
  report.best_checkpoint = best_index;
  report.final_val_loss = report.checkpoints.back().val_loss;
  report.final_val_metrics = report.checkpoints.back().val_metrics;

  TrainResult result;
  result.final_model = std::move(mlp);
  result.best_model = std::move(best_model);
  result.report = std::move(report);
  return result;
}

std::vector<Hyperparams> expand_grid(const GridSpec& spec) {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw std::invalid_argument(std::string("grid axis is empty: ") + what);
    }
  };
  require(!spec.hidden_widths_options.empty(), "hidden widths");
  require(!spec.l1_lambdas.empty(), "l1 penalties");
  require(!spec.lrs.empty(), "learning rates");
  require(!spec.base_iterations_options.empty(), "base iterations");
  require(!spec.seq_minutes_options.empty(), "sequence durations");
  require(!spec.lag_minutes_options.empty(), "prediction lags");

  std::vector<Hyperparams> grid;
  for (const auto& widths : spec.hidden_widths_options) {
    for (double lambda : spec.l1_lambdas) {
      for (double lr : spec.lrs) {
        for (std::size_t base : spec.base_iterations_options) {
          for (std::size_t seq : spec.seq_minutes_options) {
            for (std::size_t lag : spec.lag_minutes_options) {
              Hyperparams hp = spec.base;
              hp.hidden_widths = widths;
              hp.l1_lambda = lambda;
              hp.lr = lr;
              hp.base_iterations = base;
              hp.seq_minutes = seq;
              hp.lag_minutes = lag;
              hp.validate();
              // the documented search ranges are binding for grids
              const auto warnings = hp.range_warnings();
              if (!warnings.empty()) {
                throw std::invalid_argument("grid value outside the searched range: " +
                                            warnings.front());
              }
              grid.push_back(std::move(hp));
            }
          }
        }
      }
    }
  }
  return grid;
}

std::vector<TrialResult> grid_search(const std::vector<Hyperparams>& grid,
                                     const Dataset& train_data,
                                     const Dataset& val_data,
                                     std::size_t parallelism,
                                     const std::string& model_dir) {
  if (grid.empty()) throw std::invalid_argument("hyperparameter grid is empty");

  // stacked sample sets are built once per distinct (duration, lag) pair and
  // shared read-only across trials
  struct StackCache {
    bool failed = false;
    std::string error;
    SampleSet train, val;
    Normalizer norm;
  };
  std::map<std::pair<std::size_t, std::size_t>, StackCache> caches;
  for (const auto& hp : grid) {
    const auto key = std::make_pair(hp.seq_minutes, hp.lag_minutes);
    if (caches.count(key)) continue;
    StackCache cache;
    try {
      const auto train_list = stack_all(train_data, hp.seq_minutes, hp.lag_minutes);
      const auto val_list = stack_all(val_data, hp.seq_minutes, hp.lag_minutes);
      if (train_list.size() < 2) {
        throw std::runtime_error("not enough training samples after stacking");
      }
      if (val_list.empty()) {
        throw std::runtime_error("no validation samples after stacking");
      }
      cache.norm = fit_normalizer(train_list);
      cache.train = to_sample_set(train_list, SplitTag::train);
      cache.val = to_sample_set(val_list, SplitTag::val);
      apply_normalizer(cache.norm, cache.train);
      apply_normalizer(cache.norm, cache.val);
    } catch (const std::exception& e) {
      cache.failed = true;
      cache.error = e.what();
    }
    caches.emplace(key, std::move(cache));
  }

  if (!model_dir.empty()) {
    std::filesystem::create_directories(model_dir);
  }

  std::vector<TrialResult> results(grid.size());
  parallel_for(grid.size(), parallelism, [&](std::size_t k) {
    TrialResult r;
    r.grid_index = k;
    r.hp = grid[k];
    // per-trial seed from (configured seed, grid position): reproducible and
    // independent of scheduling
    r.hp.seed = derive_seed(grid[k].seed, k);
    const auto& cache = caches.at({r.hp.seq_minutes, r.hp.lag_minutes});
    if (cache.failed) {
      r.failed = true;
      r.error = cache.error;
    } else {
      try {
        TrainResult tr = train(cache.train, cache.val, r.hp);
        r.val_loss = tr.report.final_val_loss;
        r.val_metrics = tr.report.final_val_metrics;
        r.parameter_count = tr.final_model.parameter_count();
        if (!model_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof(name), "trial_%04zu.model", k);
          const std::string path =
              (std::filesystem::path(model_dir) / name).string();
          ModelBundle bundle;
          bundle.mlp = std::move(tr.final_model);
          bundle.normalizer = cache.norm;
          bundle.seq_minutes = r.hp.seq_minutes;
          bundle.lag_minutes = r.hp.lag_minutes;
          bundle.n_static = train_data.schema.static_count();
          save_model(bundle, path);
          r.model_file = path;
        }
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
      }
    }
    results[k] = std::move(r);
  });

  // rank: successful first, F1 descending, then accuracy, then fewer
  // parameters, then grid order
  auto metric_or = [](double v, double fallback) {
    return std::isnan(v) ? fallback : v;
  };
  std::sort(results.begin(), results.end(),
            [&](const TrialResult& a, const TrialResult& b) {
              if (a.failed != b.failed) return b.failed;
              if (!a.failed) {
                const double fa = metric_or(a.val_metrics.f1, -1.0);
                const double fb = metric_or(b.val_metrics.f1, -1.0);
                if (fa != fb) return fa > fb;
                const double aa = metric_or(a.val_metrics.acc, -1.0);
                const double ab = metric_or(b.val_metrics.acc, -1.0);
                if (aa != ab) return aa > ab;
                if (a.parameter_count != b.parameter_count) {
                  return a.parameter_count < b.parameter_count;
                }
              }
              return a.grid_index < b.grid_index;
            });
  return results;
}

MetricDistribution summarize_distribution(const std::vector<double>& values) {
  std::vector<double> defined;
  defined.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) defined.push_back(v);
  }
  MetricDistribution d;
  d.n = defined.size();
  if (defined.empty()) {
    d.min = d.q25 = d.mean = d.median = d.q75 = d.max = kNaN;
    return d;
  }
  const auto [lo, hi] = std::minmax_element(defined.begin(), defined.end());
  d.min = *lo;
  d.max = *hi;
  d.mean = std::accumulate(defined.begin(), defined.end(), 0.0) /
           static_cast<double>(defined.size());
  d.q25 = quantile(defined, 0.25);
  d.median = quantile(defined, 0.5);
  d.q75 = quantile(defined, 0.75);
  return d;
}

RepeatSummary repeat_train(const Hyperparams& hp, std::size_t n,
                           const SampleSet& train_set, const SampleSet& val_set,
                           const SampleSet& test_set, std::size_t parallelism) {
  if (n < 2) throw std::invalid_argument("repeated training needs n >= 2 runs");
  if (test_set.size() == 0) throw std::invalid_argument("test set is empty");
  if (test_set.dim() != train_set.dim()) {
    throw std::invalid_argument("test sample dimension differs from training");
  }

  struct Slot {
    bool ok = false;
    std::uint64_t seed = 0;
    ClassificationMetrics metrics;
    std::string error;
  };
  std::vector<Slot> slots(n);
  parallel_for(n, parallelism, [&](std::size_t k) {
    Slot& slot = slots[k];
    Hyperparams run_hp = hp;
    run_hp.seed = hp.seed + k;
    slot.seed = run_hp.seed;
    try {
      const TrainResult tr = train(train_set, val_set, run_hp);
      const auto preds = predict_batch(tr.final_model, test_set.X);
      slot.metrics = classification_metrics(confusion(preds, test_set.y));
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  RepeatSummary summary;
  std::vector<double> accs, tprs, tnrs, f1s;
  for (const auto& slot : slots) {
    if (slot.ok) {
      summary.seeds.push_back(slot.seed);
      summary.per_seed.push_back(slot.metrics);
      accs.push_back(slot.metrics.acc);
      tprs.push_back(slot.metrics.tpr);
      tnrs.push_back(slot.metrics.tnr);
      f1s.push_back(slot.metrics.f1);
    } else {
      summary.failures.push_back("seed " + std::to_string(slot.seed) + ": " +
                                 slot.error);
    }
  }
  summary.acc = summarize_distribution(accs);
  summary.tpr = summarize_distribution(tprs);
  summary.tnr = summarize_distribution(tnrs);
  summary.f1 = summarize_distribution(f1s);
  return summary;
}

}  // namespace winpred
