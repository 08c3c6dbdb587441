// Acceptance gate for the window-state prediction pipeline: ten end-to-end
// properties covering gradient correctness, reproducibility, sparsity,
// learnability of planted rules, study shapes, metric oracles, the decay
// schedule, and the training-speed budget. Prints one line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "winpred/analysis.hpp"
#include "winpred/dataset.hpp"
#include "winpred/evaluate.hpp"
#include "winpred/metrics.hpp"
#include "winpred/model_io.hpp"
#include "winpred/network.hpp"
#include "winpred/report_io.hpp"
#include "winpred/rng.hpp"
#include "winpred/stacking.hpp"
#include "winpred/synthetic.hpp"
#include "winpred/train.hpp"

namespace fs = std::filesystem;
using namespace winpred;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

Eigen::MatrixXd gaussian_batch(std::size_t rows, std::size_t cols, Rng& rng) {
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) X(r, c) = rng.next_gaussian();
  }
  return X;
}

std::vector<std::uint8_t> bernoulli_labels(std::size_t n, double p, Rng& rng) {
  std::vector<std::uint8_t> y(n);
  for (auto& v : y) v = rng.next_bernoulli(p) ? 1 : 0;
  return y;
}

double min_hidden_preactivation(const Mlp& mlp, const Eigen::MatrixXd& X) {
  ActivationCache cache;
  forward(mlp, X, &cache);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < mlp.n_layers(); ++n) {
    lo = std::min(lo, cache.pre[n].cwiseAbs().minCoeff());
  }
  return lo;
}

// Maximum relative error between analytic gradients and central finite
// differences over every parameter of the network.
double gradcheck(Mlp& mlp, const Eigen::MatrixXd& X,
                 const std::vector<std::uint8_t>& y) {
  const double h = 1e-5;
  ActivationCache cache;
  forward(mlp, X, &cache);
  const GradientSet grads = backward(mlp, cache, y);
  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss(mlp, X, y, 0.0);
    param = saved - h;
    const double down = loss(mlp, X, y, 0.0);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::fabs(analytic), std::fabs(fd), 1e-6});
    worst = std::max(worst, std::fabs(analytic - fd) / denom);
  };
  for (std::size_t n = 0; n < mlp.n_layers(); ++n) {
    for (Eigen::Index idx = 0; idx < mlp.weights[n].size(); ++idx) {
      probe(mlp.weights[n].data()[idx], grads.d_weights[n].data()[idx]);
    }
    for (Eigen::Index idx = 0; idx < mlp.biases[n].size(); ++idx) {
      probe(mlp.biases[n].data()[idx], grads.d_biases[n].data()[idx]);
    }
  }
  return worst;
}

struct StackedSplit {
  SampleSet train, val, test;
  Normalizer norm;
};

StackedSplit stack_splits(const Dataset& train_part, const Dataset& val_part,
                          const Dataset& test_part, std::size_t i,
                          std::size_t l) {
  const auto train_list = stack_all(train_part, i, l);
  const auto val_list = stack_all(val_part, i, l);
  const auto test_list = stack_all(test_part, i, l);
  StackedSplit out;
  out.norm = fit_normalizer(train_list);
  out.train = to_sample_set(train_list, SplitTag::train);
  out.val = to_sample_set(val_list, SplitTag::val);
  out.test = to_sample_set(test_list, SplitTag::test);
  apply_normalizer(out.norm, out.train);
  apply_normalizer(out.norm, out.val);
  apply_normalizer(out.norm, out.test);
  return out;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void replace_all(std::string& text, const std::string& from,
                 const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

// ---------------------------------------------------------------------------
// 1. analytic gradients match central finite differences (h = 1e-5) with
//    max relative error < 1e-4 over 20 random seeds on a 21-16-8-2 net,
//    in under 30 seconds
Check criterion_gradients() {
  Check c;
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Mlp mlp = init_mlp({21, 16, 8, 2}, derive_seed(1000, seed));
    Rng rng(derive_seed(2000, seed));
    Eigen::MatrixXd X;
    std::vector<std::uint8_t> y;
    // finite differences get polluted when a hidden pre-activation sits
    // within the probe step of the ReLU kink; redraw the batch until clear
    int draws = 0;
    do {
      X = gaussian_batch(8, 21, rng);
      y = bernoulli_labels(8, 0.5, rng);
    } while (min_hidden_preactivation(mlp, X) <= 1e-4 && ++draws < 100);
    worst = std::max(worst, gradcheck(mlp, X, y));
  }
  const double elapsed = seconds_since(start);
  c.require(worst < 1e-4, "max relative error " + fmt(worst) + " not < 1e-4");
  c.require(elapsed < 30.0, "took " + fmt(elapsed) + "s, over the 30s budget");
  c.note("max rel err " + fmt(worst, 3) + " over 20 seeds, " +
         fmt(elapsed, 3) + "s");
  return c;
}

// 2. stacked input dimensionality: 21 static features with 60 minutes of
//    history give 201 inputs; with 240 minutes, 741
Check criterion_dimensions() {
  Check c;
  c.require(input_dim(21, 60) == 201,
            "input_dim(21,60) = " + std::to_string(input_dim(21, 60)));
  c.require(input_dim(21, 240) == 741,
            "input_dim(21,240) = " + std::to_string(input_dim(21, 240)));
  c.note("input_dim(21,60) = 201, input_dim(21,240) = 741");
  return c;
}

// 3. soft-threshold exactness bit for bit; trained zero-weight fraction
//    non-decreasing in the L1 penalty over {1e-5, 1e-3, 1e-1}; first-layer
//    zero fraction above 0.5 at penalty 1e-1
Check criterion_sparsity() {
  Check c;

  // unit cases on the first layer of a tiny net, compared bitwise against
  // the closed form
  Mlp unit = init_mlp({2, 2, 2}, 0);
  unit.weights[0] << 0.7, -0.3, 0.05, 0.0;
  unit.biases[0] << 0.4, -0.2;
  GradientSet grads;
  grads.d_weights.push_back((Eigen::MatrixXd(2, 2) << 0.2, -0.1, 0.0, 0.3).finished());
  grads.d_biases.push_back((Eigen::VectorXd(2) << 0.1, -0.1).finished());
  grads.d_weights.push_back(Eigen::MatrixXd::Zero(2, 2));
  grads.d_biases.push_back(Eigen::VectorXd::Zero(2));
  const double lr = 0.1, lambda = 1.0;
  const Mlp stepped = prox_step(unit, grads, lr, lambda);
  for (Eigen::Index idx = 0; idx < 4; ++idx) {
    const double v = unit.weights[0].data()[idx] - lr * grads.d_weights[0].data()[idx];
    const double expected =
        std::fabs(v) <= lr * lambda ? 0.0 : std::copysign(std::fabs(v) - lr * lambda, v);
    c.require(stepped.weights[0].data()[idx] == expected,
              "soft-threshold mismatch at weight " + std::to_string(idx));
  }
  c.require(stepped.weights[0](1, 0) == 0.0, "inside-threshold weight not exactly zero");
  for (Eigen::Index idx = 0; idx < 2; ++idx) {
    const double expected = unit.biases[0](idx) - lr * grads.d_biases[0](idx);
    c.require(stepped.biases[0](idx) == expected, "bias took a thresholded step");
  }
  const Mlp plain = prox_step(unit, grads, lr, 0.0);
  for (Eigen::Index idx = 0; idx < 4; ++idx) {
    const double expected = unit.weights[0].data()[idx] - lr * grads.d_weights[0].data()[idx];
    c.require(plain.weights[0].data()[idx] == expected,
              "zero-penalty step differs from plain gradient descent");
  }

  // one fixed task and seed, three penalties
  SyntheticConfig gen;
  gen.n_days = 4;
  gen.seed = 4242;
  const Dataset data = generate_synthetic(gen).dataset;
  const auto [train_part, val_part, test_part] =
      split(data, SplitFractions{0.6, 0.2, 0.2});
  const StackedSplit stacked = stack_splits(train_part, val_part, test_part, 30, 10);

  Hyperparams hp;
  hp.hidden_widths = {16, 8};
  hp.lr = 0.05;
  hp.base_iterations = 1000;
  hp.batch_size = 32;
  hp.seq_minutes = 30;
  hp.lag_minutes = 10;
  hp.checkpoint_interval = 10000;
  hp.seed = 77;

  std::vector<double> global_fractions;
  double first_layer_at_strongest = 0.0;
  for (double penalty : {1e-5, 1e-3, 1e-1}) {
    hp.l1_lambda = penalty;
    const TrainResult result = train(stacked.train, stacked.val, hp);
    const SparsityReport report = zero_fractions(result.final_model);
    global_fractions.push_back(report.global_fraction);
    first_layer_at_strongest = report.layers.front().fraction;
  }
  c.require(global_fractions[0] <= global_fractions[1] &&
                global_fractions[1] <= global_fractions[2],
            "zero fraction not non-decreasing in the penalty: " +
                fmt(global_fractions[0]) + ", " + fmt(global_fractions[1]) +
                ", " + fmt(global_fractions[2]));
  c.require(first_layer_at_strongest > 0.5,
            "first-layer zero fraction " + fmt(first_layer_at_strongest) +
                " not > 0.5 at penalty 1e-1");
  c.note("zero fractions " + fmt(global_fractions[0], 3) + " <= " +
         fmt(global_fractions[1], 3) + " <= " + fmt(global_fractions[2], 3) +
         "; first layer " + fmt(first_layer_at_strongest, 3) + " at 1e-1");
  return c;
}

// 4. identical data + hyperparameters + seed give bit-identical saved models
//    and serialized reports, and grid search results do not depend on the
//    parallelism degree
Check criterion_determinism(const fs::path& work) {
  Check c;
  SyntheticConfig gen;
  gen.n_days = 2;
  gen.seed = 999;
  const Dataset data = generate_synthetic(gen).dataset;
  const auto [train_part, val_part, test_part] =
      split(data, SplitFractions{0.6, 0.2, 0.2});
  const StackedSplit stacked = stack_splits(train_part, val_part, test_part, 30, 10);

  Hyperparams hp;
  hp.hidden_widths = {8};
  hp.l1_lambda = 1e-3;
  hp.lr = 0.05;
  hp.base_iterations = 300;
  hp.batch_size = 32;
  hp.seq_minutes = 30;
  hp.lag_minutes = 10;
  hp.checkpoint_interval = 5000;
  hp.seed = 31;

  auto bundle_of = [&](const Mlp& mlp) {
    ModelBundle bundle;
    bundle.mlp = mlp;
    bundle.normalizer = stacked.norm;
    bundle.seq_minutes = hp.seq_minutes;
    bundle.lag_minutes = hp.lag_minutes;
    bundle.n_static = data.schema.static_count();
    return bundle;
  };
  const TrainResult run_a = train(stacked.train, stacked.val, hp);
  const TrainResult run_b = train(stacked.train, stacked.val, hp);
  save_model(bundle_of(run_a.final_model), (work / "a.bin").string());
  save_model(bundle_of(run_b.final_model), (work / "b.bin").string());
  write_train_report_json(run_a.report, (work / "a.json").string());
  write_train_report_json(run_b.report, (work / "b.json").string());
  c.require(read_bytes(work / "a.bin") == read_bytes(work / "b.bin"),
            "repeated training wrote different model files");
  c.require(read_bytes(work / "a.json") == read_bytes(work / "b.json"),
            "repeated training wrote different reports");

  // the same two-trial grid at parallelism 1 and 8
  GridSpec spec;
  spec.hidden_widths_options = {{4, 4}, {6, 4}};
  spec.l1_lambdas = {1e-3};
  spec.lrs = {0.05};
  spec.base_iterations_options = {10000};
  spec.seq_minutes_options = {30};
  spec.lag_minutes_options = {10};
  spec.base.batch_size = 128;
  spec.base.checkpoint_interval = 10000;
  spec.base.seed = 7;
  const std::vector<Hyperparams> grid = expand_grid(spec);
  const fs::path dir1 = work / "grid_p1";
  const fs::path dir8 = work / "grid_p8";
  fs::create_directories(dir1);
  fs::create_directories(dir8);
  const auto trials1 = grid_search(grid, train_part, val_part, 1, dir1.string());
  const auto trials8 = grid_search(grid, train_part, val_part, 8, dir8.string());
  for (const char* name : {"trial_0000.model", "trial_0001.model"}) {
    c.require(read_bytes(dir1 / name) == read_bytes(dir8 / name),
              std::string("grid parallelism changed ") + name);
  }
  write_trials_json(trials1, (work / "t1.json").string());
  write_trials_json(trials8, (work / "t8.json").string());
  std::string report8 = read_bytes(work / "t8.json");
  replace_all(report8, dir8.string(), dir1.string());
  c.require(read_bytes(work / "t1.json") == report8,
            "grid parallelism changed the trial report");
  c.note("training reruns and grid parallelism 1 vs 8 byte-identical");
  return c;
}

// 5. on data where openings follow a pure co2-threshold rule, the trained
//    model reaches test F1 >= 0.8 and the co2 history block carries the
//    largest mean absolute first-layer weight among the sequence blocks
Check criterion_planted_rule() {
  Check c;
  SyntheticConfig gen = SyntheticConfig::co2_only();
  gen.n_days = 12;
  gen.seed = 777;
  const Dataset data = generate_synthetic(gen).dataset;
  const auto [train_part, val_part, test_part] =
      split(data, SplitFractions{0.6, 0.2, 0.2});
  const StackedSplit stacked = stack_splits(train_part, val_part, test_part, 60, 10);

  Hyperparams hp;
  hp.hidden_widths = {16, 8};
  hp.l1_lambda = 1e-4;
  hp.lr = 0.05;
  hp.base_iterations = 10000;
  hp.batch_size = 128;
  hp.seq_minutes = 60;
  hp.lag_minutes = 10;
  hp.checkpoint_interval = 2000;
  hp.seed = 5;
  const TrainResult result = train(stacked.train, stacked.val, hp);

  ModelBundle bundle;
  bundle.mlp = result.best_model;
  bundle.normalizer = stacked.norm;
  bundle.seq_minutes = hp.seq_minutes;
  bundle.lag_minutes = hp.lag_minutes;
  bundle.n_static = data.schema.static_count();
  const EvalReport report = evaluate_model(bundle, test_part);
  c.require(report.metrics.f1_defined, "test F1 undefined");
  c.require(report.metrics.f1 >= 0.8,
            "test F1 " + fmt(report.metrics.f1) + " below 0.8");

  const WeightMap map = first_layer_map(bundle.mlp, data.schema, hp.seq_minutes);
  double co2 = 0.0, rh = 0.0, t_indoor = 0.0;
  for (const BlockSummary& block : map.blocks) {
    if (block.label == "co2") co2 = block.mean_abs_weight;
    if (block.label == "rh") rh = block.mean_abs_weight;
    if (block.label == "t_indoor") t_indoor = block.mean_abs_weight;
  }
  c.require(co2 > rh && co2 > t_indoor,
            "co2 block mean |w| " + fmt(co2) + " not above rh " + fmt(rh) +
                " and t_indoor " + fmt(t_indoor));
  c.note("test F1 " + fmt(report.metrics.f1, 3) + "; first-layer mean |w|: co2 " +
         fmt(co2, 3) + ", rh " + fmt(rh, 3) + ", t_indoor " + fmt(t_indoor, 3));
  return c;
}

// 6. with causal memory of at most an hour in the generator, lengthening the
//    input history beyond 60 minutes brings no F1 gain beyond one standard
//    deviation over 5 seeds
Check criterion_duration_plateau() {
  Check c;
  // single-rule data whose entire open -> vent -> rebuild -> re-cross cycle
  // completes inside an hour: episodes of ~16 minutes and a fast co2 build
  // put every opening cause and state cue within the last 60 minutes, so
  // longer history carries no extra information, and the ~10 episodes per
  // day keep the seed-to-seed spread small. The L1 penalty prunes the slowly
  // drifting calendar/weather statics whose z-scores leave the training
  // range on the chronologically later test days.
  SyntheticConfig gen = SyntheticConfig::co2_only();
  gen.n_days = 24;
  gen.seed = 1313;
  gen.duration_log_mean = 2.77;
  gen.duration_log_std = 0.3;
  gen.co2_per_occupant = 4.0;
  gen.vent_decay_closed = 0.004;
  const Dataset data = generate_synthetic(gen).dataset;
  const auto [train_part, val_part, test_part] =
      split(data, SplitFractions{0.6, 0.2, 0.2});

  Hyperparams hp;
  hp.hidden_widths = {16};
  hp.l1_lambda = 1e-3;
  hp.lr = 0.02;
  hp.base_iterations = 6000;
  hp.batch_size = 128;
  hp.lag_minutes = 10;
  hp.checkpoint_interval = 10000;
  hp.seed = 100;

  const std::vector<std::size_t> durations{30, 60, 90, 120, 180, 240};
  std::vector<double> means, stds;
  std::string profile;
  for (std::size_t i : durations) {
    const StackedSplit stacked =
        stack_splits(train_part, val_part, test_part, i, hp.lag_minutes);
    hp.seq_minutes = i;
    const RepeatSummary summary =
        repeat_train(hp, 5, stacked.train, stacked.val, stacked.test, 1);
    c.require(summary.failures.empty(),
              "training failed at duration " + std::to_string(i));
    std::vector<double> f1s;
    for (const auto& m : summary.per_seed) {
      if (m.f1_defined) f1s.push_back(m.f1);
    }
    c.require(f1s.size() == 5, "undefined F1 at duration " + std::to_string(i));
    means.push_back(summary.f1.mean);
    stds.push_back(sample_std(f1s));
    profile += (profile.empty() ? "" : ", ") + std::to_string(i) + ": " +
               fmt(summary.f1.mean, 3) + "+-" + fmt(stds.back(), 3);
  }
  // the reference is the better of the two short histories: an hour of
  // history subsumes half an hour, so any gap between them is seed noise
  const std::size_t base = means[0] > means[1] ? 0 : 1;
  for (std::size_t k = 2; k < durations.size(); ++k) {
    const double gain = means[k] - means[base];
    const double tolerance = std::max(stds[base], stds[k]);
    c.require(gain <= tolerance,
              "duration " + std::to_string(durations[k]) + " improved F1 by " +
                  fmt(gain) + ", beyond one standard deviation " + fmt(tolerance));
  }
  c.note("reference duration " + std::to_string(durations[base]) +
         "; mean F1 by duration (5 seeds): " + profile);
  return c;
}

// 7. mean F1 over 5 seeds degrades as the prediction lag grows from 10 to 60
//    minutes: the least-squares slope over the six lags is negative
Check criterion_lag_degradation() {
  Check c;
  SyntheticConfig gen;
  gen.n_days = 10;
  gen.seed = 2024;
  const Dataset data = generate_synthetic(gen).dataset;
  const auto [train_part, val_part, test_part] =
      split(data, SplitFractions{0.6, 0.2, 0.2});

  Hyperparams hp;
  hp.hidden_widths = {12};
  hp.l1_lambda = 1e-4;
  hp.lr = 0.05;
  hp.base_iterations = 1500;
  hp.batch_size = 64;
  hp.seq_minutes = 30;
  hp.checkpoint_interval = 10000;
  hp.seed = 200;
  hp.positive_class_weight = 3.0;

  const LagSweepResult sweep = lag_sweep(hp, {10, 20, 30, 40, 50, 60},
                                         train_part, val_part, test_part, 5, 1);
  double x_mean = 0.0, y_mean = 0.0;
  std::string profile;
  for (const LagCell& cell : sweep.cells) {
    x_mean += static_cast<double>(cell.lag_minutes);
    y_mean += cell.summary.f1.mean;
    profile += (profile.empty() ? "" : ", ") +
               std::to_string(cell.lag_minutes) + ": " +
               fmt(cell.summary.f1.mean, 3);
  }
  x_mean /= static_cast<double>(sweep.cells.size());
  y_mean /= static_cast<double>(sweep.cells.size());
  double sxy = 0.0, sxx = 0.0;
  for (const LagCell& cell : sweep.cells) {
    const double dx = static_cast<double>(cell.lag_minutes) - x_mean;
    sxy += dx * (cell.summary.f1.mean - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  c.require(slope < 0.0, "fitted F1 slope " + fmt(slope) + " not negative");
  c.note("mean F1 by lag (5 seeds): " + profile + "; slope " + fmt(slope, 3) +
         " per minute");
  return c;
}

// 8. metric implementations agree with brute-force oracles on 1000 random
//    series; accuracy decomposes exactly into p*TPR + (1-p)*TNR; the
//    reference operating point (p=0.07, TPR 0.37, TNR 0.92) lands within
//    0.005 of accuracy 0.88
Check criterion_metric_oracles() {
  Check c;
  Rng rng(881);
  const double tol = 1e-12;
  for (int trial = 0; trial < 1000 && c.pass; ++trial) {
    const std::size_t len = 2 + rng.next_below(199);
    const double p_open = 0.05 + 0.9 * rng.next_double();
    const auto predicted = bernoulli_labels(len, 0.05 + 0.9 * rng.next_double(), rng);
    const auto actual = bernoulli_labels(len, p_open, rng);

    // confusion counts by direct tally
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < len; ++k) {
      if (predicted[k] && actual[k]) ++tp;
      else if (predicted[k] && !actual[k]) ++fp;
      else if (!predicted[k] && !actual[k]) ++tn;
      else ++fn;
    }
    const ConfusionCounts counts = confusion(predicted, actual);
    c.require(counts.tp == tp && counts.fp == fp && counts.tn == tn &&
                  counts.fn == fn,
              "confusion tally mismatch at trial " + std::to_string(trial));

    const ClassificationMetrics m = classification_metrics(counts);
    const auto ld = [](std::size_t v) { return static_cast<long double>(v); };
    c.require(std::fabs(m.acc - static_cast<double>((ld(tp) + ld(tn)) /
                                                    ld(len))) <= tol,
              "accuracy oracle mismatch");
    c.require(m.tpr_defined == (tp + fn > 0), "TPR defined-flag mismatch");
    if (m.tpr_defined) {
      c.require(std::fabs(m.tpr - static_cast<double>(ld(tp) / ld(tp + fn))) <= tol,
                "TPR oracle mismatch");
    }
    c.require(m.tnr_defined == (tn + fp > 0), "TNR defined-flag mismatch");
    if (m.tnr_defined) {
      c.require(std::fabs(m.tnr - static_cast<double>(ld(tn) / ld(tn + fp))) <= tol,
                "TNR oracle mismatch");
    }
    c.require(m.f1_defined == (2 * tp + fp + fn > 0), "F1 defined-flag mismatch");
    if (m.f1_defined) {
      c.require(std::fabs(m.f1 - static_cast<double>(2.0L * ld(tp) /
                                                     (2.0L * ld(tp) + ld(fp) +
                                                      ld(fn)))) <= tol,
                "F1 oracle mismatch");
    }

    // accuracy identity when both rates are defined
    if (m.tpr_defined && m.tnr_defined) {
      const double p = static_cast<double>(ld(tp + fn) / ld(len));
      c.require(std::fabs(m.acc - (p * m.tpr + (1.0 - p) * m.tnr)) <= tol,
                "accuracy identity violated at trial " + std::to_string(trial));
    }

    // duration runs by direct scan
    std::vector<std::pair<double, bool>> open_runs, closed_runs;
    std::size_t run_start = 0;
    for (std::size_t k = 1; k <= len; ++k) {
      if (k == len || (actual[k] != 0) != (actual[run_start] != 0)) {
        auto& bucket = actual[run_start] ? open_runs : closed_runs;
        bucket.emplace_back(static_cast<double>(k - run_start) / 60.0,
                            run_start == 0 || k == len);
        run_start = k;
      }
    }
    const auto [open_found, closed_found] = state_durations(actual);
    c.require(open_found.size() == open_runs.size() &&
                  closed_found.size() == closed_runs.size(),
              "run count mismatch at trial " + std::to_string(trial));
    for (std::size_t k = 0; c.pass && k < open_found.size(); ++k) {
      c.require(open_found[k].hours == open_runs[k].first &&
                    open_found[k].truncated == open_runs[k].second,
                "open run mismatch");
    }
    for (std::size_t k = 0; c.pass && k < closed_found.size(); ++k) {
      c.require(closed_found[k].hours == closed_runs[k].first &&
                    closed_found[k].truncated == closed_runs[k].second,
                "closed run mismatch");
    }

    // quartiles of the open runs against a direct interpolation
    std::vector<double> hours;
    for (const auto& run : open_runs) hours.push_back(run.first);
    const DurationSummary summary = summarize_durations(open_found, true);
    c.require(summary.n_runs == hours.size(), "summary run count mismatch");
    if (!hours.empty()) {
      std::sort(hours.begin(), hours.end());
      auto interp = [&](double prob) {
        const double rank = prob * static_cast<double>(hours.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(rank);
        const std::size_t hi = std::min(lo + 1, hours.size() - 1);
        return hours[lo] + (rank - static_cast<double>(lo)) * (hours[hi] - hours[lo]);
      };
      c.require(std::fabs(summary.q25 - interp(0.25)) <= tol &&
                    std::fabs(summary.median - interp(0.5)) <= tol &&
                    std::fabs(summary.q75 - interp(0.75)) <= tol,
                "quartile mismatch at trial " + std::to_string(trial));
    }

    // action-correctness by direct window scan
    const std::size_t lag = 1 + rng.next_below(15);
    auto opens_within = [&](const std::vector<std::uint8_t>& series,
                            std::size_t t) {
      for (std::size_t k = t + 1; k <= t + lag && k < series.size(); ++k) {
        if (!series[k - 1] && series[k]) return true;
      }
      return false;
    };
    std::size_t matched = 0, eligible = 0;
    if (len >= lag + 1) {
      for (std::size_t t = 0; t + lag < len; ++t) {
        if (!opens_within(actual, t)) continue;
        ++eligible;
        if (opens_within(predicted, t)) ++matched;
      }
    }
    const auto [found_matched, found_eligible] = action_counts(predicted, actual, lag);
    c.require(found_matched == matched && found_eligible == eligible,
              "action-count mismatch at trial " + std::to_string(trial) +
                  " (got " + std::to_string(found_matched) + "/" +
                  std::to_string(found_eligible) + ", oracle " +
                  std::to_string(matched) + "/" + std::to_string(eligible) + ")");

    // behavioral rates by direct computation
    const AbsoluteMetrics abs = absolute_metrics_single(actual);
    std::size_t open_minutes = 0, openings = 0;
    for (std::size_t k = 0; k < len; ++k) {
      open_minutes += actual[k] ? 1 : 0;
      if (k > 0 && !actual[k - 1] && actual[k]) ++openings;
    }
    c.require(std::fabs(abs.open_fraction -
                        static_cast<double>(open_minutes) /
                            static_cast<double>(len)) <= tol,
              "open-fraction mismatch");
    c.require(std::fabs(abs.actions_per_day -
                        static_cast<double>(openings) * 1440.0 /
                            static_cast<double>(len)) <= tol,
              "actions-per-day mismatch");
  }

  const double reference = 0.07 * 0.37 + 0.93 * 0.92;
  c.require(std::fabs(reference - 0.88) <= 0.005,
            "reference operating point lands at " + fmt(reference));
  c.note("1000 randomized series agree with brute-force oracles; "
         "0.07*0.37 + 0.93*0.92 = " + fmt(reference, 4));
  return c;
}

// 9. a 50000-iteration base run logs exactly 70000 iterations in three
//    learning-rate phases 1 : 0.1 : 0.01 ending at 50k / 60k / 70k
Check criterion_schedule() {
  Check c;
  Rng rng(3030);
  const std::size_t n = 256, dim = 4;
  SampleSet train_set, val_set;
  auto fill = [&](SampleSet& set, std::size_t rows, SplitTag tag) {
    set.X = gaussian_batch(rows, dim, rng);
    set.y.resize(rows);
    for (std::size_t k = 0; k < rows; ++k) set.y[k] = set.X(k, 0) > 0.0 ? 1 : 0;
    set.origin_t.assign(rows, 0);
    set.tag = tag;
  };
  fill(train_set, n, SplitTag::train);
  fill(val_set, 64, SplitTag::val);

  Hyperparams hp;
  hp.hidden_widths = {4};
  hp.l1_lambda = 1e-4;
  hp.lr = 0.08;
  hp.base_iterations = 50000;
  hp.batch_size = 16;
  hp.checkpoint_interval = 25000;
  hp.seed = 11;
  const TrainResult result = train(train_set, val_set, hp);
  const TrainReport& report = result.report;

  c.require(report.total_iterations == 70000,
            "logged " + std::to_string(report.total_iterations) + " iterations");
  c.require(report.phases.size() == 3, "expected three phases");
  if (report.phases.size() == 3) {
    c.require(report.phases[0].first == 50000 && report.phases[1].first == 60000 &&
                  report.phases[2].first == 70000,
              "phase boundaries " + std::to_string(report.phases[0].first) + "/" +
                  std::to_string(report.phases[1].first) + "/" +
                  std::to_string(report.phases[2].first));
    c.require(report.phases[0].second == hp.lr, "first phase rate changed");
    c.require(std::fabs(report.phases[1].second * 10.0 - hp.lr) <= 1e-12 * hp.lr,
              "second phase not a tenth of the rate");
    c.require(std::fabs(report.phases[2].second * 100.0 - hp.lr) <= 1e-12 * hp.lr,
              "third phase not a hundredth of the rate");
  }
  c.require(!report.batch_loss_trace.empty() &&
                report.batch_loss_trace.back().first == 70000,
            "loss trace does not reach iteration 70000");
  c.require(!report.checkpoints.empty() &&
                report.checkpoints.back().iteration == 70000,
            "no final checkpoint at iteration 70000");
  c.note("70000 iterations, boundaries 50k/60k/70k, rates 1 : 0.1 : 0.01");
  return c;
}

// 10. ten thousand optimization steps on the full-size architecture
//     (201-227-314-394-34-26-2, batch 128) finish within 60 seconds
Check criterion_speed() {
  Check c;
  Rng rng(4040);
  const std::size_t n = 4096, dim = 201;
  SampleSet train_set;
  train_set.X = gaussian_batch(n, dim, rng);
  train_set.y = bernoulli_labels(n, 0.07, rng);
  train_set.origin_t.assign(n, 0);
  train_set.tag = SplitTag::train;

  Mlp mlp = init_mlp({201, 227, 314, 394, 34, 26, 2}, 99);
  EpochSampler sampler(n, 123);
  const auto start = Clock::now();
  run_iterations(mlp, train_set, sampler, 10000, 0.03, 0.01, 128);
  const double elapsed = seconds_since(start);
  c.require(elapsed <= 60.0,
            "10000 iterations took " + fmt(elapsed) + "s, over the 60s budget");
  c.note(fmt(elapsed, 3) + "s for 10000 iterations (" +
         fmt(10000.0 / elapsed, 4) + " it/s)");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  // optional arguments: criterion numbers to run (default: all ten)
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

  const fs::path work = fs::temp_directory_path() / "winpred_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  struct Criterion {
    int id;
    const char* title;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "analytic gradients match central finite differences", criterion_gradients},
      {2, "stacked input dimensionality identities", criterion_dimensions},
      {3, "exact soft-thresholding and sparsity growth with the L1 penalty", criterion_sparsity},
      {4, "bit-identical reruns and parallelism-independent grid search",
       [&] { return criterion_determinism(work); }},
      {5, "planted co2 rule is learned and dominates the first layer", criterion_planted_rule},
      {6, "no F1 gain from input history beyond the generator's memory", criterion_duration_plateau},
      {7, "F1 degrades as the prediction lag grows", criterion_lag_degradation},
      {8, "metrics match brute-force oracles and the accuracy identity", criterion_metric_oracles},
      {9, "three-phase learning-rate schedule with a 20000-iteration tail", criterion_schedule},
      {10, "full-size training speed within the one-core budget", criterion_speed},
  };

  int failures = 0;
  int executed = 0;
  for (const Criterion& criterion : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) ==
            selected.end()) {
      continue;
    }
    ++executed;
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    failures += result.pass ? 0 : 1;
    std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << criterion.id << ' '
              << criterion.title
              << (result.detail.empty() ? "" : " (" + result.detail + ")")
              << '\n'
              << std::flush;
  }
  std::cout << (executed - failures) << " of " << executed
            << " criteria passed\n";
  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
