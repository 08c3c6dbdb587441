#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "winpred/dataset.hpp"

namespace winpred {

// One training example: the model input assembled at observation step t and
// the window state i minutes of history later predicts, l minutes ahead.
// Layout of x: [static@t | co2@t-1..t-i | rh@t-1..t-i | t_indoor@t-1..t-i]
// (newest first within each sequence block; the indoor values at t itself sit
// in the static block, so the total length is n_static + 3*i).
struct StackedSample {
  std::vector<double> x;
  bool y = false;
  std::int64_t origin_t = 0;
};

enum class SkipReason { window_crosses_gap, before_series_start, label_beyond_series_end };
const char* to_string(SkipReason reason);

// n_static + 3*i; throws std::invalid_argument for n_static < 3.
std::size_t input_dim(std::size_t n_static, std::size_t i);

// Build the sample anchored at timestamp t, or explain why none exists there.
// t must be a record timestamp of the dataset (std::invalid_argument if not);
// i >= 1 and l >= 1.
std::variant<StackedSample, SkipReason> stack_sample(const Dataset& dataset, std::int64_t t,
                                                     std::size_t i, std::size_t l);

// Every eligible sample in timestamp order. Per contiguous segment of length
// n there are max(0, n - i - l) samples.
std::vector<StackedSample> stack_all(const Dataset& dataset, std::size_t i, std::size_t l);

// Per-dimension z-score parameters fit on training samples only.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;          // 1.0 for flagged constant dimensions
  std::vector<bool> constant_dim;      // true where the fit saw zero variance

  std::size_t dim() const { return mean.size(); }
};

// Welford-accumulated mean and sample standard deviation (n-1 denominator).
// Throws std::invalid_argument for fewer than 2 samples or ragged dimensions.
Normalizer fit_normalizer(const std::vector<StackedSample>& samples);

// x' = (x - mean) / stddev, label and origin unchanged.
StackedSample apply_normalizer(const Normalizer& norm, const StackedSample& sample);

// Which split a sample set came from; training refuses mixed-up provenance.
enum class SplitTag { unspecified, train, val, test };
const char* to_string(SplitTag tag);

// Dense matrix view of a sample list: one row per sample.
struct SampleSet {
  Eigen::MatrixXd X;                    // n_samples x dim
  std::vector<std::uint8_t> y;          // 0 closed / 1 open
  std::vector<std::int64_t> origin_t;
  SplitTag tag = SplitTag::unspecified;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(X.cols()); }
  std::int64_t min_origin() const;
  std::int64_t max_origin() const;
  double open_fraction() const;
};

SampleSet to_sample_set(const std::vector<StackedSample>& samples, SplitTag tag);

// Normalize every row in place.
void apply_normalizer(const Normalizer& norm, SampleSet& set);

// Binary sample cache: 8-byte magic, u32 dimension, u64 count, then per
// sample the input vector as little-endian float32 followed by one label
// byte. Values round to float32 in the cache.
void save_samples(const std::vector<StackedSample>& samples, const std::string& path);
std::vector<StackedSample> load_samples(const std::string& path);

}  // namespace winpred
