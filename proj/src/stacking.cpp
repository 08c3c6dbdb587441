#include "winpred/stacking.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace winpred {

namespace {

// Record index of timestamp t, or npos.
std::size_t find_record(const Dataset& dataset, std::int64_t t) {
  const auto& recs = dataset.records;
  auto it = std::lower_bound(recs.begin(), recs.end(), t,
                             [](const ClimateRecord& r, std::int64_t ts) {
                               return r.timestamp < ts;
                             });
  if (it == recs.end() || it->timestamp != t) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - recs.begin());
}

StackedSample build_sample(const Dataset& dataset, std::size_t k, std::size_t i,
                           std::size_t l) {
  const auto& recs = dataset.records;
  const std::size_t n_static = dataset.schema.static_count();
  StackedSample s;
  s.origin_t = recs[k].timestamp;
  s.y = recs[k + l].window_open;
  s.x.reserve(input_dim(n_static, i));
  s.x.insert(s.x.end(), recs[k].static_features.begin(), recs[k].static_features.end());
  for (std::size_t step = 1; step <= i; ++step) s.x.push_back(recs[k - step].co2);
  for (std::size_t step = 1; step <= i; ++step) s.x.push_back(recs[k - step].rh);
  for (std::size_t step = 1; step <= i; ++step) s.x.push_back(recs[k - step].t_indoor);
  for (double v : s.x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite value in input at timestamp " +
                                  std::to_string(s.origin_t));
    }
  }
  return s;
}

template <typename T>
void write_le(std::ofstream& out, T value) {
  // this build targets little-endian hosts only
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T read_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

constexpr char kCacheMagic[8] = {'W', 'P', 'S', 'T', 'A', 'C', 'K', '1'};

}  // namespace

const char* to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::window_crosses_gap: return "window_crosses_gap";
    case SkipReason::before_series_start: return "before_series_start";
    case SkipReason::label_beyond_series_end: return "label_beyond_series_end";
  }
  return "?";
}

const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::unspecified: return "unspecified";
    case SplitTag::train: return "train";
    case SplitTag::val: return "val";
    case SplitTag::test: return "test";
  }
  return "?";
}

std::size_t input_dim(std::size_t n_static, std::size_t i) {
  if (n_static < 3) {
    throw std::invalid_argument("need at least the three indoor static features, got " +
                                std::to_string(n_static));
  }
  return n_static + 3 * i;
}

std::variant<StackedSample, SkipReason> stack_sample(const Dataset& dataset, std::int64_t t,
                                                     std::size_t i, std::size_t l) {
  if (i < 1 || l < 1) throw std::invalid_argument("sequence duration and lag must be >= 1");
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t k = find_record(dataset, t);
  if (k == static_cast<std::size_t>(-1)) {
    throw std::invalid_argument("timestamp " + std::to_string(t) + " is not in the dataset");
  }

  // locate the contiguous segment containing t
  const auto segments = dataset.segments();
  auto seg = segments.begin();
  while (seg != segments.end() && !(seg->first <= k && k < seg->second)) ++seg;
  const auto& recs = dataset.records;
  const std::int64_t seg_start_ts = recs[seg->first].timestamp;
  const std::int64_t seg_end_ts = recs[seg->second - 1].timestamp;

  const std::int64_t window_start = t - static_cast<std::int64_t>(i);
  const std::int64_t label_ts = t + static_cast<std::int64_t>(l);
  if (window_start < seg_start_ts) {
    return window_start < recs.front().timestamp ? SkipReason::before_series_start
                                                 : SkipReason::window_crosses_gap;
  }
  if (label_ts > seg_end_ts) {
    return label_ts > recs.back().timestamp ? SkipReason::label_beyond_series_end
                                            : SkipReason::window_crosses_gap;
  }
  return build_sample(dataset, k, i, l);
}

std::vector<StackedSample> stack_all(const Dataset& dataset, std::size_t i, std::size_t l) {
  if (i < 1 || l < 1) throw std::invalid_argument("sequence duration and lag must be >= 1");
  std::vector<StackedSample> out;
  for (const auto& [begin, end] : dataset.segments()) {
    const std::size_t len = end - begin;
    if (len <= i + l) continue;
    out.reserve(out.size() + (len - i - l));
    for (std::size_t k = begin + i; k + l < end; ++k) {
      out.push_back(build_sample(dataset, k, i, l));
    }
  }
  return out;
}

Normalizer fit_normalizer(const std::vector<StackedSample>& samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("normalizer needs at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  const std::size_t dim = samples.front().x.size();
  Normalizer norm;
  norm.mean.assign(dim, 0.0);
  norm.stddev.assign(dim, 0.0);
  norm.constant_dim.assign(dim, false);

  // Welford's online algorithm, numerically stable in one pass
  std::vector<double> m2(dim, 0.0);
  double count = 0.0;
  for (const auto& s : samples) {
    if (s.x.size() != dim) {
      throw std::invalid_argument("inconsistent sample dimensions: " + std::to_string(dim) +
                                  " vs " + std::to_string(s.x.size()));
    }
    count += 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = s.x[d] - norm.mean[d];
      norm.mean[d] += delta / count;
      m2[d] += delta * (s.x[d] - norm.mean[d]);
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double var = m2[d] / (count - 1.0);
    if (var > 0.0) {
      norm.stddev[d] = std::sqrt(var);
    } else {
      norm.stddev[d] = 1.0;
      norm.constant_dim[d] = true;
    }
  }
  return norm;
}

StackedSample apply_normalizer(const Normalizer& norm, const StackedSample& sample) {
  if (sample.x.size() != norm.dim()) {
    throw std::invalid_argument("normalizer dimension " + std::to_string(norm.dim()) +
                                " does not match sample dimension " +
                                std::to_string(sample.x.size()));
  }
  StackedSample out = sample;
  for (std::size_t d = 0; d < out.x.size(); ++d) {
    out.x[d] = (out.x[d] - norm.mean[d]) / norm.stddev[d];
  }
  return out;
}

std::int64_t SampleSet::min_origin() const {
  return origin_t.empty() ? std::numeric_limits<std::int64_t>::max()
                          : *std::min_element(origin_t.begin(), origin_t.end());
}

std::int64_t SampleSet::max_origin() const {
  return origin_t.empty() ? std::numeric_limits<std::int64_t>::min()
                          : *std::max_element(origin_t.begin(), origin_t.end());
}

double SampleSet::open_fraction() const {
  if (y.empty()) return 0.0;
  std::size_t open = 0;
  for (auto v : y) open += v;
  return static_cast<double>(open) / static_cast<double>(y.size());
}

SampleSet to_sample_set(const std::vector<StackedSample>& samples, SplitTag tag) {
  SampleSet set;
  set.tag = tag;
  if (samples.empty()) return set;
  const std::size_t dim = samples.front().x.size();
  set.X.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(dim));
  set.y.reserve(samples.size());
  set.origin_t.reserve(samples.size());
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].x.size() != dim) {
      throw std::invalid_argument("inconsistent sample dimensions in sample set");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      set.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = samples[r].x[d];
    }
    set.y.push_back(samples[r].y ? 1 : 0);
    set.origin_t.push_back(samples[r].origin_t);
  }
  return set;
}

void apply_normalizer(const Normalizer& norm, SampleSet& set) {
  if (set.size() == 0) return;
  if (set.dim() != norm.dim()) {
    throw std::invalid_argument("normalizer dimension " + std::to_string(norm.dim()) +
                                " does not match sample set dimension " +
                                std::to_string(set.dim()));
  }
  const Eigen::Index dim = set.X.cols();
  for (Eigen::Index d = 0; d < dim; ++d) {
    set.X.col(d) = (set.X.col(d).array() - norm.mean[static_cast<std::size_t>(d)]) /
                   norm.stddev[static_cast<std::size_t>(d)];
  }
}

void save_samples(const std::vector<StackedSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(kCacheMagic, sizeof kCacheMagic);
  const std::uint32_t dim =
      samples.empty() ? 0u : static_cast<std::uint32_t>(samples.front().x.size());
  write_le(out, dim);
  write_le(out, static_cast<std::uint64_t>(samples.size()));
  for (const auto& s : samples) {
    if (s.x.size() != dim) throw std::invalid_argument("inconsistent sample dimensions");
    for (double v : s.x) write_le(out, static_cast<float>(v));
    write_le(out, static_cast<std::uint8_t>(s.y ? 1 : 0));
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<StackedSample> load_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
    throw std::runtime_error("'" + path + "' is not a sample cache file");
  }
  const auto dim = read_le<std::uint32_t>(in);
  const auto count = read_le<std::uint64_t>(in);
  if (!in) throw std::runtime_error("'" + path + "': truncated header");
  std::vector<StackedSample> samples;
  samples.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    StackedSample s;
    s.x.resize(dim);
    for (auto& v : s.x) v = read_le<float>(in);
    s.y = read_le<std::uint8_t>(in) != 0;
    if (!in) {
      throw std::runtime_error("'" + path + "': truncated at sample " + std::to_string(r));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace winpred
