#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace winpred {

// One minute-resolution sensor row. The static feature vector holds every
// non-sequential input measured at this step; its first three entries are the
// indoor channels (co2, rh, t_indoor) at this step and must stay consistent
// with the dedicated fields.
struct ClimateRecord {
  std::int64_t timestamp = 0;  // minutes since epoch
  double co2 = 0.0;            // ppm
  double t_indoor = 0.0;       // degrees C
  double rh = 0.0;             // percent relative humidity
  std::vector<double> static_features;
  bool window_open = false;
};

// Names and ordering of the model inputs. The indoor sequence channels are
// fixed (co2, rh, t_indoor); that ordering is also the block order used when
// grouping first-layer weights.
struct FeatureSchema {
  std::vector<std::string> static_names;
  static const std::vector<std::string>& indoor_sequence_names();

  std::size_t static_count() const { return static_names.size(); }

  // 21 static features: indoor at t, outdoor/weather channels, temporal
  // encodings. The first three names are always co2, rh, t_indoor.
  static FeatureSchema default_schema();

  void validate() const;  // throws std::invalid_argument
};

struct Dataset {
  std::vector<ClimateRecord> records;
  FeatureSchema schema;
  std::string series_id;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }

  // Index ranges [begin, end) of maximal 1-minute-contiguous runs.
  std::vector<std::pair<std::size_t, std::size_t>> segments() const;

  void validate() const;  // schema conformance + strictly increasing timestamps
};

// (last timestamp before the gap, minutes to the next record).
struct Gap {
  std::int64_t start = 0;
  std::int64_t length = 0;
  bool operator==(const Gap&) const = default;
};

struct SplitFractions {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

struct SummaryStats {
  double mean_co2 = 0.0;
  double mean_t_indoor = 0.0;
  double mean_rh = 0.0;
  double actions_per_hour = 0.0;
  double open_fraction = 0.0;
};

// Parse "2021-03-04T08:30" / "2021-03-04 08:30:00" / plain integer minutes
// into minutes since the Unix epoch. Throws std::invalid_argument.
std::int64_t parse_timestamp_minutes(const std::string& text);

// Columns: timestamp, co2, t_indoor, rh, window_open, then the schema's
// static columns from index 3 on (the first three are the dedicated indoor
// columns and are not repeated). Rows are sorted by timestamp; duplicate
// timestamps are an error. Parse failures name the offending data row.
Dataset load_csv(const std::string& path, const FeatureSchema& schema);

void save_csv(const Dataset& dataset, const std::string& path);
std::string to_csv(const Dataset& dataset);

std::vector<Gap> find_gaps(const Dataset& dataset);

// Chronological record-count split: train earliest, then val, then test.
std::tuple<Dataset, Dataset, Dataset> split(const Dataset& dataset, SplitFractions fractions);

SummaryStats summary_stats(const Dataset& dataset);

}  // namespace winpred
