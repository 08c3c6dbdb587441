#include "winpred/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

namespace winpred {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("row " + std::to_string(row) + ": cannot parse '" + t +
                                "' in column '" + column + "'");
  }
  return value;
}

bool parse_window_state(const std::string& text, std::size_t row) {
  const std::string t = trim(text);
  if (t == "0") return false;
  if (t == "1") return true;
  throw std::invalid_argument("row " + std::to_string(row) +
                              ": window_open must be 0 or 1, got '" + t + "'");
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

const std::vector<std::string>& FeatureSchema::indoor_sequence_names() {
  static const std::vector<std::string> names{"co2", "rh", "t_indoor"};
  return names;
}

FeatureSchema FeatureSchema::default_schema() {
  FeatureSchema schema;
  schema.static_names = {
      "co2",           "rh",           "t_indoor",     "t_out_station", "t_out_site",
      "rain_volume",   "hour_sin",     "hour_cos",     "dow_sin",       "dow_cos",
      "wind_speed",    "wind_dir_sin", "wind_dir_cos", "pressure_hpa",  "solar_radiation",
      "cloud_cover",   "rh_outdoor",   "month_sin",    "month_cos",     "is_workday",
      "t_out_delta_30"};
  return schema;
}

void FeatureSchema::validate() const {
  if (static_names.size() < 3) {
    throw std::invalid_argument("schema needs at least the three indoor static features");
  }
  const auto& indoor = indoor_sequence_names();
  for (std::size_t i = 0; i < 3; ++i) {
    if (static_names[i] != indoor[i]) {
      throw std::invalid_argument("schema static names must begin with co2, rh, t_indoor");
    }
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : static_names) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("duplicate feature name '" + name + "'");
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> Dataset::segments() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].timestamp != records[i - 1].timestamp + 1) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

void Dataset::validate() const {
  schema.validate();
  const std::size_t n_static = schema.static_count();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.static_features.size() != n_static) {
      throw std::invalid_argument("record " + std::to_string(i) + ": static feature count " +
                                  std::to_string(r.static_features.size()) + " != schema's " +
                                  std::to_string(n_static));
    }
    if (i > 0 && r.timestamp <= records[i - 1].timestamp) {
      throw std::invalid_argument("timestamps not strictly increasing at record " +
                                  std::to_string(i));
    }
  }
}

std::int64_t parse_timestamp_minutes(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty timestamp");
  // Integer minutes.
  if (t.find_first_not_of("-0123456789") == std::string::npos) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec == std::errc{} && ptr == t.data() + t.size()) return value;
    throw std::invalid_argument("cannot parse timestamp '" + t + "'");
  }
  // ISO-8601 date-time: YYYY-MM-DD[T ]HH:MM[:SS].
  int y, mo, d, h, mi, s = 0;
  char sep;
  int consumed = 0;
  const int matched = std::sscanf(t.c_str(), "%d-%d-%d%c%d:%d:%d%n", &y, &mo, &d, &sep, &h, &mi,
                                  &s, &consumed);
  if (matched < 6 || (sep != 'T' && sep != ' ')) {
    throw std::invalid_argument("cannot parse timestamp '" + t + "'");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) {
    throw std::invalid_argument("timestamp out of range: '" + t + "'");
  }
  return days_from_civil(y, mo, d) * 1440 + h * 60 + mi;
}

Dataset load_csv(const std::string& path, const FeatureSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line, ',');
  for (auto& h : header) h = trim(h);

  std::vector<std::string> expected{"timestamp", "co2", "t_indoor", "rh", "window_open"};
  for (std::size_t i = 3; i < schema.static_names.size(); ++i) {
    expected.push_back(schema.static_names[i]);
  }
  if (header != expected) {
    std::string missing;
    for (const auto& name : expected) {
      if (std::find(header.begin(), header.end(), name) == header.end()) {
        missing += missing.empty() ? name : ", " + name;
      }
    }
    if (!missing.empty()) {
      throw std::invalid_argument("'" + path + "': missing column(s): " + missing);
    }
    throw std::invalid_argument("'" + path + "': header does not match schema order");
  }

  Dataset dataset;
  dataset.schema = schema;
  dataset.series_id = path;
  const std::size_t n_extra = schema.static_names.size() - 3;

  std::size_t row = 1;  // header was row 0
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      ++row;
      continue;
    }
    const auto fields = split_line(line, ',');
    if (fields.size() != expected.size()) {
      throw std::invalid_argument("row " + std::to_string(row) + ": expected " +
                                  std::to_string(expected.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    ClimateRecord r;
    try {
      r.timestamp = parse_timestamp_minutes(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("row " + std::to_string(row) + ": " + e.what());
    }
    r.co2 = parse_double(fields[1], row, "co2");
    r.t_indoor = parse_double(fields[2], row, "t_indoor");
    r.rh = parse_double(fields[3], row, "rh");
    r.window_open = parse_window_state(fields[4], row);
    r.static_features.reserve(schema.static_names.size());
    r.static_features.push_back(r.co2);
    r.static_features.push_back(r.rh);
    r.static_features.push_back(r.t_indoor);
    for (std::size_t i = 0; i < n_extra; ++i) {
      r.static_features.push_back(parse_double(fields[5 + i], row, schema.static_names[3 + i]));
    }
    dataset.records.push_back(std::move(r));
    ++row;
  }

  std::stable_sort(dataset.records.begin(), dataset.records.end(),
                   [](const ClimateRecord& a, const ClimateRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  for (std::size_t i = 1; i < dataset.records.size(); ++i) {
    if (dataset.records[i].timestamp == dataset.records[i - 1].timestamp) {
      throw std::invalid_argument("'" + path + "': duplicate timestamp " +
                                  std::to_string(dataset.records[i].timestamp));
    }
  }
  return dataset;
}

std::string to_csv(const Dataset& dataset) {
  std::ostringstream out;
  out << "timestamp,co2,t_indoor,rh,window_open";
  for (std::size_t i = 3; i < dataset.schema.static_names.size(); ++i) {
    out << ',' << dataset.schema.static_names[i];
  }
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << ',' << buf;
  };
  for (const auto& r : dataset.records) {
    out << r.timestamp;
    put(r.co2);
    put(r.t_indoor);
    put(r.rh);
    out << ',' << (r.window_open ? 1 : 0);
    for (std::size_t i = 3; i < r.static_features.size(); ++i) put(r.static_features[i]);
    out << '\n';
  }
  return out.str();
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_csv(dataset);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<Gap> find_gaps(const Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("find_gaps: empty dataset");
  std::vector<Gap> gaps;
  for (std::size_t i = 1; i < dataset.records.size(); ++i) {
    const std::int64_t delta = dataset.records[i].timestamp - dataset.records[i - 1].timestamp;
    if (delta > 1) gaps.push_back({dataset.records[i - 1].timestamp, delta});
  }
  return gaps;
}

std::tuple<Dataset, Dataset, Dataset> split(const Dataset& dataset, SplitFractions fractions) {
  const double sum = fractions.train + fractions.val + fractions.test;
  if (fractions.train <= 0 || fractions.val <= 0 || fractions.test <= 0) {
    throw std::invalid_argument("split fractions must be positive");
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions sum to " + std::to_string(sum) + ", not 1");
  }
  const std::size_t n = dataset.size();
  std::size_t n_train = static_cast<std::size_t>(std::llround(fractions.train * n));
  std::size_t n_val = static_cast<std::size_t>(std::llround((fractions.train + fractions.val) * n)) -
                      n_train;
  n_train = std::max<std::size_t>(n_train, 1);
  n_val = std::max<std::size_t>(n_val, 1);
  if (n_train + n_val + 1 > n) {
    throw std::invalid_argument("dataset too small to honor all three split fractions");
  }
  auto piece = [&](std::size_t begin, std::size_t end, const char* tag) {
    Dataset d;
    d.schema = dataset.schema;
    d.series_id = dataset.series_id.empty() ? tag : dataset.series_id + "/" + tag;
    d.records.assign(dataset.records.begin() + begin, dataset.records.begin() + end);
    return d;
  };
  return {piece(0, n_train, "train"), piece(n_train, n_train + n_val, "val"),
          piece(n_train + n_val, n, "test")};
}

SummaryStats summary_stats(const Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("summary_stats: empty dataset");
  SummaryStats s;
  std::size_t open_count = 0;
  std::size_t actions = 0;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    s.mean_co2 += r.co2;
    s.mean_t_indoor += r.t_indoor;
    s.mean_rh += r.rh;
    open_count += r.window_open ? 1 : 0;
    if (i > 0 && dataset.records[i - 1].timestamp + 1 == r.timestamp &&
        !dataset.records[i - 1].window_open && r.window_open) {
      ++actions;
    }
  }
  const double n = static_cast<double>(dataset.size());
  s.mean_co2 /= n;
  s.mean_t_indoor /= n;
  s.mean_rh /= n;
  s.open_fraction = static_cast<double>(open_count) / n;
  s.actions_per_hour = static_cast<double>(actions) / (n / 60.0);
  return s;
}

}  // namespace winpred
