#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <vector>

#include "winpred/dataset.hpp"
#include "winpred/synthetic.hpp"

using namespace winpred;

namespace {

// Timestamps of every closed->open transition, including an opening at the
// very first record (closed state is the generator's initial condition).
std::vector<std::int64_t> opening_timestamps(const Dataset& d) {
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const bool prev_open = k > 0 && d.records[k - 1].window_open;
    if (d.records[k].window_open && !prev_open) out.push_back(d.records[k].timestamp);
  }
  return out;
}

}  // namespace

TEST_CASE("generator output is structurally sound") {
  SyntheticConfig cfg;
  cfg.n_days = 5;
  const SyntheticOutput out = generate_synthetic(cfg);
  const Dataset& d = out.dataset;
  REQUIRE(d.size() == 5 * 1440);
  d.validate();
  CHECK(d.schema.static_count() == 21);
  CHECK(find_gaps(d).empty());
  CHECK(d.records.front().timestamp == cfg.start_timestamp);
  for (const auto& r : d.records) {
    REQUIRE(r.static_features.size() == 21);
    // indoor channels mirrored into the static block
    REQUIRE(r.static_features[0] == r.co2);
    REQUIRE(r.static_features[1] == r.rh);
    REQUIRE(r.static_features[2] == r.t_indoor);
    REQUIRE(r.co2 >= 0.0);
    REQUIRE(r.rh >= 0.0);
    REQUIRE(r.rh <= 100.0);
    REQUIRE(std::isfinite(r.t_indoor));
    for (double v : r.static_features) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("same config and seed give byte-identical output") {
  SyntheticConfig cfg;
  cfg.n_days = 4;
  const SyntheticOutput a = generate_synthetic(cfg);
  const SyntheticOutput b = generate_synthetic(cfg);
  REQUIRE(a.dataset.size() == b.dataset.size());
  for (std::size_t k = 0; k < a.dataset.size(); ++k) {
    const auto& ra = a.dataset.records[k];
    const auto& rb = b.dataset.records[k];
    REQUIRE(ra.timestamp == rb.timestamp);
    REQUIRE(ra.co2 == rb.co2);  // bit-exact, not approximate
    REQUIRE(ra.t_indoor == rb.t_indoor);
    REQUIRE(ra.rh == rb.rh);
    REQUIRE(ra.window_open == rb.window_open);
    REQUIRE(ra.static_features == rb.static_features);
  }
  REQUIRE(a.triggers.size() == b.triggers.size());
  for (std::size_t k = 0; k < a.triggers.size(); ++k) {
    CHECK(a.triggers[k].timestamp == b.triggers[k].timestamp);
    CHECK(a.triggers[k].cause == b.triggers[k].cause);
  }
}

TEST_CASE("different seeds give different series") {
  SyntheticConfig cfg;
  cfg.n_days = 2;
  SyntheticConfig other = cfg;
  other.seed = cfg.seed + 1;
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(other);
  bool any_diff = false;
  for (std::size_t k = 0; k < a.dataset.size() && !any_diff; ++k) {
    any_diff = a.dataset.records[k].co2 != b.dataset.records[k].co2;
  }
  CHECK(any_diff);
}

TEST_CASE("disabling every trigger yields zero openings") {
  SyntheticConfig cfg;
  cfg.n_days = 10;
  cfg.arrival_open_prob = 0.0;
  cfg.co2_open_threshold = std::numeric_limits<double>::infinity();
  cfg.temp_rise_threshold = std::numeric_limits<double>::infinity();
  const SyntheticOutput out = generate_synthetic(cfg);
  CHECK(out.triggers.empty());
  for (const auto& r : out.dataset.records) CHECK_FALSE(r.window_open);
}

TEST_CASE("every opening is logged with exactly one cause") {
  SyntheticConfig cfg;
  cfg.n_days = 30;
  const SyntheticOutput out = generate_synthetic(cfg);
  const auto openings = opening_timestamps(out.dataset);
  REQUIRE(openings.size() == out.triggers.size());
  for (std::size_t k = 0; k < openings.size(); ++k) {
    CHECK(openings[k] == out.triggers[k].timestamp);
  }
  std::set<std::int64_t> unique;
  for (const auto& t : out.triggers) unique.insert(t.timestamp);
  CHECK(unique.size() == out.triggers.size());
}

TEST_CASE("default config hits the documented open-state fraction") {
  SyntheticConfig cfg;  // seed 42, 30 days
  const SyntheticOutput out = generate_synthetic(cfg);
  const SummaryStats s = summary_stats(out.dataset);
  CHECK(s.open_fraction == doctest::Approx(0.07).epsilon(0.30));  // 0.07 +/- ~0.02
  CHECK(s.open_fraction > 0.05);
  CHECK(s.open_fraction < 0.09);
  // roughly one opening action per day
  const double actions_per_day = s.actions_per_hour * 24.0;
  CHECK(actions_per_day > 0.5);
  CHECK(actions_per_day < 2.5);
  // indoor climate in a realistic band
  CHECK(s.mean_co2 > 400.0);
  CHECK(s.mean_co2 < 900.0);
  CHECK(s.mean_t_indoor > 20.0);
  CHECK(s.mean_t_indoor < 26.0);
  CHECK(s.mean_rh > 30.0);
  CHECK(s.mean_rh < 50.0);
}

TEST_CASE("open fraction is stable across seeds") {
  for (std::uint64_t seed : {7ULL, 1234ULL, 987654321ULL}) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    const SyntheticOutput out = generate_synthetic(cfg);
    const SummaryStats s = summary_stats(out.dataset);
    CHECK(s.open_fraction > 0.03);
    CHECK(s.open_fraction < 0.12);
  }
}

TEST_CASE("co2-rule-only mode logs co2 causes exclusively") {
  SyntheticConfig cfg = SyntheticConfig::co2_only();
  cfg.n_days = 30;
  const SyntheticOutput out = generate_synthetic(cfg);
  REQUIRE(out.triggers.size() > 10);  // the rule actually fires
  for (const auto& t : out.triggers) CHECK(t.cause == TriggerCause::co2);
  // each opening really does coincide with an upward threshold crossing
  const Dataset& d = out.dataset;
  for (const auto& t : out.triggers) {
    const std::size_t idx = static_cast<std::size_t>(t.timestamp - cfg.start_timestamp);
    REQUIRE(idx > 0);
    CHECK(d.records[idx].co2 >= cfg.co2_open_threshold);
    CHECK(d.records[idx - 1].co2 < cfg.co2_open_threshold);
  }
}

TEST_CASE("trigger log round-trips through its csv sidecar") {
  SyntheticConfig cfg;
  cfg.n_days = 20;
  const SyntheticOutput out = generate_synthetic(cfg);
  REQUIRE_FALSE(out.triggers.empty());
  const auto path = (std::filesystem::temp_directory_path() / "triggers_rt.csv").string();
  save_triggers_csv(out.triggers, path);
  const auto back = load_triggers_csv(path);
  REQUIRE(back.size() == out.triggers.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].timestamp == out.triggers[k].timestamp);
    CHECK(back[k].cause == out.triggers[k].cause);
  }
}

TEST_CASE("cause names round-trip and unknown names raise") {
  using TC = TriggerCause;
  for (TC c : {TC::arrival, TC::co2, TC::temp_rise}) {
    CHECK(trigger_cause_from_string(to_string(c)) == c);
  }
  CHECK_THROWS_AS(trigger_cause_from_string("breeze"), std::invalid_argument);
}

TEST_CASE("config validation rejects bad values") {
  SyntheticConfig cfg;
  cfg.n_days = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.arrival_open_prob = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.noise_co2 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SyntheticConfig{};
  cfg.vent_decay_open = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  SyntheticConfig ok;
  ok.validate();
}

TEST_CASE("weekends stay unoccupied: no openings, co2 near baseline") {
  SyntheticConfig cfg;
  cfg.n_days = 14;  // two full weeks starting on a Monday
  const SyntheticOutput out = generate_synthetic(cfg);
  const auto& d = out.dataset;
  double weekend_co2_max = 0.0;
  for (int day : {5, 6, 12, 13}) {  // Saturdays and Sundays
    for (int m = 0; m < 1440; ++m) {
      const auto& r = d.records[static_cast<std::size_t>(day) * 1440 + m];
      CHECK_FALSE(r.window_open);
      weekend_co2_max = std::max(weekend_co2_max, r.co2);
      CHECK(r.static_features[19] == 0.0);  // is_workday flag
    }
  }
  CHECK(weekend_co2_max < cfg.co2_open_threshold);
  // workdays do reach higher co2 than the weekend ceiling
  double workday_co2_max = 0.0;
  for (int m = 0; m < 1440; ++m) {
    workday_co2_max = std::max(workday_co2_max, d.records[m].co2);
  }
  CHECK(workday_co2_max > weekend_co2_max);
}

TEST_CASE("opening durations follow the configured log-normal scale") {
  SyntheticConfig cfg;
  cfg.n_days = 120;
  const SyntheticOutput out = generate_synthetic(cfg);
  // collect run lengths of open state
  std::vector<double> durations;
  const auto& recs = out.dataset.records;
  std::size_t k = 0;
  while (k < recs.size()) {
    if (recs[k].window_open) {
      std::size_t j = k;
      while (j < recs.size() && recs[j].window_open) ++j;
      durations.push_back(static_cast<double>(j - k));
      k = j;
    } else {
      ++k;
    }
  }
  REQUIRE(durations.size() > 20);
  std::sort(durations.begin(), durations.end());
  const double median = durations[durations.size() / 2];
  // log-normal median = exp(mu) minutes; occupancy-end truncation pulls it down a bit
  CHECK(median > 0.4 * std::exp(cfg.duration_log_mean));
  CHECK(median < 1.6 * std::exp(cfg.duration_log_mean));
}
