#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "winpred/dataset.hpp"

namespace winpred {

enum class TriggerCause { arrival, co2, temp_rise };

const char* to_string(TriggerCause cause);
TriggerCause trigger_cause_from_string(const std::string& text);

// One window opening and the planted rule that caused it.
struct TriggerEvent {
  std::int64_t timestamp = 0;
  TriggerCause cause = TriggerCause::arrival;
};

// Occupant-behavior simulation for a single office. Three causal rules drive
// openings: opening on arrival, opening when co2 crosses a threshold, and
// opening on a steep indoor temperature rise. Disabled rules are expressed as
// probability 0 / +infinity thresholds.
struct SyntheticConfig {
  int n_days = 30;
  std::uint64_t seed = 42;
  std::int64_t start_timestamp = 26'949'600;  // 2021-03-29 00:00 UTC, a Monday

  // occupancy
  int n_occupants = 2;
  double second_occupant_prob = 0.70;  // chance the office is double-occupied that day
  double arrival_mean_min = 480.0;     // minute of day, 08:00
  double arrival_std_min = 45.0;
  double departure_mean_min = 1020.0;  // 17:00
  double departure_std_min = 50.0;
  bool close_on_departure = true;      // empty office forces the window shut

  // co2 dynamics [ppm]; with two occupants the closed-room equilibrium is
  // baseline + 2*rate/decay = 1020 ppm, crossing the 820 threshold a few
  // hours into double occupancy. A single occupant equilibrates at 720 and
  // normally stays below it.
  double co2_baseline = 420.0;
  double co2_per_occupant = 1.5;      // generation, ppm per minute per occupant
  double vent_decay_closed = 0.005;   // fraction of excess removed per minute
  double vent_decay_open = 0.15;

  // indoor temperature dynamics [degrees C]
  double t_setpoint = 22.9;
  double hvac_pull = 0.010;           // per-minute pull toward the setpoint
  double occupant_heat = 0.003;       // degC per minute per occupant
  double solar_heat = 0.010;          // degC per minute at full solar load
  double open_window_pull = 0.008;    // per-minute pull toward outdoor temp while open
  double open_window_rh_pull = 0.003; // per-minute pull toward outdoor humidity while open
  double overheat_event_prob = 0.35;  // per occupied day
  double overheat_rate = 0.06;        // degC per minute during a surge
  int overheat_duration_min = 45;

  // opening rules; the temperature rule fires on a steep rise while the room
  // is already warm (above setpoint), i.e. on overheating, not on ordinary
  // reheating after an airing chilled the room
  double co2_open_threshold = 820.0;
  double temp_rise_threshold = 1.2;   // degC over 30 minutes
  double arrival_open_prob = 0.30;

  // opening duration, log-normal over minutes: median ~48 min with a heavy
  // tail (mean ~88 min), so roughly one action per day sustains an open-state
  // fraction near 0.07
  double duration_log_mean = 3.87;
  double duration_log_std = 1.10;

  // per-channel process noise stddevs
  double noise_co2 = 3.0;
  double noise_t = 0.02;
  double noise_rh = 0.05;
  double noise_weather = 0.3;

  double target_open_fraction = 0.07;

  void validate() const;  // throws std::invalid_argument

  // Rules a, b, c only; everything else near-deterministic so that the planted
  // co2 rule is the sole driver of openings.
  static SyntheticConfig co2_only();
};

struct SyntheticOutput {
  Dataset dataset;
  std::vector<TriggerEvent> triggers;
};

// Deterministic in (config, seed). Every closed->open transition in the
// dataset has exactly one entry in the trigger log.
SyntheticOutput generate_synthetic(const SyntheticConfig& config);

void save_triggers_csv(const std::vector<TriggerEvent>& triggers, const std::string& path);
std::vector<TriggerEvent> load_triggers_csv(const std::string& path);

}  // namespace winpred
