#include "winpred/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "winpred/rng.hpp"

namespace winpred {

namespace {

constexpr double kPi = std::numbers::pi;

struct DayPlan {
  bool workday = false;
  int occupants = 0;
  std::vector<int> arrivals;    // minute of day per occupant
  std::vector<int> departures;
  int overheat_start = -1;      // minute of day, -1 = none
  double t_out_wander = 0.0;
  double clear_sky = 1.0;       // 0..1 solar attenuation for the day
};

int clamp_minute(double v) { return std::clamp(static_cast<int>(std::lround(v)), 0, 1439); }

}  // namespace

const char* to_string(TriggerCause cause) {
  switch (cause) {
    case TriggerCause::arrival: return "arrival";
    case TriggerCause::co2: return "co2";
    case TriggerCause::temp_rise: return "temp_rise";
  }
  return "?";
}

TriggerCause trigger_cause_from_string(const std::string& text) {
  if (text == "arrival") return TriggerCause::arrival;
  if (text == "co2") return TriggerCause::co2;
  if (text == "temp_rise") return TriggerCause::temp_rise;
  throw std::invalid_argument("unknown trigger cause '" + text + "'");
}

void SyntheticConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
  if (n_occupants < 1) throw std::invalid_argument("n_occupants must be >= 1");
  positive(arrival_std_min, "arrival_std_min");
  positive(departure_std_min, "departure_std_min");
  positive(co2_baseline, "co2_baseline");
  positive(co2_per_occupant, "co2_per_occupant");
  positive(vent_decay_closed, "vent_decay_closed");
  positive(vent_decay_open, "vent_decay_open");
  positive(co2_open_threshold, "co2_open_threshold");
  positive(temp_rise_threshold, "temp_rise_threshold");
  positive(duration_log_std, "duration_log_std");
  for (double p : {arrival_open_prob, second_occupant_prob, overheat_event_prob}) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probabilities must be in [0,1]");
  }
  for (double s : {noise_co2, noise_t, noise_rh, noise_weather}) {
    if (s < 0.0) throw std::invalid_argument("noise stddevs must be >= 0");
  }
  if (open_window_pull < 0.0 || open_window_rh_pull < 0.0) {
    throw std::invalid_argument("open-window coupling rates must be >= 0");
  }
  if (target_open_fraction < 0.0 || target_open_fraction > 1.0) {
    throw std::invalid_argument("target_open_fraction must be in [0,1]");
  }
}

// Diagnostic series where the co2 rule is the only driver: the other two
// rules are disabled, every workday is fully occupied so the threshold is
// reliably crossed, openings close by the (near-fixed) duration rule alone,
// and the open state leaves no temperature/humidity signature.
SyntheticConfig SyntheticConfig::co2_only() {
  SyntheticConfig c;
  c.arrival_open_prob = 0.0;
  c.temp_rise_threshold = std::numeric_limits<double>::infinity();
  c.overheat_event_prob = 0.0;
  c.second_occupant_prob = 1.0;
  c.departure_mean_min = 1320.0;      // 22:00, well past the last crossing
  c.departure_std_min = 30.0;
  c.close_on_departure = false;
  c.duration_log_mean = 4.60;         // ~99 min
  c.duration_log_std = 0.01;          // near-fixed opening length
  c.open_window_pull = 0.0;
  c.open_window_rh_pull = 0.0;
  c.noise_co2 = 1.0;
  c.noise_t = 0.01;
  return c;
}

SyntheticOutput generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  const int total_minutes = cfg.n_days * 1440;
  const std::int64_t start_day = cfg.start_timestamp / 1440;

  SyntheticOutput out;
  out.dataset.schema = FeatureSchema::default_schema();
  out.dataset.series_id = "synthetic";
  out.dataset.records.reserve(total_minutes);

  // indoor state
  double co2 = cfg.co2_baseline + 40.0;
  double t_in = cfg.t_setpoint;
  double rh = 38.5;
  bool window_open = false;
  std::int64_t close_at = -1;

  // weather state (AR(1) processes)
  double t_wander = 0.0;
  double wind = 3.0;
  double wind_dir = 0.8;
  double pressure = 1013.0;
  double cloud = 0.4;
  double rh_out = 60.0;
  bool raining = false;
  double rain_volume = 0.0;

  std::vector<double> t_in_history;     // for the 30-minute rise rule
  std::vector<double> t_out_history;    // for the t_out_delta_30 feature
  t_in_history.reserve(total_minutes);
  t_out_history.reserve(total_minutes);

  DayPlan plan;
  double prev_rise30 = 0.0;

  for (int m = 0; m < total_minutes; ++m) {
    const int day = m / 1440;
    const int md = m % 1440;
    const std::int64_t abs_day = start_day + day;
    const int dow = static_cast<int>((abs_day + 3) % 7);  // Monday = 0
    const int doy = static_cast<int>(abs_day % 365);

    if (md == 0) {
      plan = DayPlan{};
      plan.workday = dow < 5;
      plan.t_out_wander = t_wander = 0.7 * t_wander + rng.next_gaussian(0.0, 1.6);
      plan.clear_sky = std::clamp(rng.next_gaussian(0.65, 0.25), 0.05, 1.0);
      if (plan.workday) {
        plan.occupants = 1;
        if (cfg.n_occupants > 1 && rng.next_bernoulli(cfg.second_occupant_prob)) {
          plan.occupants = cfg.n_occupants;
        }
        for (int k = 0; k < plan.occupants; ++k) {
          const int arr = clamp_minute(
              rng.next_gaussian(cfg.arrival_mean_min + 25.0 * k, cfg.arrival_std_min));
          int dep = clamp_minute(
              rng.next_gaussian(cfg.departure_mean_min - 20.0 * k, cfg.departure_std_min));
          dep = std::max(dep, arr + 60);
          plan.arrivals.push_back(arr);
          plan.departures.push_back(dep);
        }
        if (cfg.overheat_event_prob > 0.0 && rng.next_bernoulli(cfg.overheat_event_prob)) {
          const int lo = *std::min_element(plan.arrivals.begin(), plan.arrivals.end()) + 30;
          plan.overheat_start = lo + static_cast<int>(rng.next_below(300));
        }
      }
    }

    int occupancy = 0;
    bool arrival_now = false;
    for (std::size_t k = 0; k < plan.arrivals.size(); ++k) {
      if (md >= plan.arrivals[k] && md < plan.departures[k]) ++occupancy;
      if (md == plan.arrivals[k]) arrival_now = true;
    }

    // outdoor climate
    const double t_season = 10.0 + 8.0 * std::sin(2.0 * kPi * (doy - 105) / 365.0);
    const double diurnal = 4.0 * std::sin(2.0 * kPi * (md - 540) / 1440.0);
    const double t_out_site =
        t_season + plan.t_out_wander + diurnal + rng.next_gaussian(0.0, cfg.noise_weather * 0.3);
    const double t_out_station =
        1.05 * t_out_site + 0.5 + rng.next_gaussian(0.0, cfg.noise_weather * 0.4);
    t_out_history.push_back(t_out_site);
    const double t_out_delta_30 =
        m >= 30 ? t_out_site - t_out_history[m - 30] : 0.0;

    if (raining) {
      if (rng.next_bernoulli(0.02)) raining = false;
      rain_volume = raining ? std::max(0.0, rain_volume + rng.next_gaussian(0.0, 0.05)) : 0.0;
    } else if (rng.next_bernoulli(0.0015)) {
      raining = true;
      rain_volume = rng.next_lognormal(-1.0, 0.5);
    }

    wind = std::max(0.0, 0.995 * wind + 0.015 + rng.next_gaussian(0.0, cfg.noise_weather * 0.15));
    wind_dir += rng.next_gaussian(0.0, 0.02);
    pressure = 1013.0 + 0.998 * (pressure - 1013.0) + rng.next_gaussian(0.0, 0.05);
    cloud = std::clamp(cloud + rng.next_gaussian(0.0, 0.01), 0.0, 1.0);
    rh_out = std::clamp(rh_out + 0.01 * (60.0 - rh_out) + rng.next_gaussian(0.0, 0.4), 5.0, 100.0);

    const double solar_clear = md > 360 && md < 1080
                                   ? std::sin(kPi * (md - 360) / 720.0) * plan.clear_sky
                                   : 0.0;
    const double solar = 800.0 * solar_clear * (1.0 - 0.75 * cloud);

    // indoor dynamics, driven by the previous minute's window state
    const double decay = window_open ? cfg.vent_decay_open : cfg.vent_decay_closed;
    co2 += cfg.co2_per_occupant * occupancy - decay * (co2 - cfg.co2_baseline) +
           rng.next_gaussian(0.0, cfg.noise_co2);
    co2 = std::max(co2, 380.0);

    double heat = cfg.hvac_pull * (cfg.t_setpoint - t_in) + cfg.occupant_heat * occupancy +
                  cfg.solar_heat * (solar / 800.0);
    if (plan.overheat_start >= 0 && md >= plan.overheat_start &&
        md < plan.overheat_start + cfg.overheat_duration_min) {
      heat += cfg.overheat_rate;
    }
    if (window_open) heat -= cfg.open_window_pull * (t_in - t_out_site);
    t_in += heat + rng.next_gaussian(0.0, cfg.noise_t);

    rh += 0.01 * (37.5 - rh) + 0.03 * occupancy + rng.next_gaussian(0.0, cfg.noise_rh);
    if (window_open) rh += cfg.open_window_rh_pull * (rh_out - rh);
    rh = std::clamp(rh, 0.0, 100.0);

    t_in_history.push_back(t_in);
    const double rise30 = m >= 30 ? t_in - t_in_history[m - 30] : 0.0;

    // window state machine
    const std::int64_t timestamp = cfg.start_timestamp + m;
    const double prev_co2 =
        out.dataset.records.empty() ? co2 : out.dataset.records.back().co2;
    if (window_open) {
      if (timestamp >= close_at || (cfg.close_on_departure && occupancy == 0)) {
        window_open = false;
      }
    } else if (occupancy > 0) {
      bool opened = false;
      TriggerCause cause = TriggerCause::arrival;
      if (arrival_now && rng.next_bernoulli(cfg.arrival_open_prob)) {
        opened = true;
        cause = TriggerCause::arrival;
      } else if (prev_co2 < cfg.co2_open_threshold && co2 >= cfg.co2_open_threshold) {
        opened = true;
        cause = TriggerCause::co2;
      } else if (prev_rise30 < cfg.temp_rise_threshold && rise30 >= cfg.temp_rise_threshold &&
                 t_in > cfg.t_setpoint + 0.5) {
        opened = true;
        cause = TriggerCause::temp_rise;
      }
      if (opened) {
        window_open = true;
        const double duration =
            std::max(3.0, rng.next_lognormal(cfg.duration_log_mean, cfg.duration_log_std));
        close_at = timestamp + static_cast<std::int64_t>(std::lround(duration));
        out.triggers.push_back({timestamp, cause});
      }
    }
    prev_rise30 = rise30;

    ClimateRecord r;
    r.timestamp = timestamp;
    r.co2 = co2;
    r.t_indoor = t_in;
    r.rh = rh;
    r.window_open = window_open;
    r.static_features = {co2,
                         rh,
                         t_in,
                         t_out_station,
                         t_out_site,
                         rain_volume,
                         std::sin(2.0 * kPi * md / 1440.0),
                         std::cos(2.0 * kPi * md / 1440.0),
                         std::sin(2.0 * kPi * dow / 7.0),
                         std::cos(2.0 * kPi * dow / 7.0),
                         wind,
                         std::sin(wind_dir),
                         std::cos(wind_dir),
                         pressure,
                         solar,
                         cloud,
                         rh_out,
                         std::sin(2.0 * kPi * doy / 365.0),
                         std::cos(2.0 * kPi * doy / 365.0),
                         plan.workday ? 1.0 : 0.0,
                         t_out_delta_30};
    out.dataset.records.push_back(std::move(r));
  }
  return out;
}

void save_triggers_csv(const std::vector<TriggerEvent>& triggers, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << "timestamp,cause\n";
  for (const auto& t : triggers) file << t.timestamp << ',' << to_string(t.cause) << '\n';
  if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<TriggerEvent> load_triggers_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(file, line)) throw std::runtime_error("'" + path + "' is empty");
  std::vector<TriggerEvent> out;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad trigger row '" + line + "'");
    TriggerEvent e;
    e.timestamp = std::stoll(line.substr(0, comma));
    e.cause = trigger_cause_from_string(line.substr(comma + 1));
    out.push_back(e);
  }
  return out;
}

}  // namespace winpred
