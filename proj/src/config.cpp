#include "winpred/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace winpred {

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown key '" + key + "' in section '" +
                                  section + "'");
    }
  }
}

template <typename T>
void assign(const json& object, const char* key, T& target) {
  if (auto it = object.find(key); it != object.end()) {
    target = it->get<T>();
  }
}

SyntheticConfig parse_synthetic(const json& object) {
  check_keys(object, "synthetic",
             {"preset", "n_days", "seed", "start_timestamp", "n_occupants",
              "second_occupant_prob", "arrival_mean_min", "arrival_std_min",
              "departure_mean_min", "departure_std_min", "close_on_departure",
              "co2_baseline", "co2_per_occupant", "vent_decay_closed",
              "vent_decay_open", "t_setpoint", "hvac_pull", "occupant_heat",
              "solar_heat", "open_window_pull", "open_window_rh_pull",
              "overheat_event_prob", "overheat_rate", "overheat_duration_min",
              "co2_open_threshold", "temp_rise_threshold", "arrival_open_prob",
              "duration_log_mean", "duration_log_std", "noise_co2", "noise_t",
              "noise_rh", "noise_weather", "target_open_fraction"});

  SyntheticConfig config;
  if (auto it = object.find("preset"); it != object.end()) {
    const std::string preset = it->get<std::string>();
    if (preset == "co2_only") {
      config = SyntheticConfig::co2_only();
    } else if (preset != "default") {
      throw std::invalid_argument("unknown synthetic preset '" + preset +
                                  "' (expected 'default' or 'co2_only')");
    }
  }
  assign(object, "n_days", config.n_days);
  assign(object, "seed", config.seed);
  assign(object, "start_timestamp", config.start_timestamp);
  assign(object, "n_occupants", config.n_occupants);
  assign(object, "second_occupant_prob", config.second_occupant_prob);
  assign(object, "arrival_mean_min", config.arrival_mean_min);
  assign(object, "arrival_std_min", config.arrival_std_min);
  assign(object, "departure_mean_min", config.departure_mean_min);
  assign(object, "departure_std_min", config.departure_std_min);
  assign(object, "close_on_departure", config.close_on_departure);
  assign(object, "co2_baseline", config.co2_baseline);
  assign(object, "co2_per_occupant", config.co2_per_occupant);
  assign(object, "vent_decay_closed", config.vent_decay_closed);
  assign(object, "vent_decay_open", config.vent_decay_open);
  assign(object, "t_setpoint", config.t_setpoint);
  assign(object, "hvac_pull", config.hvac_pull);
  assign(object, "occupant_heat", config.occupant_heat);
  assign(object, "solar_heat", config.solar_heat);
  assign(object, "open_window_pull", config.open_window_pull);
  assign(object, "open_window_rh_pull", config.open_window_rh_pull);
  assign(object, "overheat_event_prob", config.overheat_event_prob);
  assign(object, "overheat_rate", config.overheat_rate);
  assign(object, "overheat_duration_min", config.overheat_duration_min);
  assign(object, "co2_open_threshold", config.co2_open_threshold);
  assign(object, "temp_rise_threshold", config.temp_rise_threshold);
  assign(object, "arrival_open_prob", config.arrival_open_prob);
  assign(object, "duration_log_mean", config.duration_log_mean);
  assign(object, "duration_log_std", config.duration_log_std);
  assign(object, "noise_co2", config.noise_co2);
  assign(object, "noise_t", config.noise_t);
  assign(object, "noise_rh", config.noise_rh);
  assign(object, "noise_weather", config.noise_weather);
  assign(object, "target_open_fraction", config.target_open_fraction);
  return config;
}

Hyperparams parse_hyperparams(const json& object) {
  check_keys(object, "hyperparams",
             {"hidden_widths", "l1_lambda", "lr", "base_iterations",
              "batch_size", "seq_minutes", "lag_minutes", "checkpoint_interval",
              "seed", "positive_class_weight"});
  Hyperparams hp;
  assign(object, "hidden_widths", hp.hidden_widths);
  assign(object, "l1_lambda", hp.l1_lambda);
  assign(object, "lr", hp.lr);
  assign(object, "base_iterations", hp.base_iterations);
  assign(object, "batch_size", hp.batch_size);
  assign(object, "seq_minutes", hp.seq_minutes);
  assign(object, "lag_minutes", hp.lag_minutes);
  assign(object, "checkpoint_interval", hp.checkpoint_interval);
  assign(object, "seed", hp.seed);
  assign(object, "positive_class_weight", hp.positive_class_weight);
  return hp;
}

GridSpec parse_grid(const json& object) {
  check_keys(object, "grid", {"hidden_widths", "l1_lambdas", "lrs",
                              "base_iterations", "seq_minutes", "lag_minutes"});
  GridSpec spec;
  assign(object, "hidden_widths", spec.hidden_widths_options);
  assign(object, "l1_lambdas", spec.l1_lambdas);
  assign(object, "lrs", spec.lrs);
  assign(object, "base_iterations", spec.base_iterations_options);
  assign(object, "seq_minutes", spec.seq_minutes_options);
  assign(object, "lag_minutes", spec.lag_minutes_options);
  return spec;
}

DataPaths parse_data(const json& object) {
  check_keys(object, "data", {"csv", "split", "train_csv", "val_csv",
                              "test_csv", "triggers_csv"});
  DataPaths data;
  assign(object, "csv", data.csv);
  assign(object, "split", data.split);
  assign(object, "train_csv", data.train_csv);
  assign(object, "val_csv", data.val_csv);
  assign(object, "test_csv", data.test_csv);
  assign(object, "triggers_csv", data.triggers_csv);
  if (!data.split.empty() && data.split.size() != 3) {
    throw std::invalid_argument(
        "data.split needs exactly three fractions (train, val, test)");
  }
  return data;
}

}  // namespace

void RunConfig::override_seed(std::uint64_t seed) {
  synthetic.seed = seed;
  hp.seed = seed;
  grid.base.seed = seed;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config '" + path + "'");
  }
  try {
    const json root = json::parse(in,
                                  /*cb=*/nullptr, /*allow_exceptions=*/true,
                                  /*ignore_comments=*/true);
    check_keys(root, "top level",
               {"out", "jobs", "synthetic", "hyperparams", "grid", "data",
                "eval", "analyze", "lag_sweep"});

    RunConfig config;
    assign(root, "out", config.out);
    assign(root, "jobs", config.jobs);

    if (auto it = root.find("synthetic"); it != root.end()) {
      config.has_synthetic = true;
      config.synthetic = parse_synthetic(*it);
    }
    if (auto it = root.find("hyperparams"); it != root.end()) {
      config.hp = parse_hyperparams(*it);
    }
    if (auto it = root.find("grid"); it != root.end()) {
      config.has_grid = true;
      config.grid = parse_grid(*it);
    }
    if (auto it = root.find("data"); it != root.end()) {
      config.data = parse_data(*it);
    }
    if (auto it = root.find("eval"); it != root.end()) {
      check_keys(*it, "eval", {"model"});
      assign(*it, "model", config.eval.model);
    }
    if (auto it = root.find("analyze"); it != root.end()) {
      check_keys(*it, "analyze", {"model", "episodes"});
      assign(*it, "model", config.analyze.model);
      assign(*it, "episodes", config.analyze.episodes);
    }
    if (auto it = root.find("lag_sweep"); it != root.end()) {
      check_keys(*it, "lag_sweep", {"lags", "repeats"});
      assign(*it, "lags", config.sweep.lags);
      assign(*it, "repeats", config.sweep.repeats);
    }
    config.grid.base = config.hp;
    return config;
  } catch (const json::exception& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
}

}  // namespace winpred
