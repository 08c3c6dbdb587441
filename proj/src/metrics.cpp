#include "winpred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace winpred {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ConfusionCounts confusion(const std::vector<std::uint8_t>& predicted,
                          const std::vector<std::uint8_t>& actual) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("confusion: series lengths differ");
  }
  if (predicted.empty()) {
    throw std::invalid_argument("confusion: empty series");
  }
  ConfusionCounts c;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const bool p = predicted[k] != 0;
    const bool a = actual[k] != 0;
    if (p && a) {
      ++c.tp;
    } else if (p && !a) {
      ++c.fp;
    } else if (!p && !a) {
      ++c.tn;
    } else {
      ++c.fn;
    }
  }
  return c;
}

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
  const std::size_t total = c.total();
  if (total == 0) {
    throw std::invalid_argument("classification_metrics: all counts are zero");
  }
  ClassificationMetrics m;
  m.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  if (c.tp + c.fn > 0) {
    m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    m.tpr = kNaN;
    m.tpr_defined = false;
  }
  if (c.tn + c.fp > 0) {
    m.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  } else {
    m.tnr = kNaN;
    m.tnr_defined = false;
  }
  if (2 * c.tp + c.fp + c.fn > 0) {
    m.f1 = static_cast<double>(2 * c.tp) /
           static_cast<double>(2 * c.tp + c.fp + c.fn);
  } else {
    m.f1 = kNaN;
    m.f1_defined = false;
  }
  return m;
}

std::pair<std::size_t, std::size_t> action_counts(
    const std::vector<std::uint8_t>& predicted,
    const std::vector<std::uint8_t>& actual, std::size_t lag_minutes) {
  if (lag_minutes < 1) {
    throw std::invalid_argument("action_counts: lag must be >= 1");
  }
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("action_counts: series lengths differ");
  }
  const std::size_t n = actual.size();
  if (n < lag_minutes + 1) return {0, 0};
  // opening[k] = 1 when a closed->open transition happens at step k (k >= 1);
  // prefix sums make the windowed existence queries O(1) per step.
  auto opening_prefix = [n](const std::vector<std::uint8_t>& s) {
    std::vector<std::size_t> prefix(n + 1, 0);
    for (std::size_t k = 1; k < n; ++k) {
      const bool opened = s[k - 1] == 0 && s[k] != 0;
      prefix[k + 1] = prefix[k] + (opened ? 1 : 0);
    }
    return prefix;
  };
  const auto actual_pre = opening_prefix(actual);
  const auto pred_pre = opening_prefix(predicted);

  std::size_t eligible = 0, matched = 0;
  for (std::size_t t = 0; t + lag_minutes < n; ++t) {
    // transitions at steps t+1 .. t+lag  <=>  prefix[t+lag+1] - prefix[t+1]
    const std::size_t hi = t + lag_minutes + 1;
    if (actual_pre[hi] - actual_pre[t + 1] > 0) {
      ++eligible;
      if (pred_pre[hi] - pred_pre[t + 1] > 0) ++matched;
    }
  }
  return {matched, eligible};
}

double action_correct_fraction(const std::vector<std::uint8_t>& predicted,
                               const std::vector<std::uint8_t>& actual,
                               std::size_t lag_minutes) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("action_correct_fraction: series lengths differ");
  }
  if (lag_minutes >= 1 && actual.size() < lag_minutes + 1) {
    throw std::invalid_argument(
        "action_correct_fraction: series shorter than lag + 1");
  }
  const auto [matched, eligible] = action_counts(predicted, actual, lag_minutes);
  if (eligible == 0) return kNaN;
  return static_cast<double>(matched) / static_cast<double>(eligible);
}

std::pair<std::vector<DurationRun>, std::vector<DurationRun>> state_durations(
    const std::vector<std::uint8_t>& series) {
  if (series.empty()) {
    throw std::invalid_argument("state_durations: empty series");
  }
  std::vector<DurationRun> open_runs, closed_runs;
  std::size_t run_start = 0;
  auto flush = [&](std::size_t end, bool truncated) {
    DurationRun run;
    run.hours = static_cast<double>(end - run_start) / 60.0;
    run.truncated = truncated;
    (series[run_start] != 0 ? open_runs : closed_runs).push_back(run);
  };
  for (std::size_t k = 1; k < series.size(); ++k) {
    if ((series[k] != 0) != (series[run_start] != 0)) {
      // the first run starts at the series boundary: cut short
      flush(k, run_start == 0);
      run_start = k;
    }
  }
  flush(series.size(), true);  // the last run ends at the series boundary
  return {std::move(open_runs), std::move(closed_runs)};
}

double quantile(std::vector<double> values, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile: p must lie in [0, 1]");
  }
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

DurationSummary summarize_durations(const std::vector<DurationRun>& runs,
                                    bool include_truncated) {
  std::vector<double> hours;
  hours.reserve(runs.size());
  for (const auto& run : runs) {
    if (include_truncated || !run.truncated) hours.push_back(run.hours);
  }
  DurationSummary s;
  s.n_runs = hours.size();
  s.q25 = quantile(hours, 0.25);
  s.median = quantile(hours, 0.5);
  s.q75 = quantile(hours, 0.75);
  s.iqr = s.q75 - s.q25;
  return s;
}

AbsoluteMetrics absolute_metrics_single(const std::vector<std::uint8_t>& series,
                                        bool include_truncated) {
  if (series.empty()) {
    throw std::invalid_argument("absolute_metrics: empty series");
  }
  AbsoluteMetrics m;
  std::size_t open_minutes = 0, actions = 0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] != 0) ++open_minutes;
    if (k > 0 && series[k - 1] == 0 && series[k] != 0) ++actions;
  }
  const double n = static_cast<double>(series.size());
  m.open_fraction = static_cast<double>(open_minutes) / n;
  m.actions_per_day = static_cast<double>(actions) / (n / 1440.0);
  const auto [open_runs, closed_runs] = state_durations(series);
  m.opening_durations = summarize_durations(open_runs, include_truncated);
  m.closing_durations = summarize_durations(closed_runs, include_truncated);
  return m;
}

std::pair<AbsoluteMetrics, AbsoluteMetrics> absolute_metrics(
    const std::vector<std::uint8_t>& predicted,
    const std::vector<std::uint8_t>& actual, bool include_truncated) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("absolute_metrics: series lengths differ");
  }
  return {absolute_metrics_single(predicted, include_truncated),
          absolute_metrics_single(actual, include_truncated)};
}

AbsoluteMetrics absolute_metrics_segmented(
    const std::vector<std::vector<std::uint8_t>>& segments,
    bool include_truncated) {
  std::size_t total_minutes = 0, open_minutes = 0, actions = 0;
  std::vector<DurationRun> open_runs, closed_runs;
  for (const auto& seg : segments) {
    if (seg.empty()) continue;
    total_minutes += seg.size();
    for (std::size_t k = 0; k < seg.size(); ++k) {
      if (seg[k] != 0) ++open_minutes;
      if (k > 0 && seg[k - 1] == 0 && seg[k] != 0) ++actions;
    }
    auto [opens, closes] = state_durations(seg);
    open_runs.insert(open_runs.end(), opens.begin(), opens.end());
    closed_runs.insert(closed_runs.end(), closes.begin(), closes.end());
  }
  if (total_minutes == 0) {
    throw std::invalid_argument("absolute_metrics: no covered minutes");
  }
  AbsoluteMetrics m;
  const double n = static_cast<double>(total_minutes);
  m.open_fraction = static_cast<double>(open_minutes) / n;
  m.actions_per_day = static_cast<double>(actions) / (n / 1440.0);
  m.opening_durations = summarize_durations(open_runs, include_truncated);
  m.closing_durations = summarize_durations(closed_runs, include_truncated);
  return m;
}

}  // namespace winpred
