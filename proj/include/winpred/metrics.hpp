#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace winpred {

// Confusion counts for the binary window-state problem. The positive class is
// "open" throughout.
struct ConfusionCounts {
  std::size_t tp = 0;  // predicted open,   actually open
  std::size_t fp = 0;  // predicted open,   actually closed
  std::size_t tn = 0;  // predicted closed, actually closed
  std::size_t fn = 0;  // predicted closed, actually open

  std::size_t total() const { return tp + fp + tn + fn; }
};

// Ratios with a zero denominator are reported as NaN with the matching flag
// cleared — never silently coerced to 0. Accuracy is always defined because
// computation requires total() > 0.
struct ClassificationMetrics {
  double acc = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double f1 = 0.0;
  bool tpr_defined = true;
  bool tnr_defined = true;
  bool f1_defined = true;
};

// Element-wise tally of two aligned boolean series (nonzero = open).
// Throws std::invalid_argument on length mismatch or empty input.
ConfusionCounts confusion(const std::vector<std::uint8_t>& predicted,
                          const std::vector<std::uint8_t>& actual);

// acc = (tp+tn)/total, tpr = tp/(tp+fn), tnr = tn/(tn+fp),
// f1 = 2tp/(2tp+fp+fn). Throws std::invalid_argument when all counts are zero.
ClassificationMetrics classification_metrics(const ConfusionCounts& c);

// Fraction of observation steps t for which the actual series contains a
// closed->open transition inside (t, t+lag] AND the predicted series contains
// one inside the same window, over all steps t where the actual series does.
// Series are aligned at minute resolution. Returns NaN when the actual series
// has no qualifying observation step. Throws std::invalid_argument when
// lag < 1 or the series are shorter than lag+1 or mismatched.
double action_correct_fraction(const std::vector<std::uint8_t>& predicted,
                               const std::vector<std::uint8_t>& actual,
                               std::size_t lag_minutes);

// Raw counts behind action_correct_fraction: (matched, eligible). Lenient on
// short series — anything shorter than lag+1 simply contributes (0, 0) — so
// per-segment counts can be summed across a gap-broken recording.
std::pair<std::size_t, std::size_t> action_counts(
    const std::vector<std::uint8_t>& predicted,
    const std::vector<std::uint8_t>& actual, std::size_t lag_minutes);

// One maximal constant-state run. Runs cut short by a series boundary (or, at
// a higher level, by a recording gap) carry truncated = true so summaries can
// include or exclude them.
struct DurationRun {
  double hours = 0.0;
  bool truncated = false;
};

// Maximal run lengths of a minute-resolution series, split by state:
// (open_runs, closed_runs). The first and last runs are flagged truncated.
// Throws std::invalid_argument on empty input.
std::pair<std::vector<DurationRun>, std::vector<DurationRun>> state_durations(
    const std::vector<std::uint8_t>& series);

// Quantile by linear interpolation between order statistics: with the n
// values sorted, the p-quantile sits at rank h = (n-1)*p and interpolates
// linearly between the neighbouring order statistics. Returns NaN for an
// empty input. Throws std::invalid_argument unless 0 <= p <= 1.
double quantile(std::vector<double> values, double p);

// Quartile summary of a set of runs; NaN throughout when no run qualifies.
struct DurationSummary {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  std::size_t n_runs = 0;
};

DurationSummary summarize_durations(const std::vector<DurationRun>& runs,
                                    bool include_truncated);

// Behavioral summary of one boolean series: fraction of time open, opening
// actions (closed->open transitions) per 24 h of covered time, and quartiles
// of the open-state and closed-state run durations in hours.
struct AbsoluteMetrics {
  double open_fraction = 0.0;
  double actions_per_day = 0.0;
  DurationSummary opening_durations;
  DurationSummary closing_durations;
};

AbsoluteMetrics absolute_metrics_single(const std::vector<std::uint8_t>& series,
                                        bool include_truncated = true);

// Metrics for (predicted, actual), in that order.
std::pair<AbsoluteMetrics, AbsoluteMetrics> absolute_metrics(
    const std::vector<std::uint8_t>& predicted,
    const std::vector<std::uint8_t>& actual, bool include_truncated = true);

// Behavioral summary of a series broken into contiguous segments by recording
// gaps: fractions and rates pool over all covered minutes, transitions are
// only counted inside segments, and runs at segment edges are truncated.
AbsoluteMetrics absolute_metrics_segmented(
    const std::vector<std::vector<std::uint8_t>>& segments,
    bool include_truncated = true);

}  // namespace winpred
