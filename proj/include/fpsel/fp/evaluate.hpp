#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpsel/common/time.hpp"

namespace fpsel::fp {

/// Fault times per station, sorted.
using FaultLog = std::map<std::string, std::vector<TimePoint>>;

/// `station,fault_time_iso8601` with a header line. Throws LoadError.
FaultLog read_fault_log(std::istream& in);
void write_fault_log(std::ostream& out, const FaultLog& log);

/// Sorts and merges faults closer than `gap_h` to the previous kept fault
/// into that fault.
std::vector<TimePoint> cluster_faults(std::vector<TimePoint> faults, double gap_h = 24.0);

struct EvalOptions {
  double threshold = 0.5;
  /// An alarm this many hours before a fault counts as predicting it.
  double attribution_h = 84.0;
  /// Lead times are traced back at most this far.
  double horizon_h = 168.0;
  /// Alarms followed by a fault within this many hours are never false.
  double fp_lookahead_h = 240.0;
  /// False-positive hours closer than this join one event.
  double fp_merge_gap_h = 24.0;
  /// Alarms less than this many hours after a fault are never false: the
  /// trailing average (width - 1 hours) still covers pre-fault hours.
  double post_fault_grace_h = 4.0;
};

enum class HourState { negative, attributed, false_positive, pending };

struct FaultOutcome {
  TimePoint time;
  bool detected = false;
  /// Hours from the start of the alarm run to the fault (detected only).
  double lead_h = 0.0;
};

struct FpEvent {
  TimePoint first;
  TimePoint last;
  int hours = 0;
};

struct EvalReport {
  long tp = 0;
  long fn = 0;
  long fp_events = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<FaultOutcome> faults;
  std::vector<FpEvent> false_positives;
  /// One entry per input hour.
  std::vector<HourState> states;

  std::vector<double> lead_times() const;
};

/// Event-level scoring of smoothed hourly probabilities.
///
/// Hour t targets the first fault f > t. A positive hour (p >= threshold,
/// NaN never positive) is attributed when f - t <= attribution_h and f lies
/// inside the scored span (first hour, last hour + 1 h]; a fault is detected
/// when one of its hours is attributed. Its lead time walks back from the
/// earliest attributed hour through consecutive positive hours with the
/// same target, at most horizon_h before f. Remaining positive hours with
/// no fault within fp_lookahead_h and none within post_fault_grace_h before
/// them are false positives, merged into events; the rest are pending. Hours must be strictly increasing; throws
/// InvalidArgument on empty input or size mismatch.
EvalReport evaluate(std::span<const TimePoint> hours, std::span<const double> smoothed,
                    std::span<const TimePoint> faults, const EvalOptions& options = {});

/// Sums counts and concatenates outcomes; metrics recomputed.
EvalReport combine(std::span<const EvalReport> reports);

struct LeadTimeStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool empty() const { return count == 0; }
};

/// Quartiles by linear interpolation between order statistics. All fields
/// zero and count 0 when there is no detection.
LeadTimeStats lead_time_stats(const EvalReport& report);

/// `{"combined": {...}, "stations": {name: {...}}}` with counts, metrics,
/// lead times and their statistics (null when empty), and FP events.
std::string report_to_json(const std::map<std::string, EvalReport>& by_station);

}  // namespace fpsel::fp
