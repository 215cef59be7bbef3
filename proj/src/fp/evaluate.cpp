#include "fpsel/fp/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "json.hpp"

namespace fpsel::fp {

using json = nlohmann::json;

FaultLog read_fault_log(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.header();
  if (header.size() != 2 || header[0] != "station" || header[1] != "fault_time_iso8601") {
    throw LoadError("fault log: expected header 'station,fault_time_iso8601'", 1, "");
  }
  FaultLog log;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2) throw LoadError("fault log: expected 2 fields", reader.row(), "");
    if (fields[0].empty()) throw LoadError("fault log: empty station", reader.row(), "station");
    TimePoint t;
    try {
      t = parse_iso8601(fields[1]);
    } catch (const DataError& e) {
      throw LoadError(e.what(), reader.row(), "fault_time_iso8601");
    }
    log[std::string(fields[0])].push_back(t);
  }
  for (auto& [station, faults] : log) std::sort(faults.begin(), faults.end());
  return log;
}

void write_fault_log(std::ostream& out, const FaultLog& log) {
  csv::write_row(out, {"station", "fault_time_iso8601"});
  for (const auto& [station, faults] : log) {
    std::vector<TimePoint> sorted = faults;
    std::sort(sorted.begin(), sorted.end());
    for (auto t : sorted) csv::write_row(out, {station, format_iso8601(t)});
  }
}

std::vector<TimePoint> cluster_faults(std::vector<TimePoint> faults, double gap_h) {
  std::sort(faults.begin(), faults.end());
  std::vector<TimePoint> kept;
  for (auto t : faults) {
    if (kept.empty() || hours_between(kept.back(), t) >= gap_h) kept.push_back(t);
  }
  return kept;
}

std::vector<double> EvalReport::lead_times() const {
  std::vector<double> out;
  for (const auto& f : faults) {
    if (f.detected) out.push_back(f.lead_h);
  }
  return out;
}

namespace {

void finish_metrics(EvalReport& r) {
  const long predicted = r.tp + r.fp_events;
  const long actual = r.tp + r.fn;
  r.precision = predicted > 0 ? static_cast<double>(r.tp) / static_cast<double>(predicted) : 0.0;
  r.recall = actual > 0 ? static_cast<double>(r.tp) / static_cast<double>(actual) : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
}

}  // namespace

EvalReport evaluate(std::span<const TimePoint> hours, std::span<const double> smoothed,
                    std::span<const TimePoint> faults_in, const EvalOptions& o) {
  if (hours.empty()) throw InvalidArgument("evaluate: empty probability series");
  if (hours.size() != smoothed.size()) throw InvalidArgument("evaluate: hours and probabilities differ in length");
  for (std::size_t i = 1; i < hours.size(); ++i) {
    if (hours[i] <= hours[i - 1]) throw InvalidArgument("evaluate: hours must be strictly increasing");
  }
  std::vector<TimePoint> faults(faults_in.begin(), faults_in.end());
  std::sort(faults.begin(), faults.end());
  const TimePoint lo = hours.front();
  const TimePoint hi = hours.back() + std::chrono::hours(1);
  auto scored = [&](std::size_t f) { return faults[f] > lo && faults[f] <= hi; };

  const std::size_t n = hours.size();
  std::vector<bool> positive(n);
  std::vector<std::size_t> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    positive[i] = !std::isnan(smoothed[i]) && smoothed[i] >= o.threshold;
    target[i] = static_cast<std::size_t>(std::upper_bound(faults.begin(), faults.end(), hours[i]) - faults.begin());
  }

  // Hours whose trailing average still reaches back before the last fault.
  auto after_fault = [&](std::size_t i) {
    return target[i] > 0 && hours_between(faults[target[i] - 1], hours[i]) < o.post_fault_grace_h;
  };

  EvalReport r;
  r.states.assign(n, HourState::negative);
  std::vector<std::size_t> first_hit(faults.size(), n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!positive[i]) continue;
    const std::size_t f = target[i];
    const double gap = f < faults.size() ? hours_between(hours[i], faults[f]) : INFINITY;
    if (f < faults.size() && scored(f) && gap <= o.attribution_h) {
      r.states[i] = HourState::attributed;
      first_hit[f] = std::min(first_hit[f], i);
    } else if (gap <= o.fp_lookahead_h || after_fault(i)) {
      r.states[i] = HourState::pending;
    } else {
      r.states[i] = HourState::false_positive;
    }
  }

  for (std::size_t f = 0; f < faults.size(); ++f) {
    if (!scored(f)) continue;
    FaultOutcome out{faults[f], false, 0.0};
    if (first_hit[f] < n) {
      std::size_t j = first_hit[f];
      while (j > 0 && hours[j - 1] + std::chrono::hours(1) == hours[j] && positive[j - 1] && target[j - 1] == f &&
             hours_between(hours[j - 1], faults[f]) <= o.horizon_h) {
        --j;
      }
      out.detected = true;
      out.lead_h = hours_between(hours[j], faults[f]);
      ++r.tp;
    } else {
      ++r.fn;
    }
    r.faults.push_back(out);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (r.states[i] != HourState::false_positive) continue;
    if (!r.false_positives.empty() && hours_between(r.false_positives.back().last, hours[i]) < o.fp_merge_gap_h) {
      r.false_positives.back().last = hours[i];
      ++r.false_positives.back().hours;
    } else {
      r.false_positives.push_back({hours[i], hours[i], 1});
    }
  }
  r.fp_events = static_cast<long>(r.false_positives.size());
  finish_metrics(r);
  return r;
}

EvalReport combine(std::span<const EvalReport> reports) {
  EvalReport out;
  for (const auto& r : reports) {
    out.tp += r.tp;
    out.fn += r.fn;
    out.fp_events += r.fp_events;
    out.faults.insert(out.faults.end(), r.faults.begin(), r.faults.end());
    out.false_positives.insert(out.false_positives.end(), r.false_positives.begin(), r.false_positives.end());
    out.states.insert(out.states.end(), r.states.begin(), r.states.end());
  }
  finish_metrics(out);
  return out;
}

LeadTimeStats lead_time_stats(const EvalReport& report) {
  std::vector<double> v = report.lead_times();
  LeadTimeStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    return k + 1 < v.size() ? v[k] + frac * (v[k + 1] - v[k]) : v[k];
  };
  s.count = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = v.front();
  s.max = v.back();
  return s;
}

namespace {

json report_json(const EvalReport& r) {
  json j;
  j["tp"] = r.tp;
  j["fn"] = r.fn;
  j["fp_events"] = r.fp_events;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["lead_times_h"] = r.lead_times();
  const auto s = lead_time_stats(r);
  if (s.empty()) {
    j["lead_time_stats"] = nullptr;
  } else {
    j["lead_time_stats"] = {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"q1", s.q1},
                            {"q3", s.q3},       {"min", s.min},   {"max", s.max}};
  }
  j["faults"] = json::array();
  for (const auto& f : r.faults) {
    j["faults"].push_back({{"time", format_iso8601(f.time)},
                           {"detected", f.detected},
                           {"lead_h", f.detected ? json(f.lead_h) : json(nullptr)}});
  }
  j["false_positive_events"] = json::array();
  for (const auto& e : r.false_positives) {
    j["false_positive_events"].push_back(
        {{"first", format_iso8601(e.first)}, {"last", format_iso8601(e.last)}, {"hours", e.hours}});
  }
  return j;
}

}  // namespace

std::string report_to_json(const std::map<std::string, EvalReport>& by_station) {
  std::vector<EvalReport> all;
  json stations = json::object();
  for (const auto& [name, r] : by_station) {
    stations[name] = report_json(r);
    all.push_back(r);
  }
  json j;
  j["combined"] = report_json(combine(all));
  j["stations"] = stations;
  return j.dump(2);
}

}  // namespace fpsel::fp
