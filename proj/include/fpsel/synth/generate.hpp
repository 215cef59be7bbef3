#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpsel/common/time.hpp"
#include "fpsel/signal/waveform.hpp"
#include "fpsel/synth/events.hpp"

namespace fpsel::synth {

struct SurrogateDataset {
  std::vector<WaveformWindow> windows;
  std::vector<int> labels;
};

/// `per_class` windows for each of the 34 (event, direction) classes,
/// grouped by class. Window w draws its scenario, event randomness and
/// noise from counter-based streams of (seed, w), so the output does not
/// depend on `threads`.
SurrogateDataset gen_surrogate_dataset(int per_class, std::uint64_t seed, const SynthConfig& config = {},
                                       int threads = 1);

struct RecordingConfig {
  double days = 30.0;
  int faults = 3;
  std::uint64_t seed = 42;
  int windows_per_hour = 4;
  std::string station = "S1";
  /// Seeds the station network draw; `seed` when unset. Recordings sharing
  /// a station seed describe the same station over different periods.
  std::optional<std::uint64_t> station_seed;
  TimePoint start = TimePoint{std::chrono::sys_days{std::chrono::year{2024} / 1 / 1}};
  double min_fault_gap_h = 48.0;
  /// Precursors appear in the `precursor_horizon_h` hours before a fault.
  double precursor_horizon_h = 168.0;
  /// Per-window probability of a spurious arc that never develops.
  double precursor_base_rate = 0.01;
  /// Per-window probability just before a fault.
  double precursor_peak_rate = 0.6;
  double benign_rate = 0.1;
  /// Share of benign windows that are arcs on a neighbouring feeder
  /// (upstream HIF or incipient events that never become a local fault).
  double decoy_share = 0.0;
  SynthConfig synth{};
};

enum class WindowKind { quiet, benign, precursor };

/// A multi-day recording of already-selected windows. Windows are rendered
/// on demand from counter-based seeds; only the schedule is stored.
class Recording {
 public:
  Recording(RecordingConfig config, std::vector<TimePoint> faults, std::vector<WindowKind> kinds);

  const RecordingConfig& config() const { return config_; }
  std::size_t size() const { return kinds_.size(); }
  const std::vector<TimePoint>& faults() const { return faults_; }
  WindowKind kind(std::size_t j) const { return kinds_.at(j); }
  TimePoint window_time(std::size_t j) const;
  /// Event behind window j (precursor and benign windows only).
  EventSpec event(std::size_t j) const;
  WaveformWindow window(std::size_t j) const;

 private:
  GridScenario scenario(std::size_t j) const;

  RecordingConfig config_;
  std::vector<TimePoint> faults_;
  std::vector<WindowKind> kinds_;
  GridScenario station_;
};

/// Per-window precursor probability at `hours_to_fault` before the next
/// fault (negative or beyond the horizon: the base rate).
double precursor_probability(const RecordingConfig& config, double hours_to_fault);

/// Plants faults at least `min_fault_gap_h` apart (uniform spacing draw)
/// and schedules precursor, benign and quiet windows. Throws
/// InvalidArgument when the requested faults do not fit.
Recording gen_fp_recording(const RecordingConfig& config);

}  // namespace fpsel::synth
