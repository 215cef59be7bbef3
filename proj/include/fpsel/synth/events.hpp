#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "fpsel/common/rng.hpp"
#include "fpsel/signal/waveform.hpp"
#include "fpsel/synth/scenario.hpp"

namespace fpsel::synth {

struct SynthConfig {
  double sample_rate_hz = 4000.0;
  double fundamental_hz = kDefaultFundamentalHz;
  double window_seconds = kStandardWindowSeconds;
  /// Circuit integration steps per output sample.
  int substeps = 10;
  /// ADC step sizes used by measure(); 0 disables quantisation.
  double lsb_v = 0.5;
  double lsb_i = 1e-3;
};

using PhaseSeries = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Current drawn by the event element itself (amperes per phase, bus into
/// element) and the neutral displacement it causes, at the output rate.
struct EventTrace {
  PhaseSeries current;
  Eigen::RowVectorXd neutral;
  /// Sample index of the onset.
  Eigen::Index onset = 0;
};

EventTrace event_trace(const EventSpec& spec, const SynthConfig& config = {});

/// Noise-free steady state at the relay: Thevenin source feeding the feeder
/// load, plus the standing zero-sequence voltage and current. v0/i0 are the
/// means of the phases.
WaveformWindow synth_base(const GridScenario& s, const SynthConfig& config = {},
                          std::optional<TimePoint> start = std::nullopt);

/// Adds the event's voltage drop, neutral shift and relay current (the
/// element current downstream, a reversed back-feed fraction upstream) to a
/// noise-free base built from the same scenario.
WaveformWindow inject_event(const WaveformWindow& base, const EventSpec& spec,
                            const SynthConfig& config = {});

/// Gaussian noise on the phase channels, zero sequence recomputed, then
/// every channel rounded to the ADC step.
WaveformWindow measure(const WaveformWindow& clean, const GridScenario& s, Rng& rng,
                       const SynthConfig& config = {});

/// synth_base + inject_event + measure.
WaveformWindow synth_event_window(const EventSpec& spec, std::uint64_t noise_seed,
                                  const SynthConfig& config = {},
                                  std::optional<TimePoint> start = std::nullopt);

/// synth_base + measure.
WaveformWindow synth_quiet_window(const GridScenario& s, std::uint64_t noise_seed,
                                  const SynthConfig& config = {},
                                  std::optional<TimePoint> start = std::nullopt);

}  // namespace fpsel::synth
