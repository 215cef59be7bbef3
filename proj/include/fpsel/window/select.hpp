#pragma once

#include <Eigen/Core>
#include <vector>

#include "fpsel/signal/waveform.hpp"

namespace fpsel {

enum class WindowKind { continuous, transient };

const char* to_string(WindowKind kind);

/// Winning candidate of a scoring pass over one minute.
struct WindowScore {
  Eigen::Index offset = 0;
  Channel channel = Channel::va;
  double score = 0.0;
  WindowKind kind = WindowKind::continuous;
  /// No channel produced a meaningful score (constant trend, all-zero or
  /// flat-magnitude data).
  bool degenerate = false;
};

/// Candidate grid: 500 ms windows every 250 ms, fully inside the block.
struct WindowGrid {
  Eigen::Index window_length = 0;
  Eigen::Index hop = 0;
  std::vector<Eigen::Index> offsets;
};

WindowGrid candidate_grid(Eigen::Index block_length, double sample_rate_hz);

/// Continuous-change window: argmax over channels x offsets of the RMS of
/// the minute-normalised trend (T - mu_c) / sigma_c inside the window.
/// Ties go to the lower offset, then the lower channel index.
WindowScore continuous_window(const WaveformWindow& minute);

/// Transient window: argmax over channels x offsets of the crest factor
/// max|X| / RMS(X) inside the window. All-zero channels are skipped.
WindowScore transient_window(const WaveformWindow& minute);

struct MinuteSelection {
  WindowScore continuous;
  WindowScore transient;
  WaveformWindow continuous_window;
  WaveformWindow transient_window;
};

/// Both selections with all eight channels cut at the winning offsets. The
/// two windows may overlap.
MinuteSelection select_minute_windows(const WaveformWindow& minute);

}  // namespace fpsel
