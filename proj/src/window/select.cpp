#include "fpsel/window/select.hpp"

#include <cmath>

#include "fpsel/common/error.hpp"
#include "fpsel/signal/phasor.hpp"
#include "fpsel/window/decompose.hpp"

namespace fpsel {
namespace {

constexpr double kHopSeconds = 0.25;

// A channel whose trend spread is below this fraction of its RMS is treated
// as having a constant trend.
constexpr double kFlatTrendRatio = 1e-9;

// Scores within this relative distance count as tied. Vectorised reductions
// over differently aligned segments may disagree in the last bits.
constexpr double kTieTolerance = 1e-12;

struct Best {
  double score = -1.0;
  Eigen::Index offset = 0;
  int channel = 0;
  bool found = false;

  void offer(double s, Eigen::Index o, int c) {
    // Candidates arrive in (offset, channel) order, so a strict comparison
    // keeps the lowest offset / channel on ties.
    if (!found || s > score * (1.0 + kTieTolerance)) {
      score = s;
      offset = o;
      channel = c;
      found = true;
    }
  }
};

}  // namespace

const char* to_string(WindowKind kind) {
  return kind == WindowKind::continuous ? "continuous" : "transient";
}

WindowGrid candidate_grid(Eigen::Index block_length, double sample_rate_hz) {
  WindowGrid grid;
  grid.window_length = std::llround(kStandardWindowSeconds * sample_rate_hz);
  grid.hop = std::llround(kHopSeconds * sample_rate_hz);
  if (block_length < grid.window_length) {
    throw InvalidArgument("block of " + std::to_string(block_length) +
                          " samples is shorter than one 500 ms window");
  }
  for (Eigen::Index o = 0; o + grid.window_length <= block_length; o += grid.hop) {
    grid.offsets.push_back(o);
  }
  return grid;
}

WindowScore continuous_window(const WaveformWindow& minute) {
  const WindowGrid grid = candidate_grid(minute.size(), minute.sample_rate_hz());
  const Eigen::Index length = grid.window_length;

  std::vector<Series> normalised(kChannelCount);
  std::vector<bool> usable(kChannelCount, false);
  for (Channel c : kAllChannels) {
    const Eigen::VectorXd x = minute.channel(c).transpose();
    const Decomposition d = decompose_additive(x, minute.samples_per_cycle());
    const double mu = d.trend.mean();
    const double sigma = std::sqrt((d.trend.array() - mu).square().mean());
    const double scale = window_rms(x) + 1e-12;
    if (!(sigma > kFlatTrendRatio * scale)) continue;
    normalised[static_cast<std::size_t>(index_of(c))] = (d.trend.array() - mu) / sigma;
    usable[static_cast<std::size_t>(index_of(c))] = true;
  }

  Best best;
  for (Eigen::Index o : grid.offsets) {
    for (int c = 0; c < kChannelCount; ++c) {
      if (!usable[static_cast<std::size_t>(c)]) continue;
      const auto seg = normalised[static_cast<std::size_t>(c)].segment(o, length);
      best.offer(std::sqrt(seg.squaredNorm() / static_cast<double>(length)), o, c);
    }
  }

  WindowScore out;
  out.kind = WindowKind::continuous;
  if (!best.found) {
    out.degenerate = true;
    return out;
  }
  out.offset = best.offset;
  out.channel = static_cast<Channel>(best.channel);
  out.score = best.score;
  return out;
}

WindowScore transient_window(const WaveformWindow& minute) {
  const WindowGrid grid = candidate_grid(minute.size(), minute.sample_rate_hz());
  const Eigen::Index length = grid.window_length;

  std::vector<bool> usable(kChannelCount, false);
  for (int c = 0; c < kChannelCount; ++c) {
    usable[static_cast<std::size_t>(c)] = minute.samples().row(c).cwiseAbs().maxCoeff() > 0.0;
  }

  Best best;
  for (Eigen::Index o : grid.offsets) {
    for (int c = 0; c < kChannelCount; ++c) {
      if (!usable[static_cast<std::size_t>(c)]) continue;
      const auto seg = minute.samples().row(c).segment(o, length);
      const double rms = std::sqrt(seg.squaredNorm() / static_cast<double>(length));
      if (!(rms > 0.0)) continue;
      best.offer(seg.cwiseAbs().maxCoeff() / rms, o, c);
    }
  }

  WindowScore out;
  out.kind = WindowKind::transient;
  if (!best.found) {
    out.degenerate = true;
    return out;
  }
  out.offset = best.offset;
  out.channel = static_cast<Channel>(best.channel);
  out.score = best.score;
  // Crest factor 1 means |X| is constant everywhere: nothing transient.
  out.degenerate = best.score <= 1.0 + 1e-12;
  return out;
}

MinuteSelection select_minute_windows(const WaveformWindow& minute) {
  const WindowScore cont = continuous_window(minute);
  const WindowScore trans = transient_window(minute);
  const Eigen::Index length = std::llround(kStandardWindowSeconds * minute.sample_rate_hz());
  return {cont, trans, minute.slice(cont.offset, length), minute.slice(trans.offset, length)};
}

}  // namespace fpsel
