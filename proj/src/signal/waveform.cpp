#include "fpsel/signal/waveform.hpp"

#include <cmath>
#include <string>

#include "fpsel/common/error.hpp"
#include "fpsel/signal/phasor.hpp"

namespace fpsel {
namespace {

constexpr std::array<std::string_view, kChannelCount> kNames{"va", "vb", "vc", "v0",
                                                             "ia", "ib", "ic", "i0"};

}  // namespace

std::string_view channel_name(Channel c) { return kNames[static_cast<std::size_t>(index_of(c))]; }

std::optional<Channel> channel_from_name(std::string_view name) {
  for (int i = 0; i < kChannelCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

int samples_per_cycle(double sample_rate_hz, double fundamental_hz) {
  if (!(sample_rate_hz > 0.0) || !(fundamental_hz > 0.0)) {
    throw InvalidArgument("sample rate and fundamental must be positive");
  }
  const double ratio = sample_rate_hz / fundamental_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw InvalidArgument("sample rate " + std::to_string(sample_rate_hz) +
                          " Hz is not an integer multiple of " +
                          std::to_string(fundamental_hz) + " Hz");
  }
  return static_cast<int>(rounded);
}

WaveformWindow::WaveformWindow(Samples samples, double sample_rate_hz, double fundamental_hz,
                               std::optional<TimePoint> start_time)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      fundamental_hz_(fundamental_hz),
      start_time_(start_time),
      samples_per_cycle_(fpsel::samples_per_cycle(sample_rate_hz, fundamental_hz)) {
  if (samples_.cols() == 0 || samples_.cols() % samples_per_cycle_ != 0) {
    throw InvalidArgument("window length " + std::to_string(samples_.cols()) +
                          " is not a positive multiple of " +
                          std::to_string(samples_per_cycle_) + " samples per cycle");
  }
  if (!samples_.allFinite()) throw InvalidArgument("window contains non-finite samples");
}

bool WaveformWindow::is_standard() const {
  return std::llround(sample_rate_hz_ * kStandardWindowSeconds) == size();
}

WaveformWindow WaveformWindow::slice(Eigen::Index offset, Eigen::Index length) const {
  if (offset < 0 || length <= 0 || offset + length > size()) {
    throw InvalidArgument("slice [" + std::to_string(offset) + ", +" + std::to_string(length) +
                          ") outside window of " + std::to_string(size()) + " samples");
  }
  std::optional<TimePoint> start;
  if (start_time_) start = add_seconds(*start_time_, static_cast<double>(offset) / sample_rate_hz_);
  return WaveformWindow(samples_.middleCols(offset, length), sample_rate_hz_, fundamental_hz_,
                        start);
}

WaveformWindow concatenate(std::span<const WaveformWindow> parts) {
  if (parts.empty()) throw InvalidArgument("concatenate: no parts");
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.sample_rate_hz() != parts.front().sample_rate_hz() ||
        p.fundamental_hz() != parts.front().fundamental_hz()) {
      throw InvalidArgument("concatenate: mismatched rates");
    }
    total += p.size();
  }
  Samples joined(kChannelCount, total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    joined.middleCols(at, p.size()) = p.samples();
    at += p.size();
  }
  return WaveformWindow(std::move(joined), parts.front().sample_rate_hz(),
                        parts.front().fundamental_hz(), parts.front().start_time());
}

CycleFrame::CycleFrame(const WaveformWindow& window, int cycle_index)
    : window_(&window), cycle_index_(cycle_index) {
  if (cycle_index < 0 || cycle_index >= window.cycle_count()) {
    throw InvalidArgument("cycle index " + std::to_string(cycle_index) + " out of range");
  }
}

Series derive_zero_sequence(const Eigen::Ref<const Eigen::VectorXd>& a,
                            const Eigen::Ref<const Eigen::VectorXd>& b,
                            const Eigen::Ref<const Eigen::VectorXd>& c) {
  if (a.size() != b.size() || a.size() != c.size()) {
    throw InvalidArgument("derive_zero_sequence: phase series differ in length");
  }
  return (a + b + c) / 3.0;
}

Phasor fundamental_phasor(const CycleFrame& frame, Channel channel) {
  return cycle_phasor(frame.samples(channel), 1);
}

}  // namespace fpsel
