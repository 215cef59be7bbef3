#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "fpsel/common/time.hpp"

namespace fpsel {

inline constexpr int kChannelCount = 8;

/// Measurement channels in recording order: three phase voltages, the
/// zero-sequence voltage, three phase currents, the zero-sequence current.
enum class Channel : int { va = 0, vb, vc, v0, ia, ib, ic, i0 };

inline constexpr std::array<Channel, kChannelCount> kAllChannels{
    Channel::va, Channel::vb, Channel::vc, Channel::v0,
    Channel::ia, Channel::ib, Channel::ic, Channel::i0};

constexpr int index_of(Channel c) { return static_cast<int>(c); }
std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);

template <typename Scalar>
using SampleBlock = Eigen::Matrix<Scalar, kChannelCount, Eigen::Dynamic, Eigen::RowMajor>;
using Samples = SampleBlock<double>;

template <typename Scalar>
using SeriesOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Series = SeriesOf<double>;

inline constexpr double kStandardWindowSeconds = 0.5;
inline constexpr double kDefaultFundamentalHz = 50.0;

/// Fixed-rate block of the eight channels (volts for va..v0, amperes for
/// ia..i0). The block length must be a whole number of fundamental cycles,
/// and the sample rate a whole multiple of the fundamental. Immutable.
class WaveformWindow {
 public:
  WaveformWindow(Samples samples, double sample_rate_hz,
                 double fundamental_hz = kDefaultFundamentalHz,
                 std::optional<TimePoint> start_time = std::nullopt);

  const Samples& samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double fundamental_hz() const { return fundamental_hz_; }
  const std::optional<TimePoint>& start_time() const { return start_time_; }

  Eigen::Index size() const { return samples_.cols(); }
  int samples_per_cycle() const { return samples_per_cycle_; }
  int cycle_count() const { return static_cast<int>(size() / samples_per_cycle_); }
  double duration_s() const { return static_cast<double>(size()) / sample_rate_hz_; }
  /// True for the 500 ms unit of feature extraction.
  bool is_standard() const;

  /// Contiguous samples of one channel.
  auto channel(Channel c) const { return samples_.row(index_of(c)); }

  /// Sub-block [offset, offset + length); the start time is advanced
  /// accordingly. `length` must be a whole number of cycles.
  WaveformWindow slice(Eigen::Index offset, Eigen::Index length) const;

 private:
  Samples samples_;
  double sample_rate_hz_;
  double fundamental_hz_;
  std::optional<TimePoint> start_time_;
  int samples_per_cycle_;
};

/// Joins consecutive blocks with identical rates; the start time is taken
/// from the first block.
WaveformWindow concatenate(std::span<const WaveformWindow> parts);

/// Samples per fundamental cycle; throws InvalidArgument when the ratio is
/// not a positive integer.
int samples_per_cycle(double sample_rate_hz, double fundamental_hz);

/// One fundamental period of a window.
class CycleFrame {
 public:
  CycleFrame(const WaveformWindow& window, int cycle_index);

  const WaveformWindow& window() const { return *window_; }
  int cycle_index() const { return cycle_index_; }
  int size() const { return window_->samples_per_cycle(); }

  auto samples(Channel c) const {
    return window_->channel(c).segment(
        static_cast<Eigen::Index>(cycle_index_) * window_->samples_per_cycle(),
        window_->samples_per_cycle());
  }

 private:
  const WaveformWindow* window_;
  int cycle_index_;
};

/// Zero-sequence fallback: mean of the three phase series.
Series derive_zero_sequence(const Eigen::Ref<const Eigen::VectorXd>& a,
                            const Eigen::Ref<const Eigen::VectorXd>& b,
                            const Eigen::Ref<const Eigen::VectorXd>& c);

}  // namespace fpsel
