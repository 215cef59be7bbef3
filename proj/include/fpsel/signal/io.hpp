#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsel/signal/waveform.hpp"

namespace fpsel {

/// Sidecar JSON describing a waveform CSV.
struct WaveformManifest {
  double sample_rate_hz = 0.0;
  double fundamental_hz = kDefaultFundamentalHz;
  std::string station;
  std::optional<TimePoint> start_time;
  bool derive_zero_sequence = false;
  double window_seconds = kStandardWindowSeconds;
  /// Declared number of CSV rows, when the producer recorded it.
  std::optional<std::size_t> sample_count;
};

WaveformManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const WaveformManifest& manifest);

/// Reads `t,va,vb,vc,v0,ia,ib,ic,i0` rows and cuts them into consecutive
/// windows of `manifest.window_seconds`. Missing v0/i0 columns are derived
/// from the phases when the manifest allows it. Errors are LoadError values
/// naming the offending row/column.
std::vector<WaveformWindow> load_waveform(std::istream& csv, const WaveformManifest& manifest);
std::vector<WaveformWindow> load_waveform(const std::filesystem::path& csv,
                                          const std::filesystem::path& manifest);

/// Writes windows back to back with `t` in seconds relative to `origin`
/// (or to the first window's start when no origin is given).
void write_waveform_csv(std::ostream& out, std::span<const WaveformWindow> windows,
                        std::optional<TimePoint> origin = std::nullopt);

/// Multi-window shard: `window,t,va,...,i0`, `t` relative to each window.
void write_window_shard(std::ostream& out, std::span<const WaveformWindow> windows,
                        std::span<const long long> ids);
struct ShardEntry {
  long long id;
  WaveformWindow window;
};
std::vector<ShardEntry> read_window_shard(std::istream& in, double sample_rate_hz,
                                          double fundamental_hz = kDefaultFundamentalHz);

/// Lossless binary shard for generated windows (little-endian):
/// magic `FPSELWIN`, u32 version 1, u64 count, then per window i64 id,
/// u8 has_start, i64 start (ms since epoch), f64 sample rate, f64
/// fundamental, u64 samples and 8 x samples f64 values, channel-major.
void write_window_binary(std::ostream& out, std::span<const WaveformWindow> windows,
                         std::span<const long long> ids);
/// Throws DataError on a bad header or truncated input.
std::vector<ShardEntry> read_window_binary(std::istream& in);

/// Streaming writer for the binary shard; exactly `count` windows must be
/// added.
class WindowShardWriter {
 public:
  WindowShardWriter(std::ostream& out, std::uint64_t count);
  void add(long long id, const WaveformWindow& window);
  /// Throws InvalidArgument when fewer windows than announced were added.
  void finish();

 private:
  std::ostream& out_;
  std::uint64_t count_;
  std::uint64_t written_ = 0;
};

/// Streaming reader for the binary shard.
class WindowShardReader {
 public:
  explicit WindowShardReader(std::istream& in);
  std::uint64_t count() const { return count_; }
  /// Next window, or nullopt after the last one.
  std::optional<ShardEntry> next();

 private:
  std::istream& in_;
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
};

}  // namespace fpsel
