#include "fpsel/signal/io.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <fstream>
#include "json.hpp"

#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"

namespace fpsel {
namespace {

using json = nlohmann::json;

struct ColumnMap {
  int time = -1;
  std::array<int, kChannelCount> channel{-1, -1, -1, -1, -1, -1, -1, -1};
};

ColumnMap map_columns(const std::vector<std::string>& header, bool allow_derived,
                      std::size_t first_data_column) {
  ColumnMap map;
  int previous_channel = -1;
  for (std::size_t i = first_data_column; i < header.size(); ++i) {
    if (header[i] == "t") {
      map.time = static_cast<int>(i);
      continue;
    }
    const auto ch = channel_from_name(header[i]);
    if (!ch) throw LoadError("unknown column", 1, header[i]);
    if (index_of(*ch) <= previous_channel) {
      throw LoadError("channel columns out of order", 1, header[i]);
    }
    previous_channel = index_of(*ch);
    map.channel[static_cast<std::size_t>(index_of(*ch))] = static_cast<int>(i);
  }
  if (map.time < 0) throw LoadError("missing time column", 1, "t");
  for (Channel c : kAllChannels) {
    if (map.channel[static_cast<std::size_t>(index_of(c))] >= 0) continue;
    const bool derivable = c == Channel::v0 || c == Channel::i0;
    if (!(derivable && allow_derived)) {
      throw LoadError("missing channel column", 1, std::string(channel_name(c)));
    }
  }
  return map;
}

void fill_derived(Samples& block, const ColumnMap& map) {
  const auto fill = [&](Channel zero, Channel a, Channel b, Channel c) {
    if (map.channel[static_cast<std::size_t>(index_of(zero))] >= 0) return;
    block.row(index_of(zero)) =
        derive_zero_sequence(block.row(index_of(a)).transpose(), block.row(index_of(b)).transpose(),
                             block.row(index_of(c)).transpose())
            .transpose();
  };
  fill(Channel::v0, Channel::va, Channel::vb, Channel::vc);
  fill(Channel::i0, Channel::ia, Channel::ib, Channel::ic);
}

}  // namespace

WaveformManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
  WaveformManifest m;
  if (!j.contains("sample_rate_hz")) throw DataError("manifest lacks sample_rate_hz");
  m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  m.fundamental_hz = j.value("fundamental_hz", kDefaultFundamentalHz);
  m.station = j.value("station", std::string{});
  if (j.contains("start_time_iso8601") && !j.at("start_time_iso8601").is_null()) {
    m.start_time = parse_iso8601(j.at("start_time_iso8601").get<std::string>());
  }
  m.derive_zero_sequence = j.value("derive_zero_sequence", false);
  m.window_seconds = j.value("window_seconds", kStandardWindowSeconds);
  if (j.contains("sample_count")) m.sample_count = j.at("sample_count").get<std::size_t>();
  return m;
}

void write_manifest(const std::filesystem::path& path, const WaveformManifest& m) {
  json j;
  j["sample_rate_hz"] = m.sample_rate_hz;
  j["fundamental_hz"] = m.fundamental_hz;
  j["station"] = m.station;
  j["start_time_iso8601"] = m.start_time ? json(format_iso8601(*m.start_time)) : json(nullptr);
  j["derive_zero_sequence"] = m.derive_zero_sequence;
  j["window_seconds"] = m.window_seconds;
  if (m.sample_count) j["sample_count"] = *m.sample_count;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<WaveformWindow> load_waveform(std::istream& csv, const WaveformManifest& manifest) {
  const int per_cycle = samples_per_cycle(manifest.sample_rate_hz, manifest.fundamental_hz);
  const long long window_length = std::llround(manifest.window_seconds * manifest.sample_rate_hz);
  if (window_length <= 0 || window_length % per_cycle != 0) {
    throw DataError("window of " + std::to_string(manifest.window_seconds) +
                    " s is not a whole number of cycles");
  }

  csv::Reader reader(csv);
  const auto header = reader.header();
  const ColumnMap map = map_columns(header, manifest.derive_zero_sequence, 0);

  std::vector<double> times;
  std::vector<std::array<double, kChannelCount>> rows;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) {
      throw LoadError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      reader.row(), "");
    }
    const double t = csv::parse_double(fields[static_cast<std::size_t>(map.time)], reader.row(), "t");
    if (!times.empty() && !(t > times.back())) {
      throw LoadError("non-monotonic timestamp", reader.row(), "t");
    }
    times.push_back(t);
    std::array<double, kChannelCount> row{};
    for (Channel c : kAllChannels) {
      const int col = map.channel[static_cast<std::size_t>(index_of(c))];
      if (col < 0) continue;
      row[static_cast<std::size_t>(index_of(c))] = csv::parse_double(
          fields[static_cast<std::size_t>(col)], reader.row(), header[static_cast<std::size_t>(col)]);
    }
    rows.push_back(row);
  }

  if (manifest.sample_count && *manifest.sample_count != rows.size()) {
    throw LoadError("manifest declares " + std::to_string(*manifest.sample_count) +
                        " samples but file holds " + std::to_string(rows.size()),
                    reader.row(), "");
  }
  if (rows.empty() || rows.size() % static_cast<std::size_t>(window_length) != 0) {
    throw LoadError("sample count " + std::to_string(rows.size()) +
                        " is not a positive multiple of the window length " +
                        std::to_string(window_length),
                    reader.row(), "");
  }

  std::vector<WaveformWindow> windows;
  const std::size_t count = rows.size() / static_cast<std::size_t>(window_length);
  windows.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    Samples block(kChannelCount, window_length);
    const std::size_t first = w * static_cast<std::size_t>(window_length);
    for (long long s = 0; s < window_length; ++s) {
      const auto& row = rows[first + static_cast<std::size_t>(s)];
      for (int c = 0; c < kChannelCount; ++c) block(c, s) = row[static_cast<std::size_t>(c)];
    }
    fill_derived(block, map);
    std::optional<TimePoint> start;
    if (manifest.start_time) start = add_seconds(*manifest.start_time, times[first]);
    windows.emplace_back(std::move(block), manifest.sample_rate_hz, manifest.fundamental_hz, start);
  }
  return windows;
}

std::vector<WaveformWindow> load_waveform(const std::filesystem::path& csv_path,
                                          const std::filesystem::path& manifest_path) {
  const WaveformManifest manifest = read_manifest(manifest_path);
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open " + csv_path.string());
  return load_waveform(in, manifest);
}

void write_waveform_csv(std::ostream& out, std::span<const WaveformWindow> windows,
                        std::optional<TimePoint> origin) {
  out << "t,va,vb,vc,v0,ia,ib,ic,i0\n";
  if (!origin && !windows.empty() && windows.front().start_time()) {
    origin = windows.front().start_time();
  }
  double running = 0.0;
  for (const auto& w : windows) {
    double base = running;
    if (origin && w.start_time()) {
      base = std::chrono::duration<double>(*w.start_time() - *origin).count();
    }
    std::string line;
    for (Eigen::Index s = 0; s < w.size(); ++s) {
      line = csv::format_double(base + static_cast<double>(s) / w.sample_rate_hz());
      for (int c = 0; c < kChannelCount; ++c) {
        line.push_back(',');
        line += csv::format_double(w.samples()(c, s));
      }
      line.push_back('\n');
      out << line;
    }
    running = base + w.duration_s();
  }
}

void write_window_shard(std::ostream& out, std::span<const WaveformWindow> windows,
                        std::span<const long long> ids) {
  if (ids.size() != windows.size()) throw InvalidArgument("shard: ids and windows differ in count");
  out << "window,t,va,vb,vc,v0,ia,ib,ic,i0\n";
  std::string line;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& win = windows[w];
    const std::string id = std::to_string(ids[w]);
    for (Eigen::Index s = 0; s < win.size(); ++s) {
      line = id;
      line.push_back(',');
      line += csv::format_double(static_cast<double>(s) / win.sample_rate_hz());
      for (int c = 0; c < kChannelCount; ++c) {
        line.push_back(',');
        line += csv::format_double(win.samples()(c, s));
      }
      line.push_back('\n');
      out << line;
    }
  }
}

std::vector<ShardEntry> read_window_shard(std::istream& in, double sample_rate_hz,
                                          double fundamental_hz) {
  csv::Reader reader(in);
  const auto header = reader.header();
  if (header.empty() || header[0] != "window") throw LoadError("missing window column", 1, "window");
  const ColumnMap map = map_columns(header, false, 1);

  std::vector<ShardEntry> out;
  std::vector<std::array<double, kChannelCount>> rows;
  long long current = 0;
  bool open = false;
  const auto flush = [&] {
    if (!open) return;
    Samples block(kChannelCount, static_cast<Eigen::Index>(rows.size()));
    for (std::size_t s = 0; s < rows.size(); ++s) {
      for (int c = 0; c < kChannelCount; ++c) {
        block(c, static_cast<Eigen::Index>(s)) = rows[s][static_cast<std::size_t>(c)];
      }
    }
    out.push_back({current, WaveformWindow(std::move(block), sample_rate_hz, fundamental_hz)});
    rows.clear();
  };
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) {
      throw LoadError("field count mismatch", reader.row(), "");
    }
    const long long id = csv::parse_int(fields[0], reader.row(), "window");
    if (!open || id != current) {
      flush();
      current = id;
      open = true;
    }
    std::array<double, kChannelCount> row{};
    for (Channel c : kAllChannels) {
      const int col = map.channel[static_cast<std::size_t>(index_of(c))];
      row[static_cast<std::size_t>(index_of(c))] = csv::parse_double(
          fields[static_cast<std::size_t>(col)], reader.row(), header[static_cast<std::size_t>(col)]);
    }
    rows.push_back(row);
  }
  flush();
  return out;
}

}  // namespace fpsel

namespace fpsel {

namespace {

constexpr char kBinaryMagic[8] = {'F', 'P', 'S', 'E', 'L', 'W', 'I', 'N'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw DataError("window shard: truncated input");
  return value;
}

}  // namespace

WindowShardWriter::WindowShardWriter(std::ostream& out, std::uint64_t count) : out_(out), count_(count) {
  out_.write(kBinaryMagic, sizeof kBinaryMagic);
  put<std::uint32_t>(out_, 1);
  put<std::uint64_t>(out_, count_);
}

void WindowShardWriter::add(long long id, const WaveformWindow& win) {
  if (written_ == count_) throw InvalidArgument("window shard: more windows than announced");
  put<std::int64_t>(out_, id);
  put<std::uint8_t>(out_, win.start_time() ? 1 : 0);
  put<std::int64_t>(out_, win.start_time() ? win.start_time()->time_since_epoch().count() : 0);
  put<double>(out_, win.sample_rate_hz());
  put<double>(out_, win.fundamental_hz());
  put<std::uint64_t>(out_, static_cast<std::uint64_t>(win.size()));
  out_.write(reinterpret_cast<const char*>(win.samples().data()),
             static_cast<std::streamsize>(sizeof(double) * kChannelCount * static_cast<std::size_t>(win.size())));
  if (!out_) throw DataError("window shard: write failed");
  ++written_;
}

void WindowShardWriter::finish() {
  if (written_ != count_) throw InvalidArgument("window shard: fewer windows than announced");
  out_.flush();
}

WindowShardReader::WindowShardReader(std::istream& in) : in_(in) {
  char magic[sizeof kBinaryMagic];
  if (!in_.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kBinaryMagic)) {
    throw DataError("window shard: not a binary window file");
  }
  if (take<std::uint32_t>(in_) != 1) throw DataError("window shard: unsupported version");
  count_ = take<std::uint64_t>(in_);
}

std::optional<ShardEntry> WindowShardReader::next() {
  if (read_ == count_) return std::nullopt;
  const auto id = take<std::int64_t>(in_);
  const bool has_start = take<std::uint8_t>(in_) != 0;
  const auto start_ms = take<std::int64_t>(in_);
  const auto rate = take<double>(in_);
  const auto fundamental = take<double>(in_);
  const auto n = take<std::uint64_t>(in_);
  if (n == 0 || n > (1ull << 32)) throw DataError("window shard: implausible window length");
  Samples block(kChannelCount, static_cast<Eigen::Index>(n));
  if (!in_.read(reinterpret_cast<char*>(block.data()),
                static_cast<std::streamsize>(sizeof(double) * kChannelCount * n))) {
    throw DataError("window shard: truncated input");
  }
  std::optional<TimePoint> start;
  if (has_start) start = TimePoint{Milliseconds{start_ms}};
  ++read_;
  try {
    return ShardEntry{id, WaveformWindow(std::move(block), rate, fundamental, start)};
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("window shard: ") + e.what());
  }
}

void write_window_binary(std::ostream& out, std::span<const WaveformWindow> windows,
                         std::span<const long long> ids) {
  if (ids.size() != windows.size()) throw InvalidArgument("write_window_binary: one id per window required");
  WindowShardWriter writer(out, windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) writer.add(ids[w], windows[w]);
  writer.finish();
}

std::vector<ShardEntry> read_window_binary(std::istream& in) {
  WindowShardReader reader(in);
  std::vector<ShardEntry> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

}  // namespace fpsel
