// synth, windows, extract, registry

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/features/extract.hpp"
#include "fpsel/fp/evaluate.hpp"
#include "fpsel/learn/dataset.hpp"
#include "fpsel/signal/io.hpp"
#include "fpsel/synth/generate.hpp"
#include "fpsel/window/select.hpp"

namespace fpsel::cli {

namespace {

constexpr std::size_t kChunk = 256;

synth::SynthConfig synth_config(const RunConfig& c) {
  synth::SynthConfig s;
  s.sample_rate_hz = c.sample_rate_hz;
  s.fundamental_hz = c.fundamental_hz;
  return s;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

void synth_events(const RunConfig& c, const fs::path& dir) {
  fs::create_directories(dir);
  const auto data = synth::gen_surrogate_dataset(c.per_class, c.seed, synth_config(c), c.threads);
  const fs::path windows = dir / "windows.fpw", labels = dir / "labels.csv";
  {
    std::vector<long long> ids(data.windows.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<long long>(i);
    auto out = open_out(windows);
    write_window_binary(out, data.windows, ids);
  }
  {
    auto out = open_out(labels);
    csv::write_row(out, {"window", "label", "class"});
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      csv::write_row(out, {std::to_string(i), std::to_string(data.labels[i]), synth::class_name(data.labels[i])});
    }
  }
  write_manifests("synth events", c, {}, {windows, labels}, {{"kind", "surrogate"}, {"classes", synth::kClassCount}});
  std::cout << data.windows.size() << " windows written to " << dir.string() << "\n";
}

void synth_recording(const RunConfig& c, const fs::path& dir, bool schedule_only) {
  fs::create_directories(dir);
  synth::RecordingConfig rc;
  rc.days = c.days;
  rc.faults = c.faults;
  rc.seed = c.seed;
  rc.station_seed = c.station_seed;
  rc.station = c.station;
  rc.start = parse_iso8601(c.start);
  rc.windows_per_hour = c.windows_per_hour;
  rc.precursor_peak_rate = c.precursor_peak_rate;
  rc.benign_rate = c.benign_rate;
  rc.decoy_share = c.decoy_share;
  rc.synth = synth_config(c);
  const auto rec = synth::gen_fp_recording(rc);

  const fs::path schedule = dir / "schedule.csv", faults = dir / "faults.csv", windows = dir / "windows.fpw";
  {
    auto out = open_out(schedule);
    csv::write_row(out, {"window", "start_time", "kind", "event"});
    for (std::size_t j = 0; j < rec.size(); ++j) {
      const auto kind = rec.kind(j);
      const char* name = kind == synth::WindowKind::quiet ? "quiet" : kind == synth::WindowKind::benign ? "benign" : "precursor";
      csv::write_row(out, {std::to_string(j), format_iso8601(rec.window_time(j)), name,
                           kind == synth::WindowKind::quiet ? "" : synth::class_name(rec.event(j).label())});
    }
  }
  {
    auto out = open_out(faults);
    fp::write_fault_log(out, {{rc.station, rec.faults()}});
  }
  std::vector<fs::path> outputs{schedule, faults};
  if (!schedule_only) {
    auto out = open_out(windows);
    WindowShardWriter writer(out, rec.size());
    for (std::size_t begin = 0; begin < rec.size(); begin += kChunk) {
      const std::size_t count = std::min(kChunk, rec.size() - begin);
      std::vector<std::unique_ptr<WaveformWindow>> slots(count);
      parallel_for(count, c.threads, [&](std::size_t i) {
        slots[i] = std::make_unique<WaveformWindow>(rec.window(begin + i));
      });
      for (std::size_t i = 0; i < count; ++i) writer.add(static_cast<long long>(begin + i), *slots[i]);
    }
    writer.finish();
    out.close();
    outputs.push_back(windows);
  }
  write_manifests("synth recording", c, {}, outputs,
                  {{"kind", "recording"}, {"station", rc.station}, {"windows_per_hour", rc.windows_per_hour}});
  std::cout << rec.size() << " windows, " << rec.faults().size() << " faults written to " << dir.string() << "\n";
}

json score_json(const WindowScore& s, const WaveformWindow& w) {
  return {{"offset", s.offset},
          {"start_time", w.start_time() ? json(format_iso8601(*w.start_time())) : json(nullptr)},
          {"channel", std::string(channel_name(s.channel))},
          {"score", s.score},
          {"degenerate", s.degenerate}};
}

void select_windows(const RunConfig& c, const fs::path& csv_path, const fs::path& manifest, const fs::path& out_path,
                    const fs::path& index_path) {
  require_file(csv_path);
  require_file(manifest);
  const auto minutes = load_waveform(csv_path, manifest);
  std::vector<std::unique_ptr<MinuteSelection>> picks(minutes.size());
  parallel_for(minutes.size(), c.threads, [&](std::size_t m) {
    picks[m] = std::make_unique<MinuteSelection>(select_minute_windows(minutes[m]));
  });
  auto out = open_out(out_path);
  WindowShardWriter writer(out, 2 * minutes.size());
  for (std::size_t m = 0; m < minutes.size(); ++m) {
    writer.add(static_cast<long long>(2 * m), picks[m]->continuous_window);
    writer.add(static_cast<long long>(2 * m + 1), picks[m]->transient_window);
  }
  writer.finish();
  out.close();
  json index = json::array();
  for (std::size_t m = 0; m < minutes.size(); ++m) {
    const auto& start = minutes[m].start_time();
    index.push_back({{"minute", m},
                     {"start_time", start ? json(format_iso8601(*start)) : json(nullptr)},
                     {"continuous", score_json(picks[m]->continuous, picks[m]->continuous_window)},
                     {"transient", score_json(picks[m]->transient, picks[m]->transient_window)}});
  }
  write_text(index_path, index.dump(1) + "\n");
  const auto wm = read_manifest(manifest);
  json meta{{"kind", "selected"}, {"windows_per_hour", 120}};
  if (!wm.station.empty()) meta["station"] = wm.station;
  write_manifests("windows", c, {csv_path, manifest}, {out_path, index_path}, meta);
  std::cout << 2 * minutes.size() << " windows from " << minutes.size() << " minutes\n";
}

void extract(const RunConfig& c, const fs::path& in_path, const fs::path& out_path) {
  require_file(in_path);
  std::ifstream in(in_path, std::ios::binary);
  WindowShardReader reader(in);
  FeatureTable t;
  t.names = default_registry().names();
  t.x.resize(static_cast<Eigen::Index>(reader.count()), static_cast<Eigen::Index>(t.names.size()));
  Eigen::Index row = 0;
  while (true) {
    std::vector<WaveformWindow> chunk;
    while (chunk.size() < kChunk) {
      auto e = reader.next();
      if (!e) break;
      t.ids.push_back(e->id);
      t.times.push_back(e->window.start_time());
      chunk.push_back(std::move(e->window));
    }
    if (chunk.empty()) break;
    const auto vectors = extract_batch(chunk, c.threads);
    for (const auto& v : vectors) t.x.row(row++) = v.values.transpose();
  }
  write_feature_table(out_path, t);
  json meta = read_meta(in_path);
  meta["registry_hash"] = default_registry().hash();
  write_manifests("extract", c, {in_path}, {out_path}, meta);
  std::cout << t.x.rows() << " x " << t.x.cols() << " features\n";
}

// Time split of one station's feature table: rows before the cut train,
// the rest test. The cut is the hour boundary nearest to `fraction`.
void split_features(const RunConfig& c, const fs::path& in_path, double fraction, const fs::path& train_out,
                    const fs::path& test_out) {
  const FeatureTable t = read_feature_table(in_path);
  if (t.ids.empty()) throw DataError(in_path.string() + ": no rows");
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    if (!t.times[i]) throw DataError(in_path.string() + ": window " + std::to_string(t.ids[i]) + " has no start time");
    if (i > 0 && *t.times[i] < *t.times[i - 1]) throw DataError(in_path.string() + ": rows are not in time order");
  }
  const TimePoint first = floor_hour(*t.times.front());
  const double span_h = hours_between(first, *t.times.back()) + 1.0;
  const TimePoint cut = add_seconds(first, 3600.0 * std::round(fraction * span_h));
  std::vector<std::size_t> before, after;
  for (std::size_t i = 0; i < t.times.size(); ++i) (*t.times[i] < cut ? before : after).push_back(i);
  auto part = [&](const std::vector<std::size_t>& rows) {
    FeatureTable p;
    p.names = t.names;
    p.x = select_rows(t.x, rows);
    for (auto r : rows) {
      p.ids.push_back(t.ids[r]);
      p.times.push_back(t.times[r]);
    }
    return p;
  };
  write_feature_table(train_out, part(before));
  write_feature_table(test_out, part(after));
  json meta = read_meta(in_path);
  meta["split_time"] = format_iso8601(cut);
  write_manifests("split", c, {in_path}, {train_out, test_out}, meta);
  std::cout << before.size() << " training rows, " << after.size() << " test rows (cut at " << format_iso8601(cut)
            << ")\n";
}

void dump_registry(const RunConfig& c, const fs::path& out_path) {
  auto out = open_out(out_path);
  csv::write_row(out, {"index", "name", "family", "variant", "channel", "aggregation"});
  const auto& reg = default_registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const auto& id = reg[i];
    csv::write_row(out, {std::to_string(i), reg.names()[i], std::string(to_string(id.family)), id.variant, id.channel,
                         std::string(to_string(id.aggregation))});
  }
  out.close();
  write_manifests("registry", c, {}, {out_path}, {{"registry_hash", reg.hash()}});
  std::cout << reg.size() << " features, hash " << reg.hash() << "\n";
}

}  // namespace

void add_data_commands(CLI::App& app, RunConfig& c) {
  auto* synth = app.add_subcommand("synth", "Generate synthetic data");
  synth->require_subcommand(1);

  static fs::path events_out;
  auto* events = synth->add_subcommand("events", "Labelled transient-event windows (34 classes)");
  events->add_option("--per-class", c.per_class, "Windows per class")->check(CLI::PositiveNumber);
  events->add_option("--seed", c.seed, "Master seed");
  events->add_option("--sample-rate", c.sample_rate_hz, "Output sample rate in Hz");
  events->add_option("--out", events_out, "Output directory")->required();
  events->callback([&c] { synth_events(c, resolve(events_out)); });

  static fs::path rec_out;
  static bool schedule_only = false;
  auto* rec = synth->add_subcommand("recording", "Multi-day recording with planted faults");
  rec->add_option("--days", c.days, "Recording length in days")->check(CLI::PositiveNumber);
  rec->add_option("--faults", c.faults, "Number of faults")->check(CLI::NonNegativeNumber);
  rec->add_option("--seed", c.seed, "Master seed");
  rec->add_option("--station-seed", c.station_seed, "Seed of the station network (defaults to --seed)");
  rec->add_option("--station", c.station, "Station name");
  rec->add_option("--start", c.start, "First window time (ISO 8601, UTC)");
  rec->add_option("--windows-per-hour", c.windows_per_hour, "Recorded windows per hour")->check(CLI::PositiveNumber);
  rec->add_option("--precursor-peak-rate", c.precursor_peak_rate, "Per-window precursor probability just before a fault")
      ->check(CLI::Range(0.0, 1.0));
  rec->add_option("--benign-rate", c.benign_rate, "Per-window probability of a benign event")->check(CLI::Range(0.0, 1.0));
  rec->add_option("--decoy-share", c.decoy_share, "Share of benign events that are arcs on a neighbouring feeder")
      ->check(CLI::Range(0.0, 1.0));
  rec->add_option("--sample-rate", c.sample_rate_hz, "Output sample rate in Hz");
  rec->add_flag("--schedule-only", schedule_only, "Write schedule and fault log but no waveforms");
  rec->add_option("--out", rec_out, "Output directory")->required();
  rec->callback([&c] { synth_recording(c, resolve(rec_out), schedule_only); });

  static fs::path win_csv, win_manifest, win_out, win_index;
  auto* windows = app.add_subcommand("windows", "Pick continuous and transient windows from minute recordings");
  windows->add_option("--csv", win_csv, "Waveform CSV (t,va,vb,vc,v0,ia,ib,ic,i0)")->required();
  windows->add_option("--manifest", win_manifest, "Waveform manifest JSON (window_seconds = 60)")->required();
  windows->add_option("--out", win_out, "Output window shard (.fpw)")->required();
  windows->add_option("--index", win_index, "Output index JSON (default: <out>.index.json)");
  windows->callback([&c] {
    const fs::path out = resolve(win_out);
    select_windows(c, resolve(win_csv), resolve(win_manifest), out,
                   win_index.empty() ? fs::path(out.string() + ".index.json") : resolve(win_index));
  });

  static fs::path ex_in, ex_out;
  auto* ex = app.add_subcommand("extract", "Compute the 1556-feature vector of every window");
  ex->add_option("--windows", ex_in, "Window shard (.fpw)")->required();
  ex->add_option("--out", ex_out, "Output feature CSV")->required();
  ex->callback([&c] { extract(c, resolve(ex_in), resolve(ex_out)); });

  static fs::path sp_in, sp_train, sp_test;
  static double sp_fraction = 0.5;
  auto* sp = app.add_subcommand("split", "Split one station's feature table in time into training and test parts");
  sp->add_option("--features", sp_in, "Feature CSV")->required();
  sp->add_option("--fraction", sp_fraction, "Share of the time span used for training")->check(CLI::Range(0.0, 1.0));
  sp->add_option("--train-out", sp_train, "Output training feature CSV")->required();
  sp->add_option("--test-out", sp_test, "Output test feature CSV")->required();
  sp->callback([&c] { split_features(c, resolve(sp_in), sp_fraction, resolve(sp_train), resolve(sp_test)); });

  static fs::path reg_out;
  auto* reg = app.add_subcommand("registry", "Write the feature registry");
  reg->add_option("--out", reg_out, "Output CSV")->required();
  reg->callback([&c] { dump_registry(c, resolve(reg_out)); });
}

}  // namespace fpsel::cli
