#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/common/hash.hpp"
#include "fpsel/features/registry.hpp"

namespace fpsel::cli {

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["station_seed"] = station_seed ? json(*station_seed) : json(nullptr);
  j["sample_rate_hz"] = sample_rate_hz;
  j["fundamental_hz"] = fundamental_hz;
  j["per_class"] = per_class;
  j["days"] = days;
  j["faults"] = faults;
  j["station"] = station;
  j["start"] = start;
  j["windows_per_hour"] = windows_per_hour;
  j["precursor_peak_rate"] = precursor_peak_rate;
  j["benign_rate"] = benign_rate;
  j["decoy_share"] = decoy_share;
  j["horizon_h"] = horizon_h;
  j["horizons"] = horizons;
  j["smooth_width"] = smooth_width;
  j["rfe_step"] = rfe_step;
  j["rfe_fraction"] = rfe_fraction;
  j["rfe_floor"] = rfe_floor;
  j["folds"] = folds;
  j["trees"] = trees;
  j["subsets"] = subsets;
  j["subset_min"] = subset_min;
  j["subset_max"] = subset_max;
  j["split"] = split;
  return j;
}

void RunConfig::merge_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") seed = v.get<std::uint64_t>();
      else if (key == "station_seed") station_seed = v.is_null() ? std::nullopt : std::optional(v.get<std::uint64_t>());
      else if (key == "sample_rate_hz") sample_rate_hz = v.get<double>();
      else if (key == "fundamental_hz") fundamental_hz = v.get<double>();
      else if (key == "per_class") per_class = v.get<int>();
      else if (key == "days") days = v.get<double>();
      else if (key == "faults") faults = v.get<int>();
      else if (key == "station") station = v.get<std::string>();
      else if (key == "start") start = v.get<std::string>();
      else if (key == "windows_per_hour") windows_per_hour = v.get<int>();
      else if (key == "precursor_peak_rate") precursor_peak_rate = v.get<double>();
      else if (key == "benign_rate") benign_rate = v.get<double>();
      else if (key == "decoy_share") decoy_share = v.get<double>();
      else if (key == "horizon_h") horizon_h = v.get<double>();
      else if (key == "horizons") horizons = v.get<std::vector<double>>();
      else if (key == "smooth_width") smooth_width = v.get<int>();
      else if (key == "rfe_step") rfe_step = v.get<int>();
      else if (key == "rfe_fraction") rfe_fraction = v.get<double>();
      else if (key == "rfe_floor") rfe_floor = v.get<int>();
      else if (key == "folds") folds = v.get<int>();
      else if (key == "trees") trees = v.get<int>();
      else if (key == "subsets") subsets = v.get<int>();
      else if (key == "subset_min") subset_min = v.get<int>();
      else if (key == "subset_max") subset_max = v.get<int>();
      else if (key == "split") split = v.get<std::string>();
      else if (key == "threads") threads = v.get<int>();
      else throw InvalidArgument("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

fs::path resolve(const fs::path& p) {
  const char* root = std::getenv("FPSEL_WORKDIR");
  if (root == nullptr || *root == '\0' || p.is_absolute()) return p;
  return fs::path(root) / p;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw DataError("missing input file: " + path.string());
}

std::string read_text(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

void write_manifests(const std::string& command, const RunConfig& config, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& outputs, const json& meta) {
  json base;
  base["format"] = "fpsel-manifest/1";
  base["command"] = command;
  base["run_config"] = config.to_json();
  base["inputs"] = json::array();
  for (const auto& p : inputs) {
    base["inputs"].push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
  }
  base["outputs"] = json::array();
  for (const auto& p : outputs) {
    base["outputs"].push_back({{"path", p.filename().generic_string()}, {"sha256", sha256_file(p)}});
  }
  base["meta"] = meta;
  for (const auto& p : outputs) {
    json m = base;
    m["file"] = p.filename().generic_string();
    write_text(fs::path(p.string() + ".manifest.json"), m.dump(2) + "\n");
  }
}

json read_meta(const fs::path& path) {
  const fs::path m(path.string() + ".manifest.json");
  if (!fs::is_regular_file(m)) return json::object();
  try {
    return json::parse(read_text(m)).value("meta", json::object());
  } catch (const json::exception& e) {
    throw DataError("manifest " + m.string() + ": " + e.what());
  }
}

void write_feature_table(const fs::path& path, const FeatureTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  std::vector<std::string> row{"window", "start_time"};
  row.insert(row.end(), t.names.begin(), t.names.end());
  csv::write_row(out, row);
  for (Eigen::Index r = 0; r < t.x.rows(); ++r) {
    row.assign(2 + static_cast<std::size_t>(t.x.cols()), {});
    row[0] = std::to_string(t.ids[static_cast<std::size_t>(r)]);
    const auto& time = t.times[static_cast<std::size_t>(r)];
    row[1] = time ? format_iso8601(*time) : "";
    for (Eigen::Index c = 0; c < t.x.cols(); ++c) row[2 + static_cast<std::size_t>(c)] = csv::format_double(t.x(r, c));
    csv::write_row(out, row);
  }
  if (!out) throw DataError("cannot write " + path.string());
}

FeatureTable read_feature_table(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  csv::Reader reader(in);
  const auto header = reader.header();
  if (header.size() < 3 || header[0] != "window" || header[1] != "start_time") {
    throw LoadError("feature table: expected 'window,start_time,...' header", 1, "");
  }
  FeatureTable t;
  t.names.assign(header.begin() + 2, header.end());
  if (t.names != default_registry().names()) {
    throw DataError("feature table " + path.string() + ": columns do not match the feature registry (hash " +
                    default_registry().hash() + ")");
  }
  const json meta = read_meta(path);
  if (meta.contains("registry_hash") && meta["registry_hash"] != default_registry().hash()) {
    throw DataError("feature table " + path.string() + ": registry hash mismatch");
  }
  std::vector<std::vector<double>> rows;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) throw LoadError("feature table: field count mismatch", reader.row(), "");
    t.ids.push_back(csv::parse_int(fields[0], reader.row(), "window"));
    if (fields[1].empty()) {
      t.times.emplace_back();
    } else {
      try {
        t.times.emplace_back(parse_iso8601(fields[1]));
      } catch (const DataError& e) {
        throw LoadError(e.what(), reader.row(), "start_time");
      }
    }
    std::vector<double> v(t.names.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = csv::parse_double(fields[c + 2], reader.row(), header[c + 2]);
    rows.push_back(std::move(v));
  }
  t.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    t.x.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
  }
  return t;
}

std::vector<int> read_labels(const fs::path& path, const std::vector<long long>& ids) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  csv::Reader reader(in);
  const auto header = reader.header();
  if (header.size() < 2 || header[0] != "window" || header[1] != "label") {
    throw LoadError("labels: expected 'window,label' header", 1, "");
  }
  std::unordered_map<long long, int> by_id;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    if (fields.size() != header.size()) throw LoadError("labels: field count mismatch", reader.row(), "");
    const long long id = csv::parse_int(fields[0], reader.row(), "window");
    const long long label = csv::parse_int(fields[1], reader.row(), "label");
    if (label < 0) throw LoadError("labels: negative label", reader.row(), "label");
    if (!by_id.emplace(id, static_cast<int>(label)).second) throw LoadError("labels: duplicate window", reader.row(), "window");
  }
  std::vector<int> out;
  out.reserve(ids.size());
  for (auto id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("labels: no label for window " + std::to_string(id));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace fpsel::cli
