#pragma once

// Shared plumbing for the command-line tool: run configuration, manifests,
// feature CSV files and path handling.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpsel/common/time.hpp"
#include "json.hpp"

namespace fpsel::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Every tunable of a run. Serialised into each output manifest; `threads`
/// is left out because it never changes results.
struct RunConfig {
  std::uint64_t seed = 42;
  std::optional<std::uint64_t> station_seed;
  double sample_rate_hz = 4000.0;
  double fundamental_hz = 50.0;
  int per_class = 100;
  double days = 30.0;
  int faults = 3;
  std::string station = "S1";
  std::string start = "2024-01-01T00:00:00Z";
  int windows_per_hour = 4;
  double precursor_peak_rate = 0.6;
  double benign_rate = 0.1;
  double decoy_share = 0.0;
  double horizon_h = 168.0;
  std::vector<double> horizons{24.0, 72.0, 168.0, 336.0};
  int smooth_width = 5;
  int rfe_step = 1;
  double rfe_fraction = 0.0;
  int rfe_floor = 0;
  int folds = 5;
  int trees = 100;
  int subsets = 100;
  int subset_min = 10;
  int subset_max = 400;
  /// Free-text description of the train/test station split.
  std::string split;
  int threads = 1;

  json to_json() const;
  /// Unknown keys are rejected (InvalidArgument).
  void merge_json(const json& j);
};

/// Applies FPSEL_WORKDIR to relative paths.
fs::path resolve(const fs::path& p);

/// Sidecar `<output>.manifest.json` for each output of one command run.
/// `meta` carries facts later commands rely on (station, windows per hour,
/// registry hash).
void write_manifests(const std::string& command, const RunConfig& config, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& outputs, const json& meta = json::object());

/// `meta` of `<path>.manifest.json`, or an empty object when absent.
json read_meta(const fs::path& path);

/// Window-level features: `window,start_time,<names...>`.
struct FeatureTable {
  std::vector<long long> ids;
  std::vector<std::optional<TimePoint>> times;
  std::vector<std::string> names;
  Eigen::MatrixXd x;
};

void write_feature_table(const fs::path& path, const FeatureTable& t);
/// Throws DataError when the file is missing or names differ from the
/// default registry.
FeatureTable read_feature_table(const fs::path& path);

/// `window,label`; returns labels ordered like `ids`.
std::vector<int> read_labels(const fs::path& path, const std::vector<long long>& ids);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
void require_file(const fs::path& path);

}  // namespace fpsel::cli
