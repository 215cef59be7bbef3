#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fpsel/fp/evaluate.hpp"
#include "fpsel/fp/hourly.hpp"
#include "fpsel/learn/forest.hpp"
#include "fpsel/synth/generate.hpp"

namespace fpsel::fp {

/// Window feature vectors (rows, full registry order) with their start times.
struct WindowFeatures {
  std::vector<TimePoint> times;
  Eigen::MatrixXd x;
};

/// Renders and extracts a recording `chunk` windows at a time so only one
/// chunk of waveforms is held in memory.
WindowFeatures extract_recording(const synth::Recording& recording, int threads, std::size_t chunk = 256);

/// One station's hourly rows over one period, with the faults of that period.
struct StationSeries {
  std::string station;
  HourlyRows rows;
  std::vector<TimePoint> faults;
};

struct FpConfig {
  ForestParams forest{};
  double horizon_h = 168.0;
  int smooth_width = 5;
  EvalOptions eval{};
};

/// Random forest over z-scored hourly rows, with one scaler per training
/// station.
struct FpModel {
  ForestModel forest;
  std::map<std::string, ColumnScaler> scalers;
  double horizon_h = 168.0;
  int smooth_width = 5;
  std::vector<std::string> columns;
  std::string registry_hash;

  std::string to_json() const;
  static FpModel from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static FpModel load(const std::filesystem::path& path);
};

/// Fits each station's scaler on its usable rows only, labels them with the
/// horizon and trains on the stacked usable rows. Always two classes, so a
/// fault-free training period yields probability 0 everywhere. Throws
/// InvalidArgument on duplicate stations or column mismatch.
FpModel train_fp(std::span<const StationSeries> train, const FpConfig& config);

struct StationPrediction {
  std::vector<TimePoint> hours;
  /// NaN on missing hours.
  std::vector<double> probability;
  std::vector<double> smoothed;
};

/// Scales with the station's training statistics; throws DataError for a
/// station the model was not trained on.
StationPrediction predict_fp(const FpModel& model, const StationSeries& series);

/// `hour,probability,smoothed,decision` (empty fields on missing hours).
void write_predictions(std::ostream& out, const StationPrediction& p, double threshold = 0.5);

EvalReport evaluate_prediction(const StationPrediction& p, std::span<const TimePoint> faults,
                               const EvalOptions& options = {});

struct SweepPoint {
  double horizon_h = 0.0;
  EvalReport report;
};

/// Relabels, retrains and evaluates once per horizon; the combined report
/// over the test stations is kept.
std::vector<SweepPoint> horizon_sweep(std::span<const StationSeries> train, std::span<const StationSeries> test,
                                      std::span<const double> horizons, const FpConfig& config);

}  // namespace fpsel::fp
