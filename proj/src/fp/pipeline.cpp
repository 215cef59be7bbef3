#include "fpsel/fp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/features/extract.hpp"
#include "json.hpp"

namespace fpsel::fp {

using json = nlohmann::json;

WindowFeatures extract_recording(const synth::Recording& recording, int threads, std::size_t chunk) {
  if (chunk == 0) throw InvalidArgument("extract_recording: chunk must be positive");
  WindowFeatures out;
  const std::size_t n = recording.size();
  out.times.resize(n);
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(default_registry().size()));
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t count = std::min(chunk, n - begin);
    std::vector<std::optional<WaveformWindow>> slots(count);
    parallel_for(count, threads, [&](std::size_t i) { slots[i] = recording.window(begin + i); });
    std::vector<WaveformWindow> windows;
    windows.reserve(count);
    for (auto& w : slots) windows.push_back(std::move(*w));
    const auto vectors = extract_batch(windows, threads);
    for (std::size_t i = 0; i < count; ++i) {
      out.times[begin + i] = recording.window_time(begin + i);
      out.x.row(static_cast<Eigen::Index>(begin + i)) = vectors[i].values.transpose();
    }
  }
  return out;
}

FpModel train_fp(std::span<const StationSeries> train, const FpConfig& config) {
  if (train.empty()) throw InvalidArgument("train_fp: no training stations");
  const Eigen::Index d = train.front().rows.values.cols();
  FpModel model;
  model.horizon_h = config.horizon_h;
  model.smooth_width = config.smooth_width;

  std::vector<Eigen::MatrixXd> blocks;
  std::vector<int> y;
  Eigen::Index total = 0;
  for (const auto& s : train) {
    if (s.rows.values.cols() != d) throw InvalidArgument("train_fp: stations differ in column count");
    if (model.scalers.count(s.station)) throw InvalidArgument("train_fp: duplicate station " + s.station);
    const auto usable = s.rows.usable_rows();
    if (usable.empty()) throw DataError("train_fp: station " + s.station + " has no usable hours");
    const ColumnScaler scaler = ColumnScaler::fit(s.rows.values, usable);
    model.scalers.emplace(s.station, scaler);
    blocks.push_back(scaler.transform(select_rows(s.rows.values, usable)));
    const auto labels = label_with_horizon(s.rows.hours, s.faults, config.horizon_h);
    for (auto r : usable) y.push_back(labels[r]);
    total += blocks.back().rows();
  }
  Dataset data{Eigen::MatrixXd(total, d), std::move(y), 2, std::nullopt};
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    data.x.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  model.forest = train_forest(data, config.forest);
  return model;
}

StationPrediction predict_fp(const FpModel& model, const StationSeries& series) {
  const auto it = model.scalers.find(series.station);
  if (it == model.scalers.end()) throw DataError("predict_fp: no training statistics for station " + series.station);
  StationPrediction p;
  p.hours = series.rows.hours;
  p.probability.assign(series.rows.size(), std::nan(""));
  const auto usable = series.rows.usable_rows();
  if (!usable.empty()) {
    const Eigen::MatrixXd x = it->second.transform(select_rows(series.rows.values, usable));
    const Eigen::MatrixXd proba = model.forest.predict_proba(x);
    for (std::size_t k = 0; k < usable.size(); ++k) {
      p.probability[usable[k]] = proba(static_cast<Eigen::Index>(k), 1);
    }
  }
  p.smoothed = moving_average(p.probability, model.smooth_width);
  return p;
}

void write_predictions(std::ostream& out, const StationPrediction& p, double threshold) {
  csv::write_row(out, {"hour", "probability", "smoothed", "decision"});
  for (std::size_t i = 0; i < p.hours.size(); ++i) {
    auto cell = [](double v) { return std::isnan(v) ? std::string() : csv::format_double(v); };
    const bool positive = !std::isnan(p.smoothed[i]) && p.smoothed[i] >= threshold;
    csv::write_row(out, {format_iso8601(p.hours[i]), cell(p.probability[i]), cell(p.smoothed[i]),
                         positive ? "1" : "0"});
  }
}

EvalReport evaluate_prediction(const StationPrediction& p, std::span<const TimePoint> faults,
                               const EvalOptions& options) {
  return evaluate(p.hours, p.smoothed, faults, options);
}

std::vector<SweepPoint> horizon_sweep(std::span<const StationSeries> train, std::span<const StationSeries> test,
                                      std::span<const double> horizons, const FpConfig& config) {
  std::vector<SweepPoint> out;
  for (double h : horizons) {
    if (!(h >= 0.0)) throw InvalidArgument("horizon_sweep: horizons must be non-negative");
    FpConfig c = config;
    c.horizon_h = h;
    const FpModel model = train_fp(train, c);
    std::vector<EvalReport> reports;
    for (const auto& s : test) reports.push_back(evaluate_prediction(predict_fp(model, s), s.faults, c.eval));
    out.push_back({h, combine(reports)});
  }
  return out;
}

std::string FpModel::to_json() const {
  json j;
  j["format"] = "fpsel-fp-model/1";
  j["horizon_h"] = horizon_h;
  j["smooth_width"] = smooth_width;
  j["columns"] = columns;
  j["registry_hash"] = registry_hash;
  j["scalers"] = json::object();
  for (const auto& [name, s] : scalers) j["scalers"][name] = json::parse(s.to_json());
  j["forest"] = json::parse(forest.to_json());
  return j.dump();
}

FpModel FpModel::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "fpsel-fp-model/1") throw DataError("fp model: unknown format");
    FpModel m;
    m.horizon_h = j.at("horizon_h").get<double>();
    m.smooth_width = j.at("smooth_width").get<int>();
    m.columns = j.at("columns").get<std::vector<std::string>>();
    m.registry_hash = j.at("registry_hash").get<std::string>();
    for (const auto& [name, s] : j.at("scalers").items()) m.scalers.emplace(name, ColumnScaler::from_json(s.dump()));
    m.forest = ForestModel::from_json(j.at("forest").dump());
    for (const auto& [name, s] : m.scalers) {
      if (s.mean().size() != m.forest.n_features()) throw DataError("fp model: scaler width differs from forest");
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("fp model: ") + e.what());
  }
}

void FpModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json() << '\n';
}

FpModel FpModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

}  // namespace fpsel::fp
