#include "fpsel/fp/hourly.hpp"

#include <algorithm>
#include <cmath>

#include "fpsel/common/error.hpp"
#include "json.hpp"

namespace fpsel::fp {

using json = nlohmann::json;

std::vector<std::size_t> HourlyRows::usable_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < missing.size(); ++i) {
    if (!missing[i]) rows.push_back(i);
  }
  return rows;
}

HourlyRows hourly_aggregate(std::span<const TimePoint> times, const Eigen::MatrixXd& windows,
                            double expected_per_hour, double min_coverage) {
  if (static_cast<Eigen::Index>(times.size()) != windows.rows()) {
    throw InvalidArgument("hourly_aggregate: timestamp count does not match window rows");
  }
  if (!(expected_per_hour > 0.0)) throw InvalidArgument("hourly_aggregate: expected_per_hour must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw DataError("hourly_aggregate: timestamps out of order at row " + std::to_string(i));
  }
  HourlyRows out;
  if (times.empty()) {
    out.values.resize(0, kHourlyStats * windows.cols());
    return out;
  }
  const TimePoint first = floor_hour(times.front());
  const auto n_hours = static_cast<std::size_t>(
      std::chrono::duration_cast<std::chrono::hours>(floor_hour(times.back()) - first).count() + 1);
  const Eigen::Index d = windows.cols();
  out.hours.resize(n_hours);
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_hours), kHourlyStats * d);
  out.coverage.assign(n_hours, 0.0);
  out.missing.assign(n_hours, true);

  std::size_t begin = 0;
  for (std::size_t h = 0; h < n_hours; ++h) {
    const TimePoint hour = first + std::chrono::hours(h);
    out.hours[h] = hour;
    std::size_t end = begin;
    while (end < times.size() && floor_hour(times[end]) == hour) ++end;
    const auto count = static_cast<Eigen::Index>(end - begin);
    out.coverage[h] = std::min(1.0, static_cast<double>(count) / expected_per_hour);
    out.missing[h] = out.coverage[h] < min_coverage;
    if (count > 0) {
      const auto block = windows.middleRows(static_cast<Eigen::Index>(begin), count);
      const Eigen::RowVectorXd lo = block.colwise().minCoeff();
      const Eigen::RowVectorXd hi = block.colwise().maxCoeff();
      const Eigen::RowVectorXd mean = block.colwise().mean();
      const Eigen::RowVectorXd var = (block.rowwise() - mean).array().square().colwise().mean();
      // Rounding can put the mean of equal values one ulp outside [min, max].
      const Eigen::RowVectorXd clamped = mean.cwiseMax(lo).cwiseMin(hi);
      auto row = out.values.row(static_cast<Eigen::Index>(h));
      for (Eigen::Index f = 0; f < d; ++f) {
        row(kHourlyStats * f) = lo(f);
        row(kHourlyStats * f + 1) = hi(f);
        row(kHourlyStats * f + 2) = clamped(f);
        row(kHourlyStats * f + 3) = std::sqrt(var(f));
      }
    }
    begin = end;
  }
  return out;
}

std::vector<std::string> hourly_column_names(std::span<const std::string> names) {
  std::vector<std::string> out;
  out.reserve(names.size() * kHourlyStats);
  for (const auto& n : names) {
    for (const char* s : {"@min", "@max", "@mean", "@std"}) out.push_back(n + s);
  }
  return out;
}

ColumnScaler ColumnScaler::fit(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  if (rows.empty()) throw InvalidArgument("ColumnScaler::fit: no rows");
  ColumnScaler s;
  s.mean_ = Eigen::RowVectorXd::Zero(x.cols());
  for (auto r : rows) s.mean_ += x.row(static_cast<Eigen::Index>(r));
  s.mean_ /= static_cast<double>(rows.size());
  Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(x.cols());
  for (auto r : rows) var += (x.row(static_cast<Eigen::Index>(r)) - s.mean_).array().square().matrix();
  s.scale_ = (var / static_cast<double>(rows.size())).cwiseSqrt();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (s.scale_(c) <= 1e-12 * std::max(1.0, std::abs(s.mean_(c)))) s.scale_(c) = 0.0;
  }
  return s;
}

Eigen::MatrixXd ColumnScaler::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.size()) throw InvalidArgument("ColumnScaler::transform: column count mismatch");
  const Eigen::RowVectorXd inv = (scale_.array() > 0.0).select(scale_.cwiseInverse(), 0.0);
  return ((x.rowwise() - mean_).array().rowwise() * inv.array()).matrix();
}

std::string ColumnScaler::to_json() const {
  json j;
  j["mean"] = std::vector<double>(mean_.data(), mean_.data() + mean_.size());
  j["scale"] = std::vector<double>(scale_.data(), scale_.data() + scale_.size());
  return j.dump();
}

ColumnScaler ColumnScaler::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const auto m = j.at("mean").get<std::vector<double>>();
    const auto s = j.at("scale").get<std::vector<double>>();
    if (m.size() != s.size()) throw DataError("scaler: mean and scale differ in length");
    ColumnScaler out;
    out.mean_ = Eigen::Map<const Eigen::RowVectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
    out.scale_ = Eigen::Map<const Eigen::RowVectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("scaler: ") + e.what());
  }
}

std::vector<int> label_with_horizon(std::span<const TimePoint> hours, std::span<const TimePoint> faults,
                                    double horizon_h) {
  std::vector<TimePoint> sorted(faults.begin(), faults.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> y(hours.size(), 0);
  for (std::size_t i = 0; i < hours.size(); ++i) {
    // The first fault after t decides: any later one is further away.
    const auto f = std::upper_bound(sorted.begin(), sorted.end(), hours[i]);
    if (f != sorted.end() && hours_between(hours[i], *f) <= horizon_h) y[i] = 1;
  }
  return y;
}

std::vector<double> moving_average(std::span<const double> p, int width) {
  if (width < 1) throw InvalidArgument("moving_average: width must be at least 1");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t lo = i + 1 >= static_cast<std::size_t>(width) ? i + 1 - static_cast<std::size_t>(width) : 0;
    double sum = 0.0;
    int n = 0;
    for (std::size_t k = lo; k <= i; ++k) {
      if (std::isnan(p[k])) continue;
      sum += p[k];
      ++n;
    }
    out[i] = n > 0 ? sum / n : std::nan("");
  }
  return out;
}

}  // namespace fpsel::fp
