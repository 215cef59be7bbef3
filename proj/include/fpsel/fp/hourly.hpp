#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

#include "fpsel/common/time.hpp"

namespace fpsel::fp {

/// Number of hourly statistics per window feature (min, max, mean, std).
inline constexpr int kHourlyStats = 4;

/// Hourly rows on a contiguous hour grid. Columns are feature-major:
/// column 4f + {0, 1, 2, 3} holds {min, max, mean, std} of feature f.
struct HourlyRows {
  std::vector<TimePoint> hours;
  Eigen::MatrixXd values;
  /// Windows present over windows expected, capped at 1.
  std::vector<double> coverage;
  /// Coverage below the usable threshold; values are zero for empty hours.
  std::vector<bool> missing;

  std::size_t size() const { return hours.size(); }
  std::vector<std::size_t> usable_rows() const;
};

/// Groups window vectors (rows of `windows`, timestamps non-decreasing) by
/// wall-clock hour. Throws DataError on unordered timestamps and
/// InvalidArgument on shape mismatch or `expected_per_hour` <= 0.
HourlyRows hourly_aggregate(std::span<const TimePoint> times, const Eigen::MatrixXd& windows,
                            double expected_per_hour, double min_coverage = 0.5);

/// `name@min`, `name@max`, `name@mean`, `name@std` per input name.
std::vector<std::string> hourly_column_names(std::span<const std::string> names);

/// Column z-scoring fitted on one station's training rows. Columns with no
/// spread map to 0.
class ColumnScaler {
 public:
  ColumnScaler() = default;
  /// Population statistics over `rows` of `x`; throws when `rows` is empty.
  static ColumnScaler fit(const Eigen::MatrixXd& x, std::span<const std::size_t> rows);

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;

  const Eigen::RowVectorXd& mean() const { return mean_; }
  /// Zero marks a degenerate column.
  const Eigen::RowVectorXd& scale() const { return scale_; }

  std::string to_json() const;
  static ColumnScaler from_json(const std::string& text);

 private:
  Eigen::RowVectorXd mean_;
  Eigen::RowVectorXd scale_;
};

/// 1 where some fault f satisfies t < f <= t + horizon.
std::vector<int> label_with_horizon(std::span<const TimePoint> hours, std::span<const TimePoint> faults,
                                    double horizon_h = 168.0);

/// Trailing mean over the last `width` entries (fewer at the start). NaN
/// entries are missing and left out; NaN when the whole span is missing.
std::vector<double> moving_average(std::span<const double> p, int width = 5);

}  // namespace fpsel::fp
