#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>

#include "fpsel/common/error.hpp"

namespace fpsel {

/// Population summary in registry aggregation order.
struct Summary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double skew = 0.0;
  double kurt = 0.0;  // excess
  /// Spread indistinguishable from zero; skew and kurt were forced to 0.
  bool zero_spread = false;

  std::array<double, 6> values() const { return {min, max, mean, std, skew, kurt}; }
};

/// min, max, mean, population std, skew = m3/m2^1.5 and excess kurtosis
/// m4/m2^2 - 3. Two-pass central moments.
template <typename Derived>
Summary summarize(const Eigen::DenseBase<Derived>& x) {
  const Eigen::Index n = x.size();
  if (n == 0) throw InvalidArgument("summarize: empty series");
  Summary s;
  s.min = static_cast<double>(x.minCoeff());
  s.max = static_cast<double>(x.maxCoeff());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += static_cast<double>(x(i));
  s.mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = static_cast<double>(x(i)) - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  s.std = std::sqrt(m2);

  const double scale = std::max(std::abs(s.min), std::abs(s.max));
  if (!(s.std > 1e-12 * scale) || m2 == 0.0) {
    s.zero_spread = true;
    s.std = s.max == s.min ? 0.0 : s.std;
    return s;
  }
  s.skew = m3 / (m2 * std::sqrt(m2));
  s.kurt = m4 / (m2 * m2) - 3.0;
  return s;
}

/// The six aggregation statistics over a per-cycle series; needs at least
/// two cycles.
template <typename Derived>
Summary aggregate_cycle_series(const Eigen::DenseBase<Derived>& values) {
  if (values.size() < 2) {
    throw InvalidArgument("aggregate_cycle_series: need at least 2 cycles, got " +
                          std::to_string(values.size()));
  }
  return summarize(values);
}

/// Threshold below which a magnitude counts as zero for ratio features.
inline double sentinel_epsilon(double window_rms) { return 1e-9 * (window_rms + 1e-12); }

}  // namespace fpsel
