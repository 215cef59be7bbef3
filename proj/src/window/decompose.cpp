#include "fpsel/window/decompose.hpp"

#include <string>
#include <vector>

#include "fpsel/common/error.hpp"

namespace fpsel {

Decomposition decompose_additive(const Eigen::Ref<const Eigen::VectorXd>& x, int period) {
  const Eigen::Index n = x.size();
  if (period < 1 || n < 2 * static_cast<Eigen::Index>(period)) {
    throw InvalidArgument("decompose_additive: need at least two periods (" +
                          std::to_string(2 * period) + " samples), got " + std::to_string(n));
  }
  const Eigen::Index half = period / 2;
  const bool even = period % 2 == 0;

  // Extended-precision prefix sums keep long minutes drift-free.
  std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
  for (Eigen::Index t = 0; t < n; ++t) {
    prefix[static_cast<std::size_t>(t) + 1] = prefix[static_cast<std::size_t>(t)] + x(t);
  }
  const auto range_sum = [&](Eigen::Index lo, Eigen::Index hi) {  // inclusive
    return prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
  };

  Decomposition d;
  d.trend.resize(n);
  const Eigen::Index first = half;
  const Eigen::Index last = n - 1 - half;
  for (Eigen::Index t = first; t <= last; ++t) {
    long double s;
    if (even) {
      s = range_sum(t - half + 1, t + half - 1) + 0.5L * (x(t - half) + x(t + half));
    } else {
      s = range_sum(t - half, t + half);
    }
    d.trend(t) = static_cast<double>(s / period);
  }
  for (Eigen::Index t = 0; t < first; ++t) d.trend(t) = d.trend(first);
  for (Eigen::Index t = last + 1; t < n; ++t) d.trend(t) = d.trend(last);

  std::vector<double> phase_sum(static_cast<std::size_t>(period), 0.0);
  std::vector<int> phase_count(static_cast<std::size_t>(period), 0);
  for (Eigen::Index t = first; t <= last; ++t) {
    const auto p = static_cast<std::size_t>(t % period);
    phase_sum[p] += x(t) - d.trend(t);
    ++phase_count[p];
  }
  std::vector<double> profile(static_cast<std::size_t>(period), 0.0);
  double profile_mean = 0.0;
  for (std::size_t p = 0; p < profile.size(); ++p) {
    profile[p] = phase_count[p] ? phase_sum[p] / phase_count[p] : 0.0;
    profile_mean += profile[p];
  }
  profile_mean /= period;
  for (double& v : profile) v -= profile_mean;

  d.seasonal.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) d.seasonal(t) = profile[static_cast<std::size_t>(t % period)];
  d.residual = x - d.trend - d.seasonal;
  return d;
}

}  // namespace fpsel
