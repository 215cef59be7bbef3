#include "fpsel/learn/metrics.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <algorithm>
#include <cmath>
#include <string>

#include "fpsel/common/error.hpp"

namespace fpsel {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Metrics metrics_from_counts(const BinaryCounts& c) {
  Metrics m;
  const double total = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), total);
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.f1 = ratio(2.0 * static_cast<double>(c.tp), static_cast<double>(2 * c.tp + c.fp + c.fn));
  return m;
}

BinaryCounts binary_counts(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  BinaryCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1, p = y_pred[i] == 1;
    if (t && p) ++c.tp;
    else if (!t && p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics binary_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  return metrics_from_counts(binary_counts(y_true, y_pred));
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  if (y_true.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<int> threshold_labels(const Eigen::Ref<const Eigen::VectorXd>& p, double threshold) {
  std::vector<int> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) >= threshold;
  return out;
}

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  const std::size_t n = x.size();
  if (n < 3) throw InvalidArgument("pearson: need at least 3 pairs");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvalidArgument("pearson: zero variance");
  PearsonResult out;
  out.n = n;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus_r2 = 1.0 - out.r * out.r;
  if (one_minus_r2 <= 0.0) {
    out.p = 0.0;
  } else {
    const double t2 = out.r * out.r * df / one_minus_r2;
    out.p = boost::math::ibeta(df / 2.0, 0.5, df / (df + t2));
  }
  return out;
}

}  // namespace fpsel
