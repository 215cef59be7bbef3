#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace fpsel {

struct BinaryCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

/// Precision, recall and F1 are 0 whenever their denominator is 0.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Metrics metrics_from_counts(const BinaryCounts& c);

BinaryCounts binary_counts(std::span<const int> y_true, std::span<const int> y_pred);

/// Binary metrics with class 1 as positive.
Metrics binary_metrics(std::span<const int> y_true, std::span<const int> y_pred);

/// Fraction of exact matches (any number of classes).
double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// 1 where p >= threshold.
std::vector<int> threshold_labels(const Eigen::Ref<const Eigen::VectorXd>& p,
                                  double threshold = 0.5);

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Sample correlation with a two-sided Student-t p-value (n - 2 degrees of
/// freedom) through the regularised incomplete beta function.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

}  // namespace fpsel
