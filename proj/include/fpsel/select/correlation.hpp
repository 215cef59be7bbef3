#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpsel/learn/metrics.hpp"
#include "fpsel/select/rfe.hpp"

namespace fpsel {

struct CorrelationOptions {
  std::size_t min_size = 10;
  std::size_t max_size = 400;
  FoldPlan surrogate_plan{};
  FoldPlan fp_plan{FoldKind::timeseries_split, 5, false, 42};
  Score surrogate_score = Score::accuracy;
  Score fp_score = Score::f1;
  /// Columns of the FP dataset per surrogate feature, stored feature-major
  /// (4 for hourly min/max/mean/std rows).
  std::size_t fp_group = 1;
  ForestParams forest{};
  /// Subsets evaluated concurrently; each forest then runs single-threaded.
  int threads = 1;
};

struct SubsetScore {
  std::vector<std::size_t> features;
  double surrogate = 0.0;
  double fp = 0.0;
};

struct CorrelationResult {
  PearsonResult pearson;
  std::vector<SubsetScore> table;
};

/// Draws `n_subsets` random feature subsets (size uniform in
/// [min_size, min(max_size, d)]) and correlates their surrogate CV scores
/// with their FP CV scores.
CorrelationResult correlation_study(const Dataset& surrogate, const Dataset& fp, int n_subsets,
                                    std::uint64_t seed, const CorrelationOptions& options = {});

}  // namespace fpsel
