#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpsel {

enum class FoldKind { stratified_kfold, timeseries_split };

struct FoldPlan {
  FoldKind kind = FoldKind::stratified_kfold;
  int n_splits = 5;
  bool shuffle = true;
  std::uint64_t seed = 42;
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified: each class is shuffled (when requested) and dealt round-robin
/// across folds, continuing where the previous class stopped, so per-fold
/// class counts differ from the exact share by at most one.
/// Time series: expanding window; test blocks of n / (k + 1) samples at the
/// end, training on everything before each block.
std::vector<Fold> make_folds(const FoldPlan& plan, std::span<const int> labels);

}  // namespace fpsel
