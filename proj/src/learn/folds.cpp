#include "fpsel/learn/folds.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "fpsel/common/error.hpp"
#include "fpsel/common/rng.hpp"

namespace fpsel {
namespace {

std::vector<Fold> stratified(const FoldPlan& plan, std::span<const int> labels) {
  const auto k = static_cast<std::size_t>(plan.n_splits);
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members) {
    if (idx.size() < k) {
      throw InvalidArgument("stratified folds: class " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " members, fewer than " +
                            std::to_string(k) + " splits");
    }
  }
  Rng rng(plan.seed);
  std::vector<std::size_t> fold_of(labels.size());
  std::size_t offset = 0;
  for (auto& [label, idx] : members) {
    if (plan.shuffle) rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t j = 0; j < idx.size(); ++j) fold_of[idx[j]] = (offset + j) % k;
    offset = (offset + idx.size()) % k;
  }
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
  }
  return folds;
}

std::vector<Fold> timeseries(const FoldPlan& plan, std::size_t n) {
  const auto k = static_cast<std::size_t>(plan.n_splits);
  if (n < k + 1) {
    throw InvalidArgument("time-series split: need at least " + std::to_string(k + 1) +
                          " samples, got " + std::to_string(n));
  }
  const std::size_t test_size = n / (k + 1);
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t start = n - (k - f) * test_size;
    for (std::size_t i = 0; i < start; ++i) folds[f].train.push_back(i);
    for (std::size_t i = start; i < start + test_size; ++i) folds[f].test.push_back(i);
  }
  return folds;
}

}  // namespace

std::vector<Fold> make_folds(const FoldPlan& plan, std::span<const int> labels) {
  if (plan.n_splits < 2) throw InvalidArgument("make_folds: need at least 2 splits");
  if (labels.size() < static_cast<std::size_t>(plan.n_splits)) {
    throw InvalidArgument("make_folds: " + std::to_string(labels.size()) + " samples for " +
                          std::to_string(plan.n_splits) + " splits");
  }
  return plan.kind == FoldKind::stratified_kfold ? stratified(plan, labels)
                                                 : timeseries(plan, labels.size());
}

}  // namespace fpsel
