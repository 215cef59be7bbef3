#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fpsel/learn/dataset.hpp"
#include "fpsel/learn/folds.hpp"
#include "fpsel/learn/forest.hpp"

namespace fpsel {

enum class Score { accuracy, f1 };

struct CvResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
  /// Mean over folds of each fold model's normalised importances, one entry
  /// per column of the (masked) dataset.
  Eigen::VectorXd importances;
};

/// Trains one forest per fold and scores it on the held-out rows. F1 uses
/// class 1 as positive with P(1) >= 0.5; accuracy uses the argmax.
CvResult cross_validate(const Dataset& data, std::span<const Fold> folds,
                        const ForestParams& params, Score score = Score::accuracy);

/// How many features each elimination round removes. With `fraction` > 0,
/// ceil(fraction * active) are removed while more than `fraction_floor`
/// remain (never undershooting the floor); afterwards `step` per round.
struct RfeSchedule {
  int step = 1;
  double fraction = 0.0;
  std::size_t fraction_floor = 0;

  static RfeSchedule accelerated() { return {1, 0.05, 200}; }
  std::size_t removal(std::size_t active) const;
};

struct RfeIteration {
  std::size_t size = 0;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
  /// Column indices dropped after scoring this round, lowest importance
  /// first. The last round drops whatever remains.
  std::vector<std::size_t> removed;
};

struct RfeTrace {
  std::vector<RfeIteration> iterations;
  std::size_t chosen_iteration = 0;
  /// Active set of the best round (ties to the smallest set), sorted.
  std::vector<std::size_t> chosen;
  double chosen_accuracy = 0.0;
};

/// Recursive feature elimination scored by cross-validated accuracy.
/// Feature ids are column indices of `data.x`; a mask restricts the start
/// set. Importance ties drop the higher index first.
RfeTrace rfe_cv(const Dataset& data, const RfeSchedule& schedule, const FoldPlan& plan = {},
                const ForestParams& params = {});

/// `iteration,size,mean_accuracy,removed` with removed names joined by ';'.
/// Uses column indices when `names` is empty.
void write_rfe_trace(std::ostream& out, const RfeTrace& trace,
                     std::span<const std::string> names = {});

/// Feature subset handed from selection to the FP pipeline.
struct FeatureSelection {
  std::string registry_hash;
  std::vector<std::string> names;
  std::vector<std::size_t> indices;

  std::string to_json() const;
  static FeatureSelection from_json(const std::string& text);
};

}  // namespace fpsel
