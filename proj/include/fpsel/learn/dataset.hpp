#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fpsel {

/// Feature matrix (rows are samples) with integer labels in [0, n_classes).
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<int> y;
  int n_classes = 0;
  /// Columns to use; all columns when empty.
  std::optional<std::vector<std::size_t>> mask;

  Eigen::Index rows() const { return x.rows(); }

  /// Throws InvalidArgument when shapes, labels or mask are inconsistent
  /// or a value is not finite.
  void validate() const;

  /// Copy with the mask applied to the columns (mask cleared).
  Dataset masked() const;

  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Number of classes implied by the labels (max + 1); throws on negatives.
int count_classes(std::span<const int> labels);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows);
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, std::span<const std::size_t> columns);

}  // namespace fpsel
