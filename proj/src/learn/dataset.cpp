#include "fpsel/learn/dataset.hpp"

#include <algorithm>
#include <string>

#include "fpsel/common/error.hpp"

namespace fpsel {

void Dataset::validate() const {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw InvalidArgument("dataset: " + std::to_string(x.rows()) + " rows but " +
                          std::to_string(y.size()) + " labels");
  }
  if (n_classes < 1) throw InvalidArgument("dataset: class count must be positive");
  for (int label : y) {
    if (label < 0 || label >= n_classes) {
      throw InvalidArgument("dataset: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(n_classes) + ")");
    }
  }
  if (!x.allFinite()) throw InvalidArgument("dataset: non-finite feature value");
  if (mask) {
    std::vector<std::size_t> sorted = *mask;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("dataset: duplicate mask index");
    }
    if (!sorted.empty() && sorted.back() >= static_cast<std::size_t>(x.cols())) {
      throw InvalidArgument("dataset: mask index out of range");
    }
  }
}

Dataset Dataset::masked() const {
  if (!mask) return *this;
  return {select_columns(x, *mask), y, n_classes, std::nullopt};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out{select_rows(x, rows), {}, n_classes, mask};
  out.y.reserve(rows.size());
  for (auto r : rows) out.y.push_back(y.at(r));
  return out;
}

int count_classes(std::span<const int> labels) {
  int k = 0;
  for (int label : labels) {
    if (label < 0) throw InvalidArgument("negative class label");
    k = std::max(k, label + 1);
  }
  return k;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(x.rows())) throw InvalidArgument("row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, std::span<const std::size_t> columns) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= static_cast<std::size_t>(x.cols())) throw InvalidArgument("column index out of range");
    out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

}  // namespace fpsel
