#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpsel/learn/dataset.hpp"

namespace fpsel {

struct ForestParams {
  int n_estimators = 100;
  std::uint64_t seed = 42;
  int min_samples_split = 2;
  /// Features drawn per split; 0 means max(1, floor(sqrt(d))).
  int max_features = 0;
  bool bootstrap = true;
  int threads = 1;
};

/// One CART tree in flat arrays. Internal nodes have feature >= 0 and send
/// x[feature] <= threshold to `left`. Leaves keep a sparse class
/// distribution in [leaf_begin, leaf_begin + leaf_size).
struct DecisionTree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> leaf_begin;
  std::vector<int> leaf_size;
  std::vector<int> leaf_class;
  std::vector<double> leaf_probability;

  std::size_t node_count() const { return feature.size(); }
  /// Index of the leaf reached by `row`.
  int leaf_of(const double* row, Eigen::Index stride) const;
};

class ForestModel {
 public:
  ForestModel() = default;

  int n_classes() const { return n_classes_; }
  int n_features() const { return n_features_; }
  const ForestParams& params() const { return params_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  /// Mean impurity decrease, normalised per tree, averaged and normalised
  /// again; all zero when no tree split.
  const Eigen::VectorXd& importances() const { return importances_; }

  /// Mean of per-tree leaf class frequencies; rows sum to 1.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const;
  /// Argmax of predict_proba, lowest class on ties.
  std::vector<int> predict(const Eigen::MatrixXd& x) const;

  /// Registry hash and feature names of the columns the model expects; set
  /// by callers that persist models.
  std::string registry_hash;
  std::vector<std::string> feature_names;

  std::string to_json() const;
  static ForestModel from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ForestModel load(const std::filesystem::path& path);

 private:
  friend ForestModel train_forest(const Dataset&, const ForestParams&);

  ForestParams params_;
  int n_classes_ = 0;
  int n_features_ = 0;
  std::vector<DecisionTree> trees_;
  Eigen::VectorXd importances_;
};

/// Bagged CART ensemble with Gini impurity, unlimited depth and a
/// counter-based per-tree seed derive_seed(seed, tree). Bit-identical for
/// any thread count.
ForestModel train_forest(const Dataset& data, const ForestParams& params = {});

}  // namespace fpsel
