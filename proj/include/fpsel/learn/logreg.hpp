#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fpsel/learn/dataset.hpp"

namespace fpsel {

struct LogRegParams {
  double learning_rate = 0.01;
  int epochs = 50;
  std::uint64_t seed = 42;
};

/// Binary logistic model p(y = 1 | x) = sigmoid(w.x + b).
struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const;
};

/// Mean log loss of `model` on the full dataset.
double log_loss(const LinearModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y);

/// Plain per-sample SGD on the logistic loss, no regularisation; samples
/// are visited in a freshly shuffled order every epoch. When `loss_trace` is
/// given it receives the full-batch loss before training and after every
/// epoch.
LinearModel train_logreg_sgd(const Dataset& data, const LogRegParams& params = {},
                             std::vector<double>* loss_trace = nullptr);

}  // namespace fpsel
