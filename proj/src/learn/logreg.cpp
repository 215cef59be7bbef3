#include "fpsel/learn/logreg.hpp"

#include <cmath>
#include <numeric>

#include "fpsel/common/error.hpp"
#include "fpsel/common/rng.hpp"

namespace fpsel {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

Eigen::VectorXd LinearModel::predict_proba(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.size()) {
    throw InvalidArgument("logistic model expects " + std::to_string(weights.size()) +
                          " columns, got " + std::to_string(x.cols()));
  }
  Eigen::VectorXd z = (x * weights).array() + bias;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

double log_loss(const LinearModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  const Eigen::VectorXd z = (x * model.weights).array() + model.bias;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += y[static_cast<std::size_t>(i)] == 1 ? softplus(-z(i)) : softplus(z(i));
  }
  return z.size() ? total / static_cast<double>(z.size()) : 0.0;
}

LinearModel train_logreg_sgd(const Dataset& data, const LogRegParams& params,
                             std::vector<double>* loss_trace) {
  data.validate();
  const Dataset d = data.masked();
  for (int label : d.y) {
    if (label != 0 && label != 1) throw InvalidArgument("logistic regression needs labels in {0, 1}");
  }
  if (params.epochs < 0) throw InvalidArgument("logistic regression: negative epoch count");

  LinearModel model{Eigen::VectorXd::Zero(d.x.cols()), 0.0};
  if (loss_trace) loss_trace->assign(1, log_loss(model, d.x, d.y));
  std::vector<std::size_t> order(static_cast<std::size_t>(d.rows()));
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const auto row = d.x.row(static_cast<Eigen::Index>(i));
      const double g = sigmoid(row.dot(model.weights) + model.bias) - d.y[i];
      model.weights -= params.learning_rate * g * row.transpose();
      model.bias -= params.learning_rate * g;
    }
    if (loss_trace) loss_trace->push_back(log_loss(model, d.x, d.y));
  }
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw Error("logistic regression diverged");
  }
  return model;
}

}  // namespace fpsel
