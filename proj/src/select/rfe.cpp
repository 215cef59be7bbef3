#include "fpsel/select/rfe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/learn/metrics.hpp"
#include "json.hpp"

namespace fpsel {

using json = nlohmann::json;

CvResult cross_validate(const Dataset& data, std::span<const Fold> folds,
                        const ForestParams& params, Score score) {
  if (folds.empty()) throw InvalidArgument("cross_validate: no folds");
  Dataset owned;
  const Dataset* base = &data;
  if (data.mask) {
    owned = data.masked();
    base = &owned;
  }
  if (score == Score::f1 && base->n_classes != 2) {
    throw InvalidArgument("cross_validate: F1 needs binary labels");
  }
  CvResult result;
  result.importances = Eigen::VectorXd::Zero(base->x.cols());
  for (const Fold& fold : folds) {
    const ForestModel model = train_forest(base->subset(fold.train), params);
    const Eigen::MatrixXd x_test = select_rows(base->x, fold.test);
    std::vector<int> truth(fold.test.size());
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = base->y[fold.test[i]];
    double s;
    if (score == Score::f1) {
      s = binary_metrics(truth, threshold_labels(model.predict_proba(x_test).col(1))).f1;
    } else {
      s = accuracy(truth, model.predict(x_test));
    }
    result.fold_scores.push_back(s);
    result.importances += model.importances();
  }
  const auto k = static_cast<double>(folds.size());
  result.importances /= k;
  result.mean = std::accumulate(result.fold_scores.begin(), result.fold_scores.end(), 0.0) / k;
  return result;
}

std::size_t RfeSchedule::removal(std::size_t active) const {
  if (fraction > 0.0 && active > fraction_floor) {
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(active)));
    return std::clamp<std::size_t>(k, 1, active - fraction_floor);
  }
  return std::min(static_cast<std::size_t>(step), active);
}

RfeTrace rfe_cv(const Dataset& data, const RfeSchedule& schedule, const FoldPlan& plan,
                const ForestParams& params) {
  if (schedule.step < 1) throw InvalidArgument("rfe_cv: step must be >= 1");
  if (schedule.fraction < 0.0 || schedule.fraction >= 1.0) {
    throw InvalidArgument("rfe_cv: fraction must be in [0, 1)");
  }
  data.validate();
  std::vector<std::size_t> active;
  if (data.mask) {
    active = *data.mask;
    std::sort(active.begin(), active.end());
  } else {
    active.resize(static_cast<std::size_t>(data.x.cols()));
    std::iota(active.begin(), active.end(), std::size_t{0});
  }
  if (active.empty()) throw InvalidArgument("rfe_cv: no features");

  const std::vector<Fold> folds = make_folds(plan, data.y);
  RfeTrace trace;
  Dataset round{Eigen::MatrixXd(), data.y, data.n_classes, {}};
  while (!active.empty()) {
    round.x = select_columns(data.x, active);
    const CvResult cv = cross_validate(round, folds, params, Score::accuracy);

    RfeIteration it;
    it.size = active.size();
    it.mean_accuracy = cv.mean;
    it.fold_accuracy = cv.fold_scores;

    std::vector<std::size_t> order(active.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (cv.importances(static_cast<Eigen::Index>(a)) != cv.importances(static_cast<Eigen::Index>(b))) {
        return cv.importances(static_cast<Eigen::Index>(a)) < cv.importances(static_cast<Eigen::Index>(b));
      }
      return active[a] > active[b];
    });
    const std::size_t k = schedule.removal(active.size());
    std::vector<bool> drop(active.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
      drop[order[j]] = true;
      it.removed.push_back(active[order[j]]);
    }
    std::vector<std::size_t> next;
    for (std::size_t j = 0; j < active.size(); ++j) {
      if (!drop[j]) next.push_back(active[j]);
    }

    // Strictly greater keeps the earlier (larger) set; a later equal score
    // belongs to a smaller set and wins.
    if (trace.iterations.empty() || it.mean_accuracy >= trace.chosen_accuracy) {
      trace.chosen_iteration = trace.iterations.size();
      trace.chosen_accuracy = it.mean_accuracy;
      trace.chosen = active;
    }
    trace.iterations.push_back(std::move(it));
    active = std::move(next);
  }
  return trace;
}

void write_rfe_trace(std::ostream& out, const RfeTrace& trace, std::span<const std::string> names) {
  csv::write_row(out, {"iteration", "size", "mean_accuracy", "removed"});
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const RfeIteration& it = trace.iterations[i];
    std::string removed;
    for (std::size_t id : it.removed) {
      if (!removed.empty()) removed += ';';
      removed += names.empty() ? std::to_string(id) : names[id];
    }
    csv::write_row(out, {std::to_string(i), std::to_string(it.size),
                         csv::format_double(it.mean_accuracy), removed});
  }
}

std::string FeatureSelection::to_json() const {
  json j;
  j["format"] = "fpsel-selection/1";
  j["registry_hash"] = registry_hash;
  j["names"] = names;
  j["indices"] = indices;
  return j.dump(2) + "\n";
}

FeatureSelection FeatureSelection::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "fpsel-selection/1") throw DataError("unknown selection format");
    FeatureSelection s;
    s.registry_hash = j.at("registry_hash").get<std::string>();
    s.names = j.at("names").get<std::vector<std::string>>();
    s.indices = j.at("indices").get<std::vector<std::size_t>>();
    if (s.names.size() != s.indices.size()) throw DataError("selection: names/indices differ in length");
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("selection: ") + e.what());
  }
}

}  // namespace fpsel
