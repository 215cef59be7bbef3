#include "fpsel/learn/forest.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/common/rng.hpp"
#include "json.hpp"

namespace fpsel {
namespace {

using json = nlohmann::json;

constexpr std::uint64_t kPositionMask = 0xffffffffULL;

/// Columns replaced by dense ranks so node sorts run on integer keys.
struct RankedColumns {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  std::vector<std::uint32_t> rank;           // column-major, d blocks of n
  std::vector<std::vector<double>> distinct;  // sorted distinct values per column

  std::uint32_t at(Eigen::Index f, std::size_t i) const {
    return rank[static_cast<std::size_t>(f * n) + i];
  }
};

RankedColumns rank_columns(const Eigen::MatrixXd& x, int threads) {
  RankedColumns rc;
  rc.n = x.rows();
  rc.d = x.cols();
  rc.rank.resize(static_cast<std::size_t>(rc.n * rc.d));
  rc.distinct.resize(static_cast<std::size_t>(rc.d));
  parallel_for(static_cast<std::size_t>(rc.d), threads, [&](std::size_t f) {
    const auto col = x.col(static_cast<Eigen::Index>(f));
    std::vector<std::uint32_t> order(static_cast<std::size_t>(rc.n));
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return col(a) < col(b) || (col(a) == col(b) && a < b); });
    auto& values = rc.distinct[f];
    std::uint32_t* out = rc.rank.data() + f * static_cast<std::size_t>(rc.n);
    for (std::uint32_t i : order) {
      if (values.empty() || col(i) != values.back()) values.push_back(col(i));
      out[i] = static_cast<std::uint32_t>(values.size() - 1);
    }
  });
  return rc;
}

class TreeBuilder {
 public:
  TreeBuilder(const RankedColumns& cols, const std::vector<int>& y, int n_classes, int mtry,
              int min_split)
      : cols_(cols), y_(y), k_(static_cast<std::size_t>(n_classes)), mtry_(mtry), min_split_(min_split) {}

  DecisionTree build(std::uint64_t seed, bool bootstrap, std::vector<double>& importance) {
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(cols_.n);
    weight_.assign(n, 0.0);
    if (bootstrap) {
      for (std::size_t i = 0; i < n; ++i) weight_[rng.below(n)] += 1.0;
    } else {
      std::fill(weight_.begin(), weight_.end(), 1.0);
    }
    samples_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0.0) samples_.push_back(static_cast<std::uint32_t>(i));
    }
    features_.resize(static_cast<std::size_t>(cols_.d));
    std::iota(features_.begin(), features_.end(), 0);
    importance.assign(static_cast<std::size_t>(cols_.d), 0.0);
    tree_ = DecisionTree{};
    buffer_.resize(samples_.size());

    struct Task {
      std::size_t begin, end;
      int node;
    };
    std::vector<Task> stack{{0, samples_.size(), new_node()}};
    double root_weight = -1.0;
    std::vector<double> counts(k_), left(k_);
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0.0);
      double total = 0.0;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        const auto s = samples_[i];
        counts[static_cast<std::size_t>(y_[s])] += weight_[s];
        total += weight_[s];
      }
      if (root_weight < 0.0) root_weight = total;
      double sq = 0.0;
      std::size_t nonzero = 0;
      for (double c : counts) {
        sq += c * c;
        nonzero += c > 0.0;
      }
      const std::size_t m = task.end - task.begin;
      if (nonzero <= 1 || m < static_cast<std::size_t>(min_split_)) {
        make_leaf(task.node, counts, total);
        continue;
      }
      const Split split = find_split(task.begin, task.end, counts, total, rng, left);
      if (split.feature < 0) {
        make_leaf(task.node, counts, total);
        continue;
      }
      importance[static_cast<std::size_t>(split.feature)] += (split.proxy - sq / total) / root_weight;

      // Stable partition on rank <= split rank.
      std::size_t nl = 0;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        if (cols_.at(split.feature, samples_[i]) <= split.rank) ++nl;
      }
      std::size_t li = task.begin, ri = task.begin + nl;
      for (std::size_t i = task.begin; i < task.end; ++i) {
        const auto s = samples_[i];
        if (cols_.at(split.feature, s) <= split.rank) {
          buffer_[li++] = s;
        } else {
          buffer_[ri++] = s;
        }
      }
      std::copy(buffer_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                buffer_.begin() + static_cast<std::ptrdiff_t>(task.end),
                samples_.begin() + static_cast<std::ptrdiff_t>(task.begin));

      const int l = new_node();
      const int r = new_node();
      const auto node = static_cast<std::size_t>(task.node);
      tree_.feature[node] = split.feature;
      tree_.threshold[node] = split.threshold;
      tree_.left[node] = l;
      tree_.right[node] = r;
      stack.push_back({task.begin + nl, task.end, r});
      stack.push_back({task.begin, task.begin + nl, l});
    }
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    std::uint32_t rank = 0;
    double threshold = 0.0;
    double proxy = -std::numeric_limits<double>::infinity();
  };

  int new_node() {
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.leaf_begin.push_back(-1);
    tree_.leaf_size.push_back(0);
    return static_cast<int>(tree_.feature.size() - 1);
  }

  void make_leaf(int node, const std::vector<double>& counts, double total) {
    const auto i = static_cast<std::size_t>(node);
    tree_.leaf_begin[i] = static_cast<int>(tree_.leaf_class.size());
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] <= 0.0) continue;
      tree_.leaf_class.push_back(static_cast<int>(c));
      tree_.leaf_probability.push_back(counts[c] / total);
      ++tree_.leaf_size[i];
    }
  }

  Split find_split(std::size_t begin, std::size_t end, const std::vector<double>& counts,
                   double total, Rng& rng, std::vector<double>& left) {
    Split best;
    const std::size_t m = end - begin;
    const std::size_t d = features_.size();
    double sq_total = 0.0;
    for (double c : counts) sq_total += c * c;
    keys_.resize(m);
    int visited = 0;
    for (std::size_t j = 0; j < d && visited < mtry_; ++j) {
      std::swap(features_[j], features_[j + rng.below(d - j)]);
      const int f = features_[j];
      for (std::size_t i = 0; i < m; ++i) {
        keys_[i] = (static_cast<std::uint64_t>(cols_.at(f, samples_[begin + i])) << 32) | i;
      }
      std::sort(keys_.begin(), keys_.end());
      if ((keys_.front() >> 32) == (keys_.back() >> 32)) continue;  // constant here
      ++visited;

      std::fill(left.begin(), left.end(), 0.0);
      double wl = 0.0, sq_l = 0.0, sq_r = sq_total;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const auto s = samples_[begin + (keys_[i] & kPositionMask)];
        const auto c = static_cast<std::size_t>(y_[s]);
        const double w = weight_[s];
        const double rc = counts[c] - left[c];  // right count before the move
        sq_l += 2.0 * left[c] * w + w * w;
        sq_r -= 2.0 * rc * w - w * w;
        left[c] += w;
        wl += w;
        const auto r0 = static_cast<std::uint32_t>(keys_[i] >> 32);
        const auto r1 = static_cast<std::uint32_t>(keys_[i + 1] >> 32);
        if (r0 == r1) continue;
        const double proxy = sq_l / wl + sq_r / (total - wl);
        if (proxy > best.proxy) {
          best.proxy = proxy;
          best.feature = f;
          best.rank = r0;
          const auto& values = cols_.distinct[static_cast<std::size_t>(f)];
          const double lo = values[r0], hi = values[r1];
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best.threshold = mid;
        }
      }
    }
    return best;
  }

  const RankedColumns& cols_;
  const std::vector<int>& y_;
  std::size_t k_;
  int mtry_;
  int min_split_;
  DecisionTree tree_;
  std::vector<double> weight_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> buffer_;
  std::vector<std::uint64_t> keys_;
  std::vector<int> features_;
};

json tree_to_json(const DecisionTree& t) {
  return {{"feature", t.feature},       {"threshold", t.threshold},   {"left", t.left},
          {"right", t.right},           {"leaf_begin", t.leaf_begin}, {"leaf_size", t.leaf_size},
          {"leaf_class", t.leaf_class}, {"leaf_probability", t.leaf_probability}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree t;
  j.at("feature").get_to(t.feature);
  j.at("threshold").get_to(t.threshold);
  j.at("left").get_to(t.left);
  j.at("right").get_to(t.right);
  j.at("leaf_begin").get_to(t.leaf_begin);
  j.at("leaf_size").get_to(t.leaf_size);
  j.at("leaf_class").get_to(t.leaf_class);
  j.at("leaf_probability").get_to(t.leaf_probability);
  const std::size_t n = t.feature.size();
  if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n ||
      t.leaf_begin.size() != n || t.leaf_size.size() != n ||
      t.leaf_class.size() != t.leaf_probability.size()) {
    throw DataError("model: inconsistent tree arrays");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (t.feature[i] >= 0) {
      const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
      if (!in_range(t.left[i]) || !in_range(t.right[i])) throw DataError("model: bad child index");
    } else if (t.leaf_begin[i] < 0 ||
               static_cast<std::size_t>(t.leaf_begin[i] + t.leaf_size[i]) > t.leaf_class.size()) {
      throw DataError("model: bad leaf range");
    }
  }
  return t;
}

}  // namespace

int DecisionTree::leaf_of(const double* row, Eigen::Index stride) const {
  int node = 0;
  while (feature[static_cast<std::size_t>(node)] >= 0) {
    const auto i = static_cast<std::size_t>(node);
    node = row[feature[i] * stride] <= threshold[i] ? left[i] : right[i];
  }
  return node;
}

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
  data.validate();
  if (data.rows() == 0) throw InvalidArgument("train_forest: empty dataset");
  const Dataset d = data.masked();
  if (d.x.cols() == 0) throw InvalidArgument("train_forest: no feature columns");
  if (params.n_estimators < 1) throw InvalidArgument("train_forest: need at least one tree");
  if (d.rows() >= static_cast<Eigen::Index>(kPositionMask)) throw InvalidArgument("train_forest: too many rows");

  ForestModel model;
  model.params_ = params;
  model.n_classes_ = d.n_classes;
  model.n_features_ = static_cast<int>(d.x.cols());
  const int mtry = params.max_features > 0
                       ? std::min(params.max_features, model.n_features_)
                       : std::max(1, static_cast<int>(std::sqrt(static_cast<double>(model.n_features_))));

  const RankedColumns cols = rank_columns(d.x, params.threads);
  const auto trees = static_cast<std::size_t>(params.n_estimators);
  model.trees_.resize(trees);
  std::vector<std::vector<double>> importance(trees);
  parallel_for(trees, params.threads, [&](std::size_t t) {
    TreeBuilder builder(cols, d.y, d.n_classes, mtry, std::max(2, params.min_samples_split));
    model.trees_[t] = builder.build(derive_seed(params.seed, t), params.bootstrap, importance[t]);
  });

  model.importances_ = Eigen::VectorXd::Zero(model.n_features_);
  for (const auto& imp : importance) {
    const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (!(sum > 0.0)) continue;
    for (std::size_t f = 0; f < imp.size(); ++f) model.importances_(static_cast<Eigen::Index>(f)) += imp[f] / sum;
  }
  model.importances_ /= static_cast<double>(trees);
  const double total = model.importances_.sum();
  if (total > 0.0) model.importances_ /= total;
  return model;
}

Eigen::MatrixXd ForestModel::predict_proba(const Eigen::MatrixXd& x) const {
  if (trees_.empty()) throw InvalidArgument("predict_proba: untrained model");
  if (x.cols() != n_features_) {
    throw InvalidArgument("predict_proba: model expects " + std::to_string(n_features_) +
                          " columns, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), n_classes_);
  const double scale = 1.0 / static_cast<double>(trees_.size());
  parallel_for(static_cast<std::size_t>(x.rows()), params_.threads, [&](std::size_t r) {
    const auto row = static_cast<Eigen::Index>(r);
    for (const auto& tree : trees_) {
      const auto leaf = static_cast<std::size_t>(tree.leaf_of(x.data() + row, x.rows()));
      const auto b = static_cast<std::size_t>(tree.leaf_begin[leaf]);
      for (std::size_t j = 0; j < static_cast<std::size_t>(tree.leaf_size[leaf]); ++j) {
        out(row, tree.leaf_class[b + j]) += tree.leaf_probability[b + j];
      }
    }
    out.row(row) *= scale;
  });
  return out;
}

std::vector<int> ForestModel::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd p = predict_proba(x);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c) {
      if (p(r, c) > p(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

std::string ForestModel::to_json() const {
  json j;
  j["format"] = "fpsel-forest/1";
  j["n_classes"] = n_classes_;
  j["n_features"] = n_features_;
  j["params"] = {{"n_estimators", params_.n_estimators},
                 {"seed", params_.seed},
                 {"min_samples_split", params_.min_samples_split},
                 {"max_features", params_.max_features},
                 {"bootstrap", params_.bootstrap}};
  j["registry_hash"] = registry_hash;
  j["feature_names"] = feature_names;
  j["importances"] = std::vector<double>(importances_.data(), importances_.data() + importances_.size());
  j["trees"] = json::array();
  for (const auto& t : trees_) j["trees"].push_back(tree_to_json(t));
  return j.dump();
}

ForestModel ForestModel::from_json(const std::string& text) {
  ForestModel m;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "fpsel-forest/1") throw DataError("model: unknown format");
    m.n_classes_ = j.at("n_classes").get<int>();
    m.n_features_ = j.at("n_features").get<int>();
    const auto& p = j.at("params");
    m.params_.n_estimators = p.at("n_estimators").get<int>();
    m.params_.seed = p.at("seed").get<std::uint64_t>();
    m.params_.min_samples_split = p.at("min_samples_split").get<int>();
    m.params_.max_features = p.at("max_features").get<int>();
    m.params_.bootstrap = p.at("bootstrap").get<bool>();
    m.registry_hash = j.at("registry_hash").get<std::string>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto imp = j.at("importances").get<std::vector<double>>();
    m.importances_ = Eigen::Map<const Eigen::VectorXd>(imp.data(), static_cast<Eigen::Index>(imp.size()));
    for (const auto& t : j.at("trees")) m.trees_.push_back(tree_from_json(t));
  } catch (const json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  if (m.n_classes_ < 1 || m.n_features_ < 1 || m.trees_.empty() ||
      m.importances_.size() != m.n_features_) {
    throw DataError("model: inconsistent header");
  }
  for (const auto& t : m.trees_) {
    for (std::size_t i = 0; i < t.node_count(); ++i) {
      if (t.feature[i] >= m.n_features_) throw DataError("model: feature index out of range");
    }
    for (int c : t.leaf_class) {
      if (c < 0 || c >= m.n_classes_) throw DataError("model: class index out of range");
    }
  }
  return m;
}

void ForestModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model " + path.string());
  out << to_json() << '\n';
}

ForestModel ForestModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json(text.str());
}

}  // namespace fpsel
