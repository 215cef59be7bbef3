#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fpsel/common/error.hpp"
#include "fpsel/common/rng.hpp"
#include "fpsel/select/correlation.hpp"
#include "fpsel/select/importance.hpp"
#include "fpsel/select/rfe.hpp"

using namespace fpsel;

namespace {

// Columns [0, informative) carry the class, the rest are noise.
Dataset planted(std::uint64_t seed, int n, int d, int informative, int classes = 2) {
  Rng rng(seed);
  Dataset data{Eigen::MatrixXd(n, d), std::vector<int>(static_cast<std::size_t>(n)), classes, {}};
  for (int i = 0; i < n; ++i) {
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    data.y[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < d; ++j) data.x(i, j) = rng.normal(j < informative ? 1.2 * c : 0.0, 1.0);
  }
  return data;
}

// Welch-style class mean separation of one column.
double separation(const Dataset& data, int column) {
  double s[2] = {0, 0}, q[2] = {0, 0}, n[2] = {0, 0};
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int c = data.y[static_cast<std::size_t>(i)];
    s[c] += data.x(i, column);
    q[c] += data.x(i, column) * data.x(i, column);
    n[c] += 1;
  }
  const double m0 = s[0] / n[0], m1 = s[1] / n[1];
  const double v0 = q[0] / n[0] - m0 * m0, v1 = q[1] / n[1] - m1 * m1;
  return std::abs(m1 - m0) / std::sqrt(v0 / n[0] + v1 / n[1]);
}

const ForestParams kSmall{.n_estimators = 30};

}  // namespace

TEST(Rfe, PlantedFeaturesSurvive) {
  const Dataset data = planted(42, 400, 10, 2);
  for (int j = 0; j < 10; ++j) {
    if (j < 2) EXPECT_GT(separation(data, j), 8.0) << j;
    else EXPECT_LT(separation(data, j), 3.0) << j;
  }
  const RfeTrace trace = rfe_cv(data, {}, {}, kSmall);
  ASSERT_EQ(trace.iterations.size(), 10u);
  EXPECT_TRUE(std::count(trace.chosen.begin(), trace.chosen.end(), 0u));
  EXPECT_TRUE(std::count(trace.chosen.begin(), trace.chosen.end(), 1u));
}

TEST(Rfe, TraceInvariants) {
  const Dataset data = planted(3, 200, 12, 3);
  const RfeTrace trace = rfe_cv(data, {}, {}, kSmall);
  ASSERT_EQ(trace.iterations.size(), 12u);
  std::set<std::size_t> removed;
  double best = -1.0;
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    EXPECT_EQ(it.size, 12u - i);
    ASSERT_EQ(it.removed.size(), 1u);
    EXPECT_TRUE(removed.insert(it.removed[0]).second);
    best = std::max(best, it.mean_accuracy);
  }
  EXPECT_EQ(removed.size(), 12u);
  EXPECT_EQ(trace.chosen_accuracy, best);
  EXPECT_EQ(trace.chosen.size(), trace.iterations[trace.chosen_iteration].size);
  // Ties resolve to the smallest set: no later round reaches the best score.
  for (std::size_t i = trace.chosen_iteration + 1; i < trace.iterations.size(); ++i) {
    EXPECT_LT(trace.iterations[i].mean_accuracy, best);
  }
  // The chosen set is what remained before the chosen round removed anything.
  std::set<std::size_t> alive;
  for (std::size_t i = trace.chosen_iteration; i < trace.iterations.size(); ++i) {
    alive.insert(trace.iterations[i].removed.begin(), trace.iterations[i].removed.end());
  }
  EXPECT_EQ(std::vector<std::size_t>(alive.begin(), alive.end()), trace.chosen);
}

TEST(Rfe, RerunOnChosenSubsetIsStable) {
  Dataset data = planted(5, 300, 15, 3);
  const RfeTrace trace = rfe_cv(data, {}, {}, kSmall);
  data.mask = trace.chosen;
  const RfeTrace again = rfe_cv(data, {}, {}, kSmall);
  EXPECT_NEAR(again.chosen_accuracy, trace.chosen_accuracy, 0.02);
  for (const auto& it : again.iterations) {
    for (std::size_t id : it.removed) EXPECT_TRUE(std::count(trace.chosen.begin(), trace.chosen.end(), id));
  }
}

TEST(Rfe, DegenerateSizes) {
  Dataset one = planted(7, 50, 1, 1);
  const RfeTrace t1 = rfe_cv(one, {}, {}, kSmall);
  ASSERT_EQ(t1.iterations.size(), 1u);
  EXPECT_EQ(t1.chosen, std::vector<std::size_t>{0});

  const Dataset six = planted(8, 50, 6, 2);
  const RfeTrace t6 = rfe_cv(six, {.step = 6}, {}, kSmall);
  ASSERT_EQ(t6.iterations.size(), 1u);
  EXPECT_EQ(t6.chosen.size(), 6u);
  EXPECT_EQ(rfe_cv(six, {.step = 50}, {}, kSmall).iterations.size(), 1u);
  EXPECT_THROW(rfe_cv(six, {.step = 0}, {}, kSmall), InvalidArgument);
}

TEST(Rfe, StepCountsRounds) {
  const Dataset data = planted(9, 60, 20, 2);
  const RfeTrace trace = rfe_cv(data, {.step = 5}, {}, {.n_estimators = 5});
  ASSERT_EQ(trace.iterations.size(), 4u);
  EXPECT_EQ(trace.iterations.back().size, 5u);

  std::ostringstream out;
  write_rfe_trace(out, trace);
  std::string line;
  std::istringstream in(out.str());
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 5);
}

TEST(Rfe, AcceleratedSchedule) {
  const auto s = RfeSchedule::accelerated();
  std::size_t active = 1556, rounds = 0;
  while (active > 200) {
    const std::size_t k = s.removal(active);
    EXPECT_EQ(k, std::min<std::size_t>(static_cast<std::size_t>(std::ceil(0.05 * active)), active - 200));
    active -= k;
    ++rounds;
  }
  EXPECT_EQ(active, 200u);
  EXPECT_EQ(s.removal(200), 1u);
  EXPECT_EQ(RfeSchedule{.step = 5}.removal(3), 3u);
}

TEST(Rfe, MaskedStartSet) {
  Dataset data = planted(10, 100, 8, 2);
  data.mask = std::vector<std::size_t>{7, 1, 5};
  const RfeTrace trace = rfe_cv(data, {}, {}, kSmall);
  ASSERT_EQ(trace.iterations.size(), 3u);
  std::set<std::size_t> removed;
  for (const auto& it : trace.iterations) removed.insert(it.removed.begin(), it.removed.end());
  EXPECT_EQ(removed, (std::set<std::size_t>{1, 5, 7}));
}

TEST(Rfe, SelectionJsonRoundTrip) {
  const FeatureSelection s{"hash", {"a", "b"}, {3, 9}};
  const auto back = FeatureSelection::from_json(s.to_json());
  EXPECT_EQ(back.names, s.names);
  EXPECT_EQ(back.indices, s.indices);
  EXPECT_EQ(back.registry_hash, "hash");
  EXPECT_THROW(FeatureSelection::from_json("[]"), DataError);
}

namespace {

// Only the first 12 columns carry the class, so subsets differ in how much
// signal they hold.
Dataset graded(std::uint64_t seed, int n, int d) {
  Rng rng(seed);
  Dataset data{Eigen::MatrixXd(n, d), std::vector<int>(static_cast<std::size_t>(n)), 3, {}};
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    data.y[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < d; ++j) {
      const double shift = j < 12 ? 0.6 * c : 0.0;
      data.x(i, j) = rng.normal(shift, 1.0);
    }
  }
  return data;
}

}  // namespace

TEST(Correlation, SameTaskCorrelatesStrongly) {
  // Same rows and task; only the fold shuffle differs between the sides.
  const Dataset data = graded(21, 600, 80);
  CorrelationOptions opt;
  opt.min_size = 2;
  opt.max_size = 40;
  opt.fp_plan = FoldPlan{.seed = 7};
  opt.fp_score = Score::accuracy;
  opt.forest.n_estimators = 50;
  const auto result = correlation_study(data, data, 40, 5, opt);
  ASSERT_EQ(result.table.size(), 40u);
  EXPECT_GT(result.pearson.r, 0.95);
  for (const auto& row : result.table) {
    EXPECT_GE(row.features.size(), 2u);
    EXPECT_LE(row.features.size(), 40u);
    EXPECT_TRUE(std::is_sorted(row.features.begin(), row.features.end()));
  }
}

TEST(Correlation, CoinFlipLabelsDoNotCorrelate) {
  const Dataset data = graded(22, 240, 80);
  Rng rng(23);
  Dataset coin{Eigen::MatrixXd(240, 160), std::vector<int>(240), 2, {}};
  for (Eigen::Index i = 0; i < 240; ++i) {
    for (Eigen::Index j = 0; j < 80; ++j) {
      coin.x(i, 2 * j) = data.x(i, j);
      coin.x(i, 2 * j + 1) = -data.x(i, j);
    }
    coin.y[static_cast<std::size_t>(i)] = rng.bernoulli(0.5);
  }
  CorrelationOptions opt;
  opt.min_size = 2;
  opt.max_size = 40;
  opt.fp_group = 2;
  opt.forest.n_estimators = 20;
  opt.threads = 4;
  const auto result = correlation_study(data, coin, 100, 6, opt);
  EXPECT_LT(std::abs(result.pearson.r), 0.2);

  opt.threads = 1;
  const auto serial = correlation_study(data, coin, 100, 6, opt);
  for (std::size_t s = 0; s < serial.table.size(); ++s) {
    EXPECT_EQ(serial.table[s].surrogate, result.table[s].surrogate);
    EXPECT_EQ(serial.table[s].fp, result.table[s].fp);
  }
}

TEST(Correlation, Errors) {
  const Dataset data = graded(24, 60, 20);
  EXPECT_THROW(correlation_study(data, data, 2, 1), InvalidArgument);
  Dataset other = data;
  other.x.conservativeResize(Eigen::NoChange, 19);
  EXPECT_THROW(correlation_study(data, other, 5, 1), InvalidArgument);
}

TEST(Importance, TopFeatures) {
  Eigen::VectorXd imp(5);
  imp << 0.1, 0.3, 0.3, 0.0, 0.3;
  EXPECT_EQ(top_features(imp, 3), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(top_features(imp, 9).size(), 5u);
}

TEST(Importance, PhaseGroupsCoverEveryPhaseFeature) {
  const auto& reg = default_registry();
  const auto groups = phase_groups(reg);
  // Direct count: names on phase a outside phase_diff.
  std::size_t expected = 0;
  for (const auto& name : reg.names()) {
    if (name.rfind("phase_diff.", 0) == 0) continue;
    for (const char* ch : {"|va|", "|ia|", "|Za|", "|Sa|"}) expected += name.find(ch) != std::string::npos;
  }
  EXPECT_EQ(groups.size(), expected);
  for (const auto& g : groups) {
    const auto a = FeatureId::parse(reg.names()[g.members[0]]);
    const auto c = FeatureId::parse(reg.names()[g.members[2]]);
    EXPECT_EQ(a.variant, c.variant);
    EXPECT_EQ(a.aggregation, c.aggregation);
    EXPECT_EQ(a.channel[1], 'a');
    EXPECT_EQ(c.channel[1], 'c');
  }
  Eigen::VectorXd imp = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(reg.size()));
  imp(static_cast<Eigen::Index>(groups[4].members[0])) = 0.2;
  imp(static_cast<Eigen::Index>(groups[4].members[1])) = 0.1;
  imp(static_cast<Eigen::Index>(groups[4].members[2])) = 0.4;
  const auto sym = phase_symmetry(imp, reg, 2);
  ASSERT_EQ(sym.size(), 2u);
  EXPECT_EQ(sym[0].key, groups[4].key);
  EXPECT_DOUBLE_EQ(sym[0].ratio, 4.0);
  EXPECT_TRUE(std::isinf(sym[1].ratio));
}
