#include "fpsel/select/importance.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace fpsel {

std::vector<std::size_t> top_features(const Eigen::Ref<const Eigen::VectorXd>& importances,
                                      std::size_t k) {
  std::vector<std::size_t> order(static_cast<std::size_t>(importances.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return importances(static_cast<Eigen::Index>(a)) > importances(static_cast<Eigen::Index>(b));
  });
  order.resize(std::min(k, order.size()));
  return order;
}

namespace {

// Phase slot of a channel name, or -1.
int phase_of(const std::string& channel) {
  if (channel.size() != 2) return -1;
  const char p = channel[1];
  if (p < 'a' || p > 'c') return -1;
  const char kind = channel[0];
  if (kind != 'v' && kind != 'i' && kind != 'Z' && kind != 'S') return -1;
  return p - 'a';
}

}  // namespace

std::vector<PhaseGroup> phase_groups(const FeatureRegistry& registry) {
  std::map<std::string, std::array<std::size_t, 3>> found;
  std::map<std::string, int> seen;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    FeatureId id = registry[i];
    if (id.family == Family::phase_diff) continue;
    const int phase = phase_of(id.channel);
    if (phase < 0) continue;
    id.channel = std::string(1, id.channel[0]) + "*";
    const std::string key = id.canonical();
    if (!seen.count(key)) order.push_back(key);
    found[key][static_cast<std::size_t>(phase)] = i;
    seen[key] |= 1 << phase;
  }
  std::vector<PhaseGroup> groups;
  for (const auto& key : order) {
    if (seen[key] == 7) groups.push_back({key, found[key]});
  }
  return groups;
}

std::vector<PhaseSymmetry> phase_symmetry(const Eigen::Ref<const Eigen::VectorXd>& importances,
                                          const FeatureRegistry& registry, std::size_t top) {
  std::vector<PhaseSymmetry> rows;
  for (const auto& g : phase_groups(registry)) {
    PhaseSymmetry s{g.key, {}, 0.0};
    for (std::size_t p = 0; p < 3; ++p) s.importance[p] = importances(static_cast<Eigen::Index>(g.members[p]));
    const auto [lo, hi] = std::minmax_element(s.importance.begin(), s.importance.end());
    s.ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    rows.push_back(s);
  }
  auto total = [](const PhaseSymmetry& s) { return s.importance[0] + s.importance[1] + s.importance[2]; };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const PhaseSymmetry& a, const PhaseSymmetry& b) { return total(a) > total(b); });
  rows.resize(std::min(top, rows.size()));
  return rows;
}

}  // namespace fpsel
