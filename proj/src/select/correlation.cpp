#include "fpsel/select/correlation.hpp"

#include <algorithm>
#include <numeric>

#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/common/rng.hpp"

namespace fpsel {

CorrelationResult correlation_study(const Dataset& surrogate, const Dataset& fp, int n_subsets,
                                    std::uint64_t seed, const CorrelationOptions& options) {
  if (n_subsets < 3) throw InvalidArgument("correlation_study: need at least 3 subsets");
  if (options.fp_group < 1) throw InvalidArgument("correlation_study: fp_group must be >= 1");
  surrogate.validate();
  fp.validate();
  if (surrogate.mask || fp.mask) throw InvalidArgument("correlation_study: masks are not supported");
  const auto d = static_cast<std::size_t>(surrogate.x.cols());
  if (static_cast<std::size_t>(fp.x.cols()) != d * options.fp_group) {
    throw InvalidArgument("correlation_study: datasets do not share the feature set");
  }
  const std::size_t hi = std::min(options.max_size, d);
  const std::size_t lo = std::min(options.min_size, hi);
  if (lo < 1) throw InvalidArgument("correlation_study: empty subsets");

  // All draws happen up front so the table does not depend on scheduling.
  Rng rng(seed);
  std::vector<std::size_t> pool(d);
  CorrelationResult result;
  result.table.resize(static_cast<std::size_t>(n_subsets));
  for (auto& row : result.table) {
    const auto size = static_cast<std::size_t>(rng.integer(static_cast<long long>(lo), static_cast<long long>(hi)));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(d - i)]);
    row.features.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(row.features.begin(), row.features.end());
  }

  const std::vector<Fold> s_folds = make_folds(options.surrogate_plan, surrogate.y);
  const std::vector<Fold> f_folds = make_folds(options.fp_plan, fp.y);
  ForestParams forest = options.forest;
  if (options.threads > 1) forest.threads = 1;

  parallel_for(result.table.size(), options.threads, [&](std::size_t s) {
    SubsetScore& row = result.table[s];
    Dataset sd{select_columns(surrogate.x, row.features), surrogate.y, surrogate.n_classes, {}};
    row.surrogate = cross_validate(sd, s_folds, forest, options.surrogate_score).mean;

    std::vector<std::size_t> cols;
    cols.reserve(row.features.size() * options.fp_group);
    for (std::size_t f : row.features) {
      for (std::size_t g = 0; g < options.fp_group; ++g) cols.push_back(f * options.fp_group + g);
    }
    Dataset fd{select_columns(fp.x, cols), fp.y, fp.n_classes, {}};
    row.fp = cross_validate(fd, f_folds, forest, options.fp_score).mean;
  });

  std::vector<double> a, b;
  for (const auto& row : result.table) {
    a.push_back(row.surrogate);
    b.push_back(row.fp);
  }
  result.pearson = pearson(a, b);
  return result;
}

}  // namespace fpsel
