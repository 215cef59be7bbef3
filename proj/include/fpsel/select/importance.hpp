#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fpsel/features/registry.hpp"

namespace fpsel {

/// Indices sorted by descending importance (ties to the lower index),
/// truncated to `k`.
std::vector<std::size_t> top_features(const Eigen::Ref<const Eigen::VectorXd>& importances,
                                      std::size_t k);

/// Three registry entries that differ only in the phase of their channel
/// (va/vb/vc, ia/ib/ic, Za/Zb/Zc, Sa/Sb/Sc). Phase differences are left out
/// because they are measured against va.
struct PhaseGroup {
  std::string key;
  std::array<std::size_t, 3> members{};
};

std::vector<PhaseGroup> phase_groups(const FeatureRegistry& registry);

struct PhaseSymmetry {
  std::string key;
  std::array<double, 3> importance{};
  /// max / min over the phases; infinite when a phase scored zero.
  double ratio = 0.0;
};

/// The `top` phase groups by summed importance.
std::vector<PhaseSymmetry> phase_symmetry(const Eigen::Ref<const Eigen::VectorXd>& importances,
                                          const FeatureRegistry& registry, std::size_t top);

}  // namespace fpsel
