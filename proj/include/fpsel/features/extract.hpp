#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsel/features/registry.hpp"
#include "fpsel/signal/waveform.hpp"

namespace fpsel {

/// Values aligned to the default registry, plus provenance and sentinel
/// diagnostics.
struct FeatureVector {
  Eigen::VectorXd values;
  std::optional<TimePoint> window_start;
  std::string kind;
  /// `family.variant|channel` -> number of cycles (or windows) whose
  /// sentinel path fired. Keys ending in `|moments` count zero-spread
  /// aggregations.
  std::map<std::string, int> diagnostics;

  int flag_count() const;
};

/// Full 1556-feature vector for one window (at least 2 cycles, at least
/// 256 samples, more than 26 samples per cycle).
FeatureVector extract_window(const WaveformWindow& window, std::string kind = {});

/// Parallel extraction; output order equals input order and values are
/// bit-identical for any thread count.
std::vector<FeatureVector> extract_batch(std::span<const WaveformWindow> windows, int threads);

/// Stacks vectors as rows.
Eigen::MatrixXd to_matrix(std::span<const FeatureVector> vectors);

}  // namespace fpsel
