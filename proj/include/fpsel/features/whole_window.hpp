#pragma once

#include <Eigen/Core>

#include "fpsel/features/cycle.hpp"

namespace fpsel {

/// Pearson correlation between x[0, N-lag) and x[lag, N); 0 flagged when
/// either segment is constant.
Flagged autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index lag);

/// Shannon entropy (natural log) of an equal-width histogram over
/// [min, max]; the top edge belongs to the last bin. Constant input gives 0.
double binned_entropy(const Eigen::Ref<const Eigen::VectorXd>& x, int bins = 10);

/// Binned entropy of the periodogram |X_k|^2 / N (k = 0..N/2) of the
/// mean-removed series, normalised to unit sum. 0 flagged for a constant
/// series.
Flagged fourier_entropy(const Eigen::Ref<const Eigen::VectorXd>& x, int bins = 10);

/// Fraction of samples with |x| > 1.1 * RMS(x).
double outlier_ratio(const Eigen::Ref<const Eigen::VectorXd>& x);

struct WholeWindowFeatures {
  /// Order of kWholeWindowVariants.
  std::array<Flagged, kWholeWindowVariants.size()> values{};
};

WholeWindowFeatures whole_window_features(const Eigen::Ref<const Eigen::VectorXd>& x,
                                          Eigen::Index lag);

}  // namespace fpsel
