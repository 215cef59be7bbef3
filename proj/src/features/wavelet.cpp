#include "fpsel/features/wavelet.hpp"

#include <string>

#include "fpsel/common/error.hpp"

namespace fpsel {

std::vector<Eigen::VectorXd> swt(const Eigen::Ref<const Eigen::VectorXd>& x, int levels) {
  const Eigen::Index n = x.size();
  if (levels < 1 || levels > 30) throw InvalidArgument("swt: levels out of range");
  if (n < (Eigen::Index{1} << levels)) {
    throw InvalidArgument("swt: series of " + std::to_string(n) + " samples is shorter than 2^" +
                          std::to_string(levels));
  }
  std::vector<Eigen::VectorXd> bands;
  bands.reserve(static_cast<std::size_t>(levels) + 1);
  Eigen::VectorXd approx = x;
  Eigen::VectorXd next(n);
  constexpr auto taps = static_cast<Eigen::Index>(kDb4Lowpass.size());
  std::array<Eigen::Index, taps> offset{};
  for (int j = 1; j <= levels; ++j) {
    const Eigen::Index step = Eigen::Index{1} << (j - 1);
    for (Eigen::Index k = 0; k < taps; ++k) offset[static_cast<std::size_t>(k)] = (k * step) % n;
    Eigen::VectorXd detail(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t k = 0; k < kDb4Lowpass.size(); ++k) {
        Eigen::Index idx = t + offset[k];
        if (idx >= n) idx -= n;
        lo += kDb4Lowpass[k] * approx(idx);
        hi += kDb4Highpass[k] * approx(idx);
      }
      next(t) = lo;
      detail(t) = hi;
    }
    bands.push_back(std::move(detail));
    approx.swap(next);
  }
  bands.push_back(std::move(approx));
  return bands;
}

}  // namespace fpsel
