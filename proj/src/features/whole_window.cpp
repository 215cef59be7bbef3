#include "fpsel/features/whole_window.hpp"

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <vector>

namespace fpsel {

Flagged autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index lag) {
  const Eigen::Index n = x.size();
  if (lag < 1 || lag + 2 > n) {
    throw InvalidArgument("autocorrelation: lag " + std::to_string(lag) +
                          " too large for series of " + std::to_string(n));
  }
  const Eigen::Index m = n - lag;
  const auto a = x.head(m);
  const auto b = x.tail(m);
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double floor = 1e-24 * scale * scale * static_cast<double>(m);
  if (!(saa > floor) || !(sbb > floor)) return {0.0, true};
  return {std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0), false};
}

double binned_entropy(const Eigen::Ref<const Eigen::VectorXd>& x, int bins) {
  if (x.size() == 0) throw InvalidArgument("binned_entropy: empty series");
  if (bins < 1) throw InvalidArgument("binned_entropy: bins must be positive");
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (!(hi > lo)) return 0.0;
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto b = static_cast<int>((x(i) - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  double h = 0.0;
  const auto n = static_cast<double>(x.size());
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

Flagged fourier_entropy(const Eigen::Ref<const Eigen::VectorXd>& x, int bins) {
  const Eigen::Index n = x.size();
  if (n < 2) throw InvalidArgument("fourier_entropy: need at least 2 samples");
  std::vector<double> centred(static_cast<std::size_t>(n));
  const double mean = x.mean();
  for (Eigen::Index i = 0; i < n; ++i) centred[static_cast<std::size_t>(i)] = x(i) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centred);
  const Eigen::Index half = n / 2 + 1;
  Eigen::VectorXd power(half);
  for (Eigen::Index k = 0; k < half; ++k) {
    power(k) = std::norm(spectrum[static_cast<std::size_t>(k)]) / static_cast<double>(n);
  }
  const double total = power.sum();
  if (!(total > 0.0)) return {0.0, true};
  power /= total;
  return {binned_entropy(power, bins), false};
}

double outlier_ratio(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) throw InvalidArgument("outlier_ratio: empty series");
  const double limit = 1.1 * window_rms(x);
  return static_cast<double>((x.array().abs() > limit).count()) / static_cast<double>(x.size());
}

WholeWindowFeatures whole_window_features(const Eigen::Ref<const Eigen::VectorXd>& x,
                                          Eigen::Index lag) {
  WholeWindowFeatures out;
  out.values[0] = autocorrelation(x, lag);
  out.values[1] = {binned_entropy(x), false};
  out.values[2] = fourier_entropy(x);
  out.values[3] = {outlier_ratio(x), false};
  return out;
}

}  // namespace fpsel
