#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>
#include <numbers>

#include "fpsel/common/error.hpp"
#include "fpsel/signal/waveform.hpp"

namespace fpsel {

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// Peak-convention phasor.
struct Phasor {
  double magnitude = 0.0;
  double angle = 0.0;

  std::complex<double> value() const { return std::polar(magnitude, angle); }

  static Phasor from_complex(std::complex<double> z) {
    const double m = std::abs(z);
    return {m, m == 0.0 ? 0.0 : wrap_angle(std::arg(z))};
  }
};

/// Single DFT bin X_k = sum_n x[n] exp(-j 2 pi k n / S) over the S samples
/// of `x`.
template <typename Derived>
std::complex<typename Derived::Scalar> dft_bin(const Eigen::MatrixBase<Derived>& x, int k) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = x.size();
  Scalar re = 0, im = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const Scalar phase = Scalar(2) * std::numbers::pi_v<Scalar> *
                         Scalar((static_cast<Eigen::Index>(k) * t) % n) / Scalar(n);
    re += x(t) * std::cos(phase);
    im -= x(t) * std::sin(phase);
  }
  return {re, im};
}

/// Peak phasor of harmonic k over exactly one cycle: magnitude 2|X_k|/S,
/// angle arg(X_k) relative to the first sample (a cosine reference).
template <typename Derived>
Phasor cycle_phasor(const Eigen::MatrixBase<Derived>& cycle, int k = 1) {
  const auto bin = dft_bin(cycle, k);
  return Phasor::from_complex(std::complex<double>(bin) * (2.0 / static_cast<double>(cycle.size())));
}

Phasor fundamental_phasor(const CycleFrame& frame, Channel channel);

/// sqrt(mean(x^2)); throws InvalidArgument for an empty series.
template <typename Derived>
typename Derived::Scalar window_rms(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) throw InvalidArgument("window_rms: empty series");
  return std::sqrt(x.squaredNorm() / static_cast<typename Derived::Scalar>(x.size()));
}

}  // namespace fpsel
