#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "fpsel/signal/waveform.hpp"

namespace fixture {

/// amplitude * sin(2 pi h f t + phase) sampled at `rate` for n samples.
inline Eigen::RowVectorXd tone(Eigen::Index n, double rate, double amplitude, int harmonic = 1,
                               double phase = 0.0, double fundamental = 50.0) {
  Eigen::RowVectorXd x(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    x(t) = amplitude * std::sin(2.0 * std::numbers::pi * harmonic * fundamental *
                                    static_cast<double>(t) / rate +
                                phase);
  }
  return x;
}

/// Balanced three-phase voltages/currents with the given current lag.
inline fpsel::Samples balanced(Eigen::Index n, double rate, double v_peak, double i_peak,
                               double current_lag = 0.0) {
  fpsel::Samples s = fpsel::Samples::Zero(fpsel::kChannelCount, n);
  const double shift = 2.0 * std::numbers::pi / 3.0;
  for (int p = 0; p < 3; ++p) {
    s.row(p) = tone(n, rate, v_peak, 1, -p * shift);
    s.row(4 + p) = tone(n, rate, i_peak, 1, -p * shift - current_lag);
  }
  s.row(3) = (s.row(0) + s.row(1) + s.row(2)) / 3.0;
  s.row(7) = (s.row(4) + s.row(5) + s.row(6)) / 3.0;
  return s;
}

}  // namespace fixture
