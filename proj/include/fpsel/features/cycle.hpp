#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <vector>

#include "fpsel/features/registry.hpp"
#include "fpsel/features/stats.hpp"
#include "fpsel/signal/phasor.hpp"
#include "fpsel/signal/waveform.hpp"

namespace fpsel {

/// A ratio feature plus whether its sentinel path was taken.
struct Flagged {
  double value = 0.0;
  bool flagged = false;
};

using HarmonicBins = std::array<std::complex<double>, kHarmonicOrders.size()>;
using HarmonicAmplitudes = std::array<double, kHarmonicOrders.size()>;

/// DFT at the computed harmonic orders with a precomputed twiddle table
/// for one cycle length.
class CycleDft {
 public:
  explicit CycleDft(int samples_per_cycle);

  int samples_per_cycle() const { return samples_per_cycle_; }

  /// Raw bins X_k for k in kHarmonicOrders.
  HarmonicBins bins(const Eigen::Ref<const Eigen::RowVectorXd>& cycle) const;

  /// 2|X_k|/S for k in kHarmonicOrders.
  HarmonicAmplitudes amplitudes(const HarmonicBins& bins) const;

  /// Peak phasor of bin index 0 (the fundamental).
  Phasor fundamental(const HarmonicBins& bins) const;

 private:
  int samples_per_cycle_;
  Eigen::MatrixXd cos_;  // orders x S
  Eigen::MatrixXd sin_;
};

HarmonicAmplitudes harmonic_amplitudes(const CycleFrame& frame, Channel channel);

/// sqrt(sum_{k>1} h_k^2) / h_1, or 0 flagged when h_1 < epsilon.
Flagged thd_from_amplitudes(const HarmonicAmplitudes& h, double epsilon);
Flagged thd(const CycleFrame& frame, Channel channel);

/// wrap(angle(x) - angle(ref)); 0 flagged when either magnitude is below its
/// epsilon.
Flagged phase_difference(const Phasor& x, const Phasor& ref, double x_epsilon,
                         double ref_epsilon);
Flagged phase_diff(const CycleFrame& frame, Channel channel);

enum CycleStatFlag : unsigned {
  kZeroSpread = 1u << 0,
  kZeroRms = 1u << 1,
  kZeroMeanAbs = 1u << 2,
};

struct CycleStats {
  /// Order of kCycleStatVariants.
  std::array<double, kCycleStatVariants.size()> values{};
  unsigned flags = 0;
};

template <typename Derived>
CycleStats per_cycle_stats(const Eigen::DenseBase<Derived>& x) {
  const Summary s = summarize(x);
  CycleStats out;
  const Eigen::Index n = x.size();
  double sq = 0.0, abs_sum = 0.0, peak = 0.0, delta = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double v = static_cast<double>(x(t));
    sq += v * v;
    abs_sum += std::abs(v);
    peak = std::max(peak, std::abs(v));
    if (t + 1 < n) delta = std::max(delta, std::abs(static_cast<double>(x(t + 1)) - v));
  }
  const double rms = std::sqrt(sq / static_cast<double>(n));
  const double mean_abs = abs_sum / static_cast<double>(n);
  double crest = 0.0, form = 0.0;
  if (rms > 0.0) {
    crest = peak / rms;
  } else {
    out.flags |= kZeroRms;
  }
  if (mean_abs > 0.0) {
    form = rms / mean_abs;
  } else {
    out.flags |= kZeroMeanAbs;
  }
  if (s.zero_spread) out.flags |= kZeroSpread;
  out.values = {s.max, s.min, s.mean, s.std, s.skew, s.kurt, crest, form, delta, rms};
  return out;
}

CycleStats per_cycle_stats(const CycleFrame& frame, Channel channel);

/// Fortescue magnitudes (|X0|, |X1|, |X2|) with a = exp(j 2pi/3) and 1/3
/// scaling.
std::array<double, 3> sequence_magnitudes(std::complex<double> a, std::complex<double> b,
                                          std::complex<double> c);

/// (|U0|, |U1|, |U2|, |I0|, |I1|, |I2|).
std::array<double, 6> symmetric_components(const std::array<Phasor, 3>& voltages,
                                           const std::array<Phasor, 3>& currents);

struct ImpedanceRX {
  double r = 0.0;
  double x = 0.0;
  bool flagged = false;
};

/// Z = V / I; (0, 0) flagged when |I| < epsilon.
ImpedanceRX impedance_rx(const Phasor& v, const Phasor& i, double epsilon);

struct PowerPQ {
  double p = 0.0;
  double q = 0.0;
};

/// S = V conj(I) with RMS phasors; Q > 0 for lagging (inductive) current.
PowerPQ power_pq(const Phasor& v, const Phasor& i);

}  // namespace fpsel
