#include "fpsel/features/cycle.hpp"

#include <numbers>

namespace fpsel {

CycleDft::CycleDft(int samples_per_cycle) : samples_per_cycle_(samples_per_cycle) {
  const int max_order = kHarmonicOrders.back();
  if (samples_per_cycle <= 2 * max_order) {
    throw InvalidArgument("harmonic analysis needs more than " + std::to_string(2 * max_order) +
                          " samples per cycle, got " + std::to_string(samples_per_cycle));
  }
  const auto n = static_cast<Eigen::Index>(samples_per_cycle);
  const auto orders = static_cast<Eigen::Index>(kHarmonicOrders.size());
  cos_.resize(orders, n);
  sin_.resize(orders, n);
  for (Eigen::Index h = 0; h < orders; ++h) {
    const auto k = static_cast<Eigen::Index>(kHarmonicOrders[static_cast<std::size_t>(h)]);
    for (Eigen::Index t = 0; t < n; ++t) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                           static_cast<double>(n);
      cos_(h, t) = std::cos(phase);
      sin_(h, t) = std::sin(phase);
    }
  }
}

HarmonicBins CycleDft::bins(const Eigen::Ref<const Eigen::RowVectorXd>& cycle) const {
  if (cycle.size() != samples_per_cycle_) {
    throw InvalidArgument("CycleDft: cycle length mismatch");
  }
  const Eigen::VectorXd re = cos_ * cycle.transpose();
  const Eigen::VectorXd im = sin_ * cycle.transpose();
  HarmonicBins out;
  for (std::size_t h = 0; h < out.size(); ++h) {
    out[h] = {re(static_cast<Eigen::Index>(h)), -im(static_cast<Eigen::Index>(h))};
  }
  return out;
}

HarmonicAmplitudes CycleDft::amplitudes(const HarmonicBins& bins) const {
  HarmonicAmplitudes out;
  const double scale = 2.0 / static_cast<double>(samples_per_cycle_);
  for (std::size_t h = 0; h < out.size(); ++h) out[h] = scale * std::abs(bins[h]);
  return out;
}

Phasor CycleDft::fundamental(const HarmonicBins& bins) const {
  return Phasor::from_complex(bins[0] * (2.0 / static_cast<double>(samples_per_cycle_)));
}

HarmonicAmplitudes harmonic_amplitudes(const CycleFrame& frame, Channel channel) {
  const CycleDft dft(frame.size());
  return dft.amplitudes(dft.bins(frame.samples(channel)));
}

Flagged thd_from_amplitudes(const HarmonicAmplitudes& h, double epsilon) {
  if (!(h[0] >= epsilon) || h[0] == 0.0) return {0.0, true};
  double sq = 0.0;
  for (std::size_t k = 1; k < h.size(); ++k) sq += h[k] * h[k];
  return {std::sqrt(sq) / h[0], false};
}

Flagged thd(const CycleFrame& frame, Channel channel) {
  const double eps = sentinel_epsilon(window_rms(frame.window().channel(channel)));
  return thd_from_amplitudes(harmonic_amplitudes(frame, channel), eps);
}

Flagged phase_difference(const Phasor& x, const Phasor& ref, double x_epsilon,
                         double ref_epsilon) {
  if (!(x.magnitude >= x_epsilon) || !(ref.magnitude >= ref_epsilon) || x.magnitude == 0.0 ||
      ref.magnitude == 0.0) {
    return {0.0, true};
  }
  return {wrap_angle(x.angle - ref.angle), false};
}

Flagged phase_diff(const CycleFrame& frame, Channel channel) {
  const auto& w = frame.window();
  return phase_difference(fundamental_phasor(frame, channel), fundamental_phasor(frame, Channel::va),
                          sentinel_epsilon(window_rms(w.channel(channel))),
                          sentinel_epsilon(window_rms(w.channel(Channel::va))));
}

CycleStats per_cycle_stats(const CycleFrame& frame, Channel channel) {
  return per_cycle_stats(frame.samples(channel));
}

std::array<double, 3> sequence_magnitudes(std::complex<double> a, std::complex<double> b,
                                          std::complex<double> c) {
  const std::complex<double> op = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const std::complex<double> op2 = op * op;
  return {std::abs((a + b + c) / 3.0), std::abs((a + op * b + op2 * c) / 3.0),
          std::abs((a + op2 * b + op * c) / 3.0)};
}

std::array<double, 6> symmetric_components(const std::array<Phasor, 3>& voltages,
                                           const std::array<Phasor, 3>& currents) {
  const auto u = sequence_magnitudes(voltages[0].value(), voltages[1].value(), voltages[2].value());
  const auto i = sequence_magnitudes(currents[0].value(), currents[1].value(), currents[2].value());
  return {u[0], u[1], u[2], i[0], i[1], i[2]};
}

ImpedanceRX impedance_rx(const Phasor& v, const Phasor& i, double epsilon) {
  if (!(i.magnitude >= epsilon) || i.magnitude == 0.0) return {0.0, 0.0, true};
  const std::complex<double> z = v.value() / i.value();
  return {z.real(), z.imag(), false};
}

PowerPQ power_pq(const Phasor& v, const Phasor& i) {
  const std::complex<double> s = v.value() * std::conj(i.value()) / 2.0;
  return {s.real(), s.imag()};
}

}  // namespace fpsel
