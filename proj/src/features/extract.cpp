#include "fpsel/features/extract.hpp"

#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/features/cycle.hpp"
#include "fpsel/features/wavelet.hpp"
#include "fpsel/features/whole_window.hpp"

namespace fpsel {
namespace {

constexpr std::array<std::pair<Channel, Channel>, 4> kVoltageCurrentPairs{
    {{Channel::va, Channel::ia},
     {Channel::vb, Channel::ib},
     {Channel::vc, Channel::ic},
     {Channel::v0, Channel::i0}}};

const CycleDft& cycle_dft(int samples_per_cycle) {
  thread_local std::optional<CycleDft> cache;
  if (!cache || cache->samples_per_cycle() != samples_per_cycle) cache.emplace(samples_per_cycle);
  return *cache;
}

class Emitter {
 public:
  Emitter(FeatureVector& out) : out_(out) { out_.values.resize(static_cast<Eigen::Index>(kRegistrySize)); }

  void summary(const Eigen::Ref<const Eigen::RowVectorXd>& series, const std::string& key) {
    const Summary s = summarize(series);
    if (s.zero_spread) flag(key + "|moments");
    for (double v : s.values()) push(v);
  }

  void push(double v) {
    if (pos_ >= out_.values.size()) throw Error("feature emitter overflow");
    out_.values(pos_++) = v;
  }

  void flag(const std::string& key, int count = 1) {
    if (count > 0) out_.diagnostics[key] += count;
  }

  Eigen::Index position() const { return pos_; }

 private:
  FeatureVector& out_;
  Eigen::Index pos_ = 0;
};

std::string key_of(std::string_view family, std::string_view variant, std::string_view channel) {
  std::string k(family);
  k += '.';
  k += variant;
  k += '|';
  k += channel;
  return k;
}

}  // namespace

int FeatureVector::flag_count() const {
  int total = 0;
  for (const auto& [key, count] : diagnostics) total += count;
  return total;
}

FeatureVector extract_window(const WaveformWindow& window, std::string kind) {
  const int s = window.samples_per_cycle();
  const int cycles = window.cycle_count();
  if (cycles < 2) throw InvalidArgument("extract_window: need at least 2 cycles");
  const CycleDft& dft = cycle_dft(s);
  const auto& samples = window.samples();

  std::array<double, kChannelCount> eps{};
  for (int c = 0; c < kChannelCount; ++c) eps[static_cast<std::size_t>(c)] = sentinel_epsilon(window_rms(samples.row(c)));

  constexpr auto kOrders = static_cast<Eigen::Index>(kHarmonicOrders.size());
  constexpr auto kStats = static_cast<Eigen::Index>(kCycleStatVariants.size());
  const Eigen::Index n_cycles = cycles;
  Eigen::MatrixXd harm(kOrders * kChannelCount, n_cycles);
  Eigen::MatrixXd thd_v(kChannelCount, n_cycles), phi(kChannelCount, n_cycles);
  Eigen::MatrixXd stats(kStats * kChannelCount, n_cycles);
  Eigen::MatrixXd sym(6, n_cycles), res(4, n_cycles), rea(4, n_cycles), pw(4, n_cycles),
      qw(4, n_cycles);

  std::array<int, kChannelCount> thd_flags{}, phi_flags{}, spread_flags{}, crest_flags{},
      form_flags{};
  std::array<int, 4> z_flags{};

  std::array<Phasor, kChannelCount> fundamental;
  for (Eigen::Index k = 0; k < n_cycles; ++k) {
    for (int c = 0; c < kChannelCount; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const auto seg = samples.row(c).segment(k * s, s);
      const HarmonicBins bins = dft.bins(seg);
      const HarmonicAmplitudes amps = dft.amplitudes(bins);
      fundamental[cu] = dft.fundamental(bins);
      for (Eigen::Index h = 0; h < kOrders; ++h) harm(h * kChannelCount + c, k) = amps[static_cast<std::size_t>(h)];
      const Flagged t = thd_from_amplitudes(amps, eps[cu]);
      thd_v(c, k) = t.value;
      thd_flags[cu] += t.flagged;

      const CycleStats st = per_cycle_stats(seg);
      for (Eigen::Index v = 0; v < kStats; ++v) stats(v * kChannelCount + c, k) = st.values[static_cast<std::size_t>(v)];
      spread_flags[cu] += (st.flags & kZeroSpread) != 0;
      crest_flags[cu] += (st.flags & kZeroRms) != 0;
      form_flags[cu] += (st.flags & kZeroMeanAbs) != 0;
    }
    const auto va = static_cast<std::size_t>(index_of(Channel::va));
    for (int c = 0; c < kChannelCount; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const Flagged d = phase_difference(fundamental[cu], fundamental[va], eps[cu], eps[va]);
      phi(c, k) = d.value;
      phi_flags[cu] += d.flagged;
    }
    const auto at = [&](Channel ch) { return fundamental[static_cast<std::size_t>(index_of(ch))]; };
    const auto seq = symmetric_components({at(Channel::va), at(Channel::vb), at(Channel::vc)},
                                          {at(Channel::ia), at(Channel::ib), at(Channel::ic)});
    for (Eigen::Index q = 0; q < 6; ++q) sym(q, k) = seq[static_cast<std::size_t>(q)];
    for (std::size_t p = 0; p < kVoltageCurrentPairs.size(); ++p) {
      const auto [vch, ich] = kVoltageCurrentPairs[p];
      const ImpedanceRX z =
          impedance_rx(at(vch), at(ich), eps[static_cast<std::size_t>(index_of(ich))]);
      res(static_cast<Eigen::Index>(p), k) = z.r;
      rea(static_cast<Eigen::Index>(p), k) = z.x;
      z_flags[p] += z.flagged;
      const PowerPQ sp = power_pq(at(vch), at(ich));
      pw(static_cast<Eigen::Index>(p), k) = sp.p;
      qw(static_cast<Eigen::Index>(p), k) = sp.q;
    }
  }

  FeatureVector out;
  out.window_start = window.start_time();
  out.kind = std::move(kind);
  Emitter emit(out);

  // Emission follows build_registry(): variant, channel, aggregation.
  for (Eigen::Index h = 0; h < kOrders; ++h) {
    const std::string variant = "h" + std::to_string(kHarmonicOrders[static_cast<std::size_t>(h)]);
    for (Channel c : kAllChannels) {
      emit.summary(harm.row(h * kChannelCount + index_of(c)), key_of("fft_harmonic", variant, channel_name(c)));
    }
  }
  for (Channel c : kAllChannels) {
    const auto key = key_of("thd", "thd", channel_name(c));
    emit.flag(key, thd_flags[static_cast<std::size_t>(index_of(c))]);
    emit.summary(thd_v.row(index_of(c)), key);
  }
  for (Channel c : kAllChannels) {
    const auto key = key_of("phase_diff", "phi", channel_name(c));
    emit.flag(key, phi_flags[static_cast<std::size_t>(index_of(c))]);
    emit.summary(phi.row(index_of(c)), key);
  }
  for (Eigen::Index v = 0; v < kStats; ++v) {
    const auto variant = kCycleStatVariants[static_cast<std::size_t>(v)];
    for (Channel c : kAllChannels) {
      const auto cu = static_cast<std::size_t>(index_of(c));
      const auto key = key_of("cycle_stat", variant, channel_name(c));
      if (variant == "skew" || variant == "kurt") emit.flag(key, spread_flags[cu]);
      if (variant == "crest") emit.flag(key, crest_flags[cu]);
      if (variant == "form") emit.flag(key, form_flags[cu]);
      emit.summary(stats.row(v * kChannelCount + index_of(c)), key);
    }
  }
  for (Eigen::Index q = 0; q < 6; ++q) {
    emit.summary(sym.row(q), key_of("sym_component", "mag", kSequenceChannels[static_cast<std::size_t>(q)]));
  }
  for (const auto* m : {&res, &rea}) {
    const std::string_view variant = m == &res ? "R" : "X";
    for (std::size_t p = 0; p < kImpedanceChannels.size(); ++p) {
      const auto key = key_of("impedance", variant, kImpedanceChannels[p]);
      emit.flag(key, z_flags[p]);
      emit.summary(m->row(static_cast<Eigen::Index>(p)), key);
    }
  }
  for (const auto* m : {&pw, &qw}) {
    const std::string_view variant = m == &pw ? "P" : "Q";
    for (std::size_t p = 0; p < kPowerChannels.size(); ++p) {
      emit.summary(m->row(static_cast<Eigen::Index>(p)), key_of("power", variant, kPowerChannels[p]));
    }
  }

  std::array<WholeWindowFeatures, kChannelCount> whole;
  std::array<std::vector<Eigen::VectorXd>, kChannelCount> bands;
  for (int c = 0; c < kChannelCount; ++c) {
    const Eigen::VectorXd x = samples.row(c).transpose();
    whole[static_cast<std::size_t>(c)] = whole_window_features(x, s);
    bands[static_cast<std::size_t>(c)] = swt(x, kSwtLevels);
  }
  for (std::size_t v = 0; v < kWholeWindowVariants.size(); ++v) {
    for (Channel c : kAllChannels) {
      const Flagged f = whole[static_cast<std::size_t>(index_of(c))].values[v];
      if (f.flagged) emit.flag(key_of("whole_window", kWholeWindowVariants[v], channel_name(c)));
      emit.push(f.value);
    }
  }
  for (std::size_t b = 0; b < kSwtBands.size(); ++b) {
    for (Channel c : kAllChannels) {
      const auto& band = bands[static_cast<std::size_t>(index_of(c))][b];
      emit.summary(band.transpose(), key_of("swt", kSwtBands[b], channel_name(c)));
    }
  }

  if (emit.position() != static_cast<Eigen::Index>(kRegistrySize)) {
    throw Error("extract_window: emitted " + std::to_string(emit.position()) + " values");
  }
  if (!out.values.allFinite()) throw Error("extract_window: non-finite feature value");
  return out;
}

std::vector<FeatureVector> extract_batch(std::span<const WaveformWindow> windows, int threads) {
  std::vector<FeatureVector> out(windows.size());
  parallel_for(windows.size(), threads, [&](std::size_t i) { out[i] = extract_window(windows[i]); });
  return out;
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> vectors) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(kRegistrySize));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].values.size() != m.cols()) throw InvalidArgument("to_matrix: vector length mismatch");
    m.row(static_cast<Eigen::Index>(i)) = vectors[i].values.transpose();
  }
  return m;
}

}  // namespace fpsel
