#include "fpsel/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpsel/common/error.hpp"
#include "fpsel/common/parallel.hpp"
#include "fpsel/common/rng.hpp"

namespace fpsel::synth {

namespace {

// Stream ids for derive_seed(seed, window, stream).
enum Stream : std::uint64_t { kScenario = 0, kEvent = 1, kNoise = 2, kSchedule = 3, kStation = 4, kFaults = 5 };

constexpr std::array<EventType, 10> kBenignEvents{
    EventType::load_on,  EventType::load_off, EventType::capacitor_on, EventType::capacitor_off,
    EventType::cable_on, EventType::cable_off, EventType::ohl_on,      EventType::ohl_off,
    EventType::motor_start, EventType::inrush_lv_trafo};

}  // namespace

SurrogateDataset gen_surrogate_dataset(int per_class, std::uint64_t seed, const SynthConfig& config, int threads) {
  if (per_class < 1) throw InvalidArgument("gen_surrogate_dataset: per_class must be >= 1");
  const auto n = static_cast<std::size_t>(per_class) * kClassCount;
  SurrogateDataset out;
  out.labels.resize(n);
  std::vector<std::optional<WaveformWindow>> slots(n);
  parallel_for(n, threads, [&](std::size_t w) {
    const int label = static_cast<int>(w / static_cast<std::size_t>(per_class));
    Rng rng(derive_seed(seed, w, kScenario));
    const EventSpec spec = spec_from_label(label, draw_scenario(rng), derive_seed(seed, w, kEvent));
    slots[w] = synth_event_window(spec, derive_seed(seed, w, kNoise), config);
    out.labels[w] = label;
  });
  out.windows.reserve(n);
  for (auto& s : slots) out.windows.push_back(std::move(*s));
  return out;
}

double precursor_probability(const RecordingConfig& c, double hours_to_fault) {
  if (hours_to_fault <= 0.0 || hours_to_fault > c.precursor_horizon_h) return c.precursor_base_rate;
  const double ramp = std::sqrt(1.0 - hours_to_fault / c.precursor_horizon_h);
  return c.precursor_base_rate + (c.precursor_peak_rate - c.precursor_base_rate) * ramp;
}

Recording::Recording(RecordingConfig config, std::vector<TimePoint> faults, std::vector<WindowKind> kinds)
    : config_(std::move(config)), faults_(std::move(faults)), kinds_(std::move(kinds)) {
  Rng rng(derive_seed(config_.station_seed.value_or(config_.seed), 0, kStation));
  station_ = draw_scenario(rng);
}

TimePoint Recording::window_time(std::size_t j) const {
  return add_seconds(config_.start, 3600.0 / config_.windows_per_hour * static_cast<double>(j));
}

GridScenario Recording::scenario(std::size_t j) const {
  Rng rng(derive_seed(config_.seed, j, kScenario));
  GridScenario s = draw_scenario(rng);
  // Network properties stay with the station; event draws vary per window.
  s.source_mva = station_.source_mva;
  s.source_xr = station_.source_xr;
  s.unbalance = station_.unbalance;
  s.skew = station_.skew;
  s.standing_v0_rel = station_.standing_v0_rel;
  s.standing_v0_angle = station_.standing_v0_angle;
  s.standing_i0_a = station_.standing_i0_a;
  s.noise_v_rel = station_.noise_v_rel;
  s.noise_i_a = station_.noise_i_a;
  s.resonant_grounding = station_.resonant_grounding;
  s.petersen_tuning_a = station_.petersen_tuning_a;
  s.grounding_ohm = station_.grounding_ohm;
  s.load_pf = station_.load_pf;
  s.ohl_length_km = station_.ohl_length_km;
  s.cable_length_km = station_.cable_length_km;
  s.fault_on_cable = station_.fault_on_cable;
  // Daily load cycle with a little scatter.
  const double hour = std::fmod(hours_between(config_.start, window_time(j)), 24.0);
  const double daily = 0.7 + 0.3 * std::sin(2.0 * std::numbers::pi * (hour - 8.0) / 24.0);
  s.load_mva = std::clamp(station_.load_mva * daily * (1.0 + 0.05 * rng.normal()), table::load_mva.lo,
                          table::load_mva.hi);
  return s;
}

EventSpec Recording::event(std::size_t j) const {
  const WindowKind k = kind(j);
  if (k == WindowKind::quiet) throw InvalidArgument("Recording::event: quiet window");
  Rng rng(derive_seed(config_.seed, j, kEvent));
  EventSpec spec;
  spec.scenario = scenario(j);
  spec.seed = derive_seed(config_.seed, j, kEvent + 16);
  if (k == WindowKind::precursor) {
    spec.event = rng.bernoulli(0.5) ? EventType::hif_1phg : EventType::incipient;
    spec.direction = Direction::downstream;
    // Recurring weak spot: the station's phase.
    spec.scenario.faulted_phase = station_.faulted_phase;
  } else if (config_.decoy_share > 0.0 && rng.bernoulli(config_.decoy_share)) {
    spec.event = rng.bernoulli(0.5) ? EventType::hif_1phg : EventType::incipient;
    spec.direction = Direction::upstream;
  } else {
    spec.event = kBenignEvents[rng.below(kBenignEvents.size())];
    spec.direction = rng.bernoulli(0.5) ? Direction::downstream : Direction::upstream;
  }
  return spec;
}

WaveformWindow Recording::window(std::size_t j) const {
  const auto noise = derive_seed(config_.seed, j, kNoise);
  if (kind(j) == WindowKind::quiet) return synth_quiet_window(scenario(j), noise, config_.synth, window_time(j));
  return synth_event_window(event(j), noise, config_.synth, window_time(j));
}

Recording gen_fp_recording(const RecordingConfig& c) {
  if (c.days <= 0.0 || c.faults < 0 || c.windows_per_hour < 1) {
    throw InvalidArgument("gen_fp_recording: days, faults and cadence must be positive");
  }
  if (c.decoy_share < 0.0 || c.decoy_share > 1.0) throw InvalidArgument("gen_fp_recording: decoy_share outside [0, 1]");
  const double span_h = c.days * 24.0;
  const double free_h = span_h - 2.0 - c.min_fault_gap_h * std::max(0, c.faults - 1);
  if (c.faults > 0 && free_h < 0.0) {
    throw InvalidArgument("gen_fp_recording: " + std::to_string(c.faults) + " faults " +
                          std::to_string(c.min_fault_gap_h) + " h apart do not fit in " +
                          std::to_string(c.days) + " days");
  }
  Rng rng(derive_seed(c.seed, 0, kFaults));
  std::vector<double> u(static_cast<std::size_t>(c.faults));
  for (auto& x : u) x = rng.uniform(0.0, free_h);
  std::sort(u.begin(), u.end());
  std::vector<TimePoint> faults;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double h = 1.0 + u[i] + c.min_fault_gap_h * static_cast<double>(i);
    faults.push_back(add_seconds(c.start, std::round(h * 3600.0)));
  }

  const auto n = static_cast<std::size_t>(std::llround(span_h * c.windows_per_hour));
  std::vector<WindowKind> kinds(n);
  std::size_t next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const TimePoint t = add_seconds(c.start, 3600.0 / c.windows_per_hour * static_cast<double>(j));
    while (next < faults.size() && faults[next] <= t) ++next;
    const double to_fault = next < faults.size() ? hours_between(t, faults[next]) : -1.0;
    Rng w(derive_seed(c.seed, j, kSchedule));
    const double u1 = w.uniform(), u2 = w.uniform();
    if (u1 < precursor_probability(c, to_fault)) kinds[j] = WindowKind::precursor;
    else if (u2 < c.benign_rate) kinds[j] = WindowKind::benign;
    else kinds[j] = WindowKind::quiet;
  }
  return Recording(c, std::move(faults), std::move(kinds));
}

}  // namespace fpsel::synth
