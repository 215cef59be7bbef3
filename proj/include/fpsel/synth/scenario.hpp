#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fpsel/common/rng.hpp"

namespace fpsel::synth {

struct Range {
  double lo;
  double hi;
  constexpr bool contains(double x) const { return x >= lo && x <= hi; }
  double draw(Rng& rng) const { return rng.uniform(lo, hi); }
};

// Parameter ranges of the event simulation table.
namespace table {
inline constexpr Range load_mva{0.05, 2.5};
inline constexpr Range power_factor{0.80, 0.99};
inline constexpr Range capacitor_mva{0.1, 2.0};
inline constexpr Range ohl_spacing_m{0.4, 2.0};
inline constexpr Range ohl_height_m{8.0, 12.0};
inline constexpr Range ohl_length_km{1.0, 25.0};
inline constexpr Range cable_length_km{0.5, 10.0};
inline constexpr Range sat_reactance_pu{1.0, 2.0};
inline constexpr Range sat_exponent{7.0, 18.0};
inline constexpr Range knee_flux_pu{1.05, 1.25};
inline constexpr Range petersen_tuning_a{-10.0, 10.0};
inline constexpr Range grounding_ohm{0.1, 20.0};
inline constexpr Range arc_tau_s{0.2e-3, 0.4e-3};
inline constexpr Range arc_u0_v{300.0, 4000.0};
inline constexpr Range arc_r0_ohm{0.010, 0.015};
inline constexpr Range shc_ohm{0.001, 20.0};
inline constexpr Range hif_ohm{20.0, 150000.0};
inline constexpr Range incipient_s{0.002, 0.08};
}  // namespace table

// Ranges the table does not give; chosen for a 20 kV distribution feeder.
namespace assumed {
inline constexpr Range source_mva{100.0, 500.0};
inline constexpr Range source_xr{3.0, 10.0};
inline constexpr Range lv_trafo_mva{0.1, 2.5};
inline constexpr Range hv_trafo_mva{10.0, 40.0};
inline constexpr Range residual_flux_pu{0.0, 0.8};
inline constexpr Range inrush_tau_s{0.1, 1.0};
inline constexpr Range motor_lr_ratio{5.0, 7.0};
inline constexpr Range motor_accel_s{0.2, 2.0};
inline constexpr Range backfeed{0.05, 0.3};
inline constexpr Range onset_s{0.05, 0.25};
inline constexpr Range unbalance{-0.005, 0.005};
inline constexpr Range skew_rad{-0.005, 0.005};
inline constexpr Range standing_v0_rel{0.0, 0.005};
inline constexpr Range standing_i0_a{0.0, 0.5};
inline constexpr Range noise_v_rel{1e-4, 1e-3};
inline constexpr Range noise_i_a{0.01, 0.1};
inline constexpr Range hif_asymmetry{-0.2, 0.2};
inline constexpr Range fault_location{0.0, 1.0};
inline constexpr Range angle{0.0, 6.283185307179586};
}  // namespace assumed

/// One randomised operating point plus the parameters any event may need.
/// Every field is an independent uniform draw.
struct GridScenario {
  double v_ll = 20e3;
  double source_mva = 0, source_xr = 0, source_angle = 0;
  std::array<double, 3> unbalance{}, skew{};
  double standing_v0_rel = 0, standing_v0_angle = 0, standing_i0_a = 0;
  double noise_v_rel = 0, noise_i_a = 0;

  double load_mva = 0, load_pf = 0;
  double event_load_mva = 0, event_load_pf = 0;
  double capacitor_mva = 0;
  double ohl_spacing_m = 0, ohl_height_m = 0, ohl_length_km = 0, cable_length_km = 0;
  double sat_reactance_pu = 0, sat_exponent = 0, knee_flux_pu = 0;
  double residual_flux_pu = 0, residual_angle = 0, inrush_tau_s = 0;
  double lv_trafo_mva = 0, hv_trafo_mva = 0;
  bool resonant_grounding = false;
  double petersen_tuning_a = 0, grounding_ohm = 0;
  double arc_tau_s = 0, arc_u0_v = 0, arc_r0_ohm = 0;
  double shc_ohm = 0, hif_ohm = 0, incipient_s = 0, hif_asymmetry = 0;
  double fault_location = 0;
  bool fault_on_cable = false;
  int faulted_phase = 0;
  double motor_mva = 0, motor_lr_ratio = 0, motor_accel_s = 0;
  double backfeed = 0;
  double onset_s = 0;

  /// Calls f(name, value, range) for every ranged field.
  void for_each_ranged(const std::function<void(std::string_view, double, Range)>& f) const;
};

GridScenario draw_scenario(Rng& rng);

/// Event types in table order.
enum class EventType {
  inrush_lv_trafo,
  inrush_hv_trafo,
  load_on,
  load_off,
  capacitor_on,
  capacitor_off,
  ohl_on,
  ohl_off,
  cable_on,
  cable_off,
  motor_start,
  shc_1phg,
  shc_2ph,
  shc_2phg,
  shc_3ph,
  hif_1phg,
  incipient
};
inline constexpr int kEventTypeCount = 17;
inline constexpr int kClassCount = 2 * kEventTypeCount;

enum class Direction { downstream, upstream };

std::string_view to_string(EventType e);
std::optional<EventType> event_from_string(std::string_view name);

struct EventSpec {
  EventType event = EventType::load_on;
  Direction direction = Direction::downstream;
  GridScenario scenario;
  /// Stream for the event's own randomness (HIF resistance flicker).
  std::uint64_t seed = 0;

  int label() const { return 2 * static_cast<int>(event) + static_cast<int>(direction); }
};

/// `event/downstream` style name of a class label.
std::string class_name(int label);
EventSpec spec_from_label(int label, const GridScenario& scenario, std::uint64_t seed);

}  // namespace fpsel::synth
