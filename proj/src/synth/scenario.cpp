#include "fpsel/synth/scenario.hpp"

#include <array>

#include "fpsel/common/error.hpp"

namespace fpsel::synth {

namespace {

constexpr std::array<std::string_view, kEventTypeCount> kEventNames{
    "inrush_lv_trafo", "inrush_hv_trafo", "load_on",   "load_off", "capacitor_on", "capacitor_off",
    "ohl_on",          "ohl_off",         "cable_on",  "cable_off", "motor_start", "shc_1phg",
    "shc_2ph",         "shc_2phg",        "shc_3ph",   "hif_1phg", "incipient"};

}  // namespace

void GridScenario::for_each_ranged(const std::function<void(std::string_view, double, Range)>& f) const {
  f("source_mva", source_mva, assumed::source_mva);
  f("source_xr", source_xr, assumed::source_xr);
  f("source_angle", source_angle, assumed::angle);
  for (int p = 0; p < 3; ++p) {
    f("unbalance", unbalance[static_cast<std::size_t>(p)], assumed::unbalance);
    f("skew", skew[static_cast<std::size_t>(p)], assumed::skew_rad);
  }
  f("standing_v0_rel", standing_v0_rel, assumed::standing_v0_rel);
  f("standing_v0_angle", standing_v0_angle, assumed::angle);
  f("standing_i0_a", standing_i0_a, assumed::standing_i0_a);
  f("noise_v_rel", noise_v_rel, assumed::noise_v_rel);
  f("noise_i_a", noise_i_a, assumed::noise_i_a);
  f("load_mva", load_mva, table::load_mva);
  f("load_pf", load_pf, table::power_factor);
  f("event_load_mva", event_load_mva, table::load_mva);
  f("event_load_pf", event_load_pf, table::power_factor);
  f("capacitor_mva", capacitor_mva, table::capacitor_mva);
  f("ohl_spacing_m", ohl_spacing_m, table::ohl_spacing_m);
  f("ohl_height_m", ohl_height_m, table::ohl_height_m);
  f("ohl_length_km", ohl_length_km, table::ohl_length_km);
  f("cable_length_km", cable_length_km, table::cable_length_km);
  f("sat_reactance_pu", sat_reactance_pu, table::sat_reactance_pu);
  f("sat_exponent", sat_exponent, table::sat_exponent);
  f("knee_flux_pu", knee_flux_pu, table::knee_flux_pu);
  f("residual_flux_pu", residual_flux_pu, assumed::residual_flux_pu);
  f("residual_angle", residual_angle, assumed::angle);
  f("inrush_tau_s", inrush_tau_s, assumed::inrush_tau_s);
  f("lv_trafo_mva", lv_trafo_mva, assumed::lv_trafo_mva);
  f("hv_trafo_mva", hv_trafo_mva, assumed::hv_trafo_mva);
  f("petersen_tuning_a", petersen_tuning_a, table::petersen_tuning_a);
  f("grounding_ohm", grounding_ohm, table::grounding_ohm);
  f("arc_tau_s", arc_tau_s, table::arc_tau_s);
  f("arc_u0_v", arc_u0_v, table::arc_u0_v);
  f("arc_r0_ohm", arc_r0_ohm, table::arc_r0_ohm);
  f("shc_ohm", shc_ohm, table::shc_ohm);
  f("hif_ohm", hif_ohm, table::hif_ohm);
  f("incipient_s", incipient_s, table::incipient_s);
  f("hif_asymmetry", hif_asymmetry, assumed::hif_asymmetry);
  f("fault_location", fault_location, assumed::fault_location);
  f("motor_mva", motor_mva, table::load_mva);
  f("motor_lr_ratio", motor_lr_ratio, assumed::motor_lr_ratio);
  f("motor_accel_s", motor_accel_s, assumed::motor_accel_s);
  f("backfeed", backfeed, assumed::backfeed);
  f("onset_s", onset_s, assumed::onset_s);
}

GridScenario draw_scenario(Rng& rng) {
  GridScenario s;
  s.source_mva = assumed::source_mva.draw(rng);
  s.source_xr = assumed::source_xr.draw(rng);
  s.source_angle = assumed::angle.draw(rng);
  for (int p = 0; p < 3; ++p) {
    s.unbalance[static_cast<std::size_t>(p)] = assumed::unbalance.draw(rng);
    s.skew[static_cast<std::size_t>(p)] = assumed::skew_rad.draw(rng);
  }
  s.standing_v0_rel = assumed::standing_v0_rel.draw(rng);
  s.standing_v0_angle = assumed::angle.draw(rng);
  s.standing_i0_a = assumed::standing_i0_a.draw(rng);
  s.noise_v_rel = assumed::noise_v_rel.draw(rng);
  s.noise_i_a = assumed::noise_i_a.draw(rng);
  s.load_mva = table::load_mva.draw(rng);
  s.load_pf = table::power_factor.draw(rng);
  s.event_load_mva = table::load_mva.draw(rng);
  s.event_load_pf = table::power_factor.draw(rng);
  s.capacitor_mva = table::capacitor_mva.draw(rng);
  s.ohl_spacing_m = table::ohl_spacing_m.draw(rng);
  s.ohl_height_m = table::ohl_height_m.draw(rng);
  s.ohl_length_km = table::ohl_length_km.draw(rng);
  s.cable_length_km = table::cable_length_km.draw(rng);
  s.sat_reactance_pu = table::sat_reactance_pu.draw(rng);
  s.sat_exponent = table::sat_exponent.draw(rng);
  s.knee_flux_pu = table::knee_flux_pu.draw(rng);
  s.residual_flux_pu = assumed::residual_flux_pu.draw(rng);
  s.residual_angle = assumed::angle.draw(rng);
  s.inrush_tau_s = assumed::inrush_tau_s.draw(rng);
  s.lv_trafo_mva = assumed::lv_trafo_mva.draw(rng);
  s.hv_trafo_mva = assumed::hv_trafo_mva.draw(rng);
  s.resonant_grounding = rng.bernoulli(0.5);
  s.petersen_tuning_a = table::petersen_tuning_a.draw(rng);
  s.grounding_ohm = table::grounding_ohm.draw(rng);
  s.arc_tau_s = table::arc_tau_s.draw(rng);
  s.arc_u0_v = table::arc_u0_v.draw(rng);
  s.arc_r0_ohm = table::arc_r0_ohm.draw(rng);
  s.shc_ohm = table::shc_ohm.draw(rng);
  s.hif_ohm = table::hif_ohm.draw(rng);
  s.incipient_s = table::incipient_s.draw(rng);
  s.hif_asymmetry = assumed::hif_asymmetry.draw(rng);
  s.fault_location = assumed::fault_location.draw(rng);
  s.fault_on_cable = rng.bernoulli(0.5);
  s.faulted_phase = static_cast<int>(rng.below(3));
  s.motor_mva = table::load_mva.draw(rng);
  s.motor_lr_ratio = assumed::motor_lr_ratio.draw(rng);
  s.motor_accel_s = assumed::motor_accel_s.draw(rng);
  s.backfeed = assumed::backfeed.draw(rng);
  s.onset_s = assumed::onset_s.draw(rng);
  return s;
}

std::string_view to_string(EventType e) { return kEventNames[static_cast<std::size_t>(e)]; }

std::optional<EventType> event_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == name) return static_cast<EventType>(i);
  }
  return std::nullopt;
}

std::string class_name(int label) {
  if (label < 0 || label >= kClassCount) throw InvalidArgument("class label out of range");
  return std::string(to_string(static_cast<EventType>(label / 2))) +
         (label % 2 ? "/upstream" : "/downstream");
}

EventSpec spec_from_label(int label, const GridScenario& scenario, std::uint64_t seed) {
  if (label < 0 || label >= kClassCount) throw InvalidArgument("class label out of range");
  return {static_cast<EventType>(label / 2), static_cast<Direction>(label % 2), scenario, seed};
}

}  // namespace fpsel::synth
