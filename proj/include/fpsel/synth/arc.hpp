#pragma once

namespace fpsel::synth {

struct ArcParams {
  double tau_s = 0.3e-3;
  double u0_v = 1000.0;
  double r0_ohm = 0.012;
};

/// Arc conductance; `floored` records that g hit the 1e-9 S floor.
struct ArcState {
  double g = 1e-9;
  bool floored = false;
};

inline constexpr double kArcFloor = 1e-9;

/// Stationary conductance |i| / (u0 + r0 |i|).
double stationary_conductance(double i, const ArcParams& p);

/// One explicit trapezoidal (Heun) step of dg/dt = (G(i) - g) / tau with the
/// current held at `i` over the step.
ArcState arc_model_step(ArcState state, double i, double dt, const ArcParams& p);

inline double arc_voltage(const ArcState& s, double i) { return i / s.g; }

}  // namespace fpsel::synth
