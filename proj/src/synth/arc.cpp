#include "fpsel/synth/arc.hpp"

#include <cmath>

#include "fpsel/common/error.hpp"

namespace fpsel::synth {

double stationary_conductance(double i, const ArcParams& p) {
  const double a = std::abs(i);
  return a / (p.u0_v + p.r0_ohm * a);
}

ArcState arc_model_step(ArcState state, double i, double dt, const ArcParams& p) {
  if (!(dt > 0.0)) throw InvalidArgument("arc_model_step: dt must be positive");
  const double G = stationary_conductance(i, p);
  const double k1 = (G - state.g) / p.tau_s;
  const double predicted = state.g + dt * k1;
  const double k2 = (G - predicted) / p.tau_s;
  state.g += 0.5 * dt * (k1 + k2);
  if (state.g < kArcFloor) {
    state.g = kArcFloor;
    state.floored = true;
  }
  return state;
}

}  // namespace fpsel::synth
