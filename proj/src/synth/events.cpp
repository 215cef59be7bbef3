#include "fpsel/synth/events.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "fpsel/common/error.hpp"
#include "fpsel/synth/arc.hpp"

namespace fpsel::synth {

namespace {

using Complex = std::complex<double>;
using Row = Eigen::RowVectorXd;

// Per-km line constants (positive sequence).
struct LineConstants {
  double r_ohm, l_h, c_f;
};
constexpr LineConstants kOhl{0.3, 1.1e-3, 9e-9};
constexpr LineConstants kCable{0.15, 0.35e-3, 0.3e-6};

struct Grid {
  Eigen::Index n = 0;      // output samples
  Eigen::Index m = 0;      // substeps per sample
  Eigen::Index fine = 0;   // n * m
  double dt = 0.0;         // fine step
  double omega = 0.0;
  Eigen::Index onset = 0;  // fine index
};

Grid make_grid(const SynthConfig& c, double onset_s) {
  if (c.substeps < 1) throw InvalidArgument("synth: substeps must be >= 1");
  samples_per_cycle(c.sample_rate_hz, c.fundamental_hz);
  Grid g;
  g.n = static_cast<Eigen::Index>(std::llround(c.sample_rate_hz * c.window_seconds));
  g.m = c.substeps;
  g.fine = g.n * g.m;
  g.dt = 1.0 / (c.sample_rate_hz * static_cast<double>(g.m));
  g.omega = 2.0 * std::numbers::pi * c.fundamental_hz;
  g.onset = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::llround(onset_s / g.dt)), 0, g.fine - 1);
  return g;
}

double phase_peak(const GridScenario& s) { return s.v_ll * std::sqrt(2.0 / 3.0); }

struct Rl {
  double r, l;
};

Rl source_impedance(const GridScenario& s, double omega) {
  const double z = s.v_ll * s.v_ll / (s.source_mva * 1e6);
  const double r = z / std::sqrt(1.0 + s.source_xr * s.source_xr);
  return {r, r * s.source_xr / omega};
}

// Star-equivalent impedance of a three-phase load of `mva` at power factor pf.
Rl load_impedance(double v_ll, double mva, double pf, double omega) {
  const double z = v_ll * v_ll / (mva * 1e6);
  return {z * pf, z * std::sqrt(1.0 - pf * pf) / omega};
}

// Source EMF of phase p: amplitude and angle of A sin(wt + theta). The
// amplitude is regulated so the loaded bus sits at nominal voltage.
double emf_amplitude(const GridScenario& s, int p, double omega) {
  const Rl src = source_impedance(s, omega);
  const Rl load = load_impedance(s.v_ll, s.load_mva, s.load_pf, omega);
  const Complex zs(src.r, omega * src.l), zl(load.r, omega * load.l);
  return phase_peak(s) * (1.0 + s.unbalance[static_cast<std::size_t>(p)]) * std::abs(zs + zl) / std::abs(zl);
}
double emf_angle(const GridScenario& s, int p) {
  return s.source_angle - 2.0 * std::numbers::pi * p / 3.0 + s.skew[static_cast<std::size_t>(p)];
}

PhaseSeries emf(const GridScenario& s, const Grid& g) {
  PhaseSeries e(3, g.fine);
  for (int p = 0; p < 3; ++p) {
    const double a = emf_amplitude(s, p, g.omega), th = emf_angle(s, p);
    for (Eigen::Index k = 0; k < g.fine; ++k) e(p, k) = a * std::sin(g.omega * static_cast<double>(k) * g.dt + th);
  }
  return e;
}

// Steady-state current of A sin(wt + th) through impedance z.
Row steady_current(double a, double th, Complex z, const Grid& g) {
  Row i(g.fine);
  const double mag = a / std::abs(z), shift = th - std::arg(z);
  for (Eigen::Index k = 0; k < g.fine; ++k) i(k) = mag * std::sin(g.omega * static_cast<double>(k) * g.dt + shift);
  return i;
}

// Trapezoidal L di/dt + R i = e from `start` (zero before) with i(start) = i0.
Row integrate_rl(const Row& e, double r, double l, Eigen::Index start, double i0, double dt) {
  Row i = Row::Zero(e.size());
  if (start >= e.size()) return i;
  i(start) = i0;
  const double a = l / dt - r / 2.0, b = l / dt + r / 2.0;
  for (Eigen::Index k = start; k + 1 < e.size(); ++k) i(k + 1) = (a * i(k) + 0.5 * (e(k) + e(k + 1))) / b;
  return i;
}

// Series RLC energised at `start` with a discharged capacitor.
Row integrate_rlc(const Row& e, double r, double l, double c, Eigen::Index start, double dt) {
  Row i = Row::Zero(e.size());
  Eigen::Matrix2d a;
  a << -r / l, -1.0 / l, 1.0 / c, 0.0;
  const Eigen::Matrix2d lhs = Eigen::Matrix2d::Identity() - 0.5 * dt * a;
  const Eigen::Matrix2d rhs = Eigen::Matrix2d::Identity() + 0.5 * dt * a;
  const Eigen::Matrix2d step = lhs.inverse() * rhs;
  const Eigen::Vector2d drive = lhs.inverse() * Eigen::Vector2d(0.5 * dt / l, 0.0);
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  for (Eigen::Index k = start; k + 1 < e.size(); ++k) {
    x = step * x + drive * (e(k) + e(k + 1));
    i(k + 1) = x(0);
  }
  return i;
}

// Switch opening: the current keeps flowing until its next zero.
void interrupt_at_zero(Row& i, Eigen::Index from) {
  for (Eigen::Index k = std::max<Eigen::Index>(from, 1); k < i.size(); ++k) {
    if (i(k) == 0.0 || (i(k) > 0.0) != (i(k - 1) > 0.0)) {
      i.tail(i.size() - k).setZero();
      return;
    }
  }
}

double grounding_resistance(const GridScenario& s) {
  if (!s.resonant_grounding) return s.grounding_ohm;
  // Compensated network: the fault current is the detuning plus a 1 A
  // resistive residual, at phase voltage.
  const double residual = std::hypot(s.petersen_tuning_a, 1.0);
  return s.v_ll / std::sqrt(3.0) / residual;
}

struct Fault {
  double r, l;  // source plus line to the fault
};

Fault fault_path(const GridScenario& s, const Rl& src) {
  const LineConstants& k = s.fault_on_cable ? kCable : kOhl;
  const double len = (s.fault_on_cable ? s.cable_length_km : s.ohl_length_km) * s.fault_location;
  return {src.r + k.r_ohm * len, src.l + k.l_h * len};
}

struct Contribution {
  PhaseSeries i;
  Row neutral;
};

double saturation_current(double flux, const GridScenario& s) {
  constexpr double kKneeCurrent = 0.01;  // pu at the knee
  constexpr double kAirCoreScale = 10.0;
  const double a = std::abs(flux);
  const double curve = kKneeCurrent * std::pow(a / s.knee_flux_pu, s.sat_exponent);
  const double air = kKneeCurrent + kAirCoreScale * std::max(0.0, a - s.knee_flux_pu) / s.sat_reactance_pu;
  return std::copysign(std::min(curve, air), flux);
}

void inrush(const GridScenario& s, double mva, const Grid& g, Contribution& c) {
  const double i_rated = mva * 1e6 / (std::sqrt(3.0) * s.v_ll) * std::numbers::sqrt2;
  const double t_on = static_cast<double>(g.onset) * g.dt;
  for (int p = 0; p < 3; ++p) {
    const double th = emf_angle(s, p);
    const double residual = s.residual_flux_pu * std::cos(s.residual_angle - 2.0 * std::numbers::pi * p / 3.0);
    const double offset = residual + std::cos(g.omega * t_on + th);
    for (Eigen::Index k = g.onset; k < g.fine; ++k) {
      const double t = static_cast<double>(k) * g.dt;
      const double flux = -std::cos(g.omega * t + th) + offset * std::exp(-(t - t_on) / s.inrush_tau_s);
      c.i(p, k) = i_rated * saturation_current(flux, s);
    }
  }
}

void switched_load(const GridScenario& s, const PhaseSeries& e, const Rl& src, const Grid& g, bool on,
                   Contribution& c) {
  const Rl z = load_impedance(s.v_ll, s.event_load_mva, s.event_load_pf, g.omega);
  for (int p = 0; p < 3; ++p) {
    if (on) {
      c.i.row(p) = integrate_rl(e.row(p), src.r + z.r, src.l + z.l, g.onset, 0.0, g.dt);
    } else {
      Row i = steady_current(emf_amplitude(s, p, g.omega), emf_angle(s, p), Complex(src.r + z.r, g.omega * (src.l + z.l)), g);
      interrupt_at_zero(i, g.onset);
      c.i.row(p) = i;
    }
  }
}

// Shunt capacitance behind a series impedance; per-phase capacitance scale
// models the geometric asymmetry of overhead lines.
void switched_capacitance(const GridScenario& s, const PhaseSeries& e, const Grid& g, double r, double l,
                          double cap, double asymmetry, bool on, Contribution& c) {
  for (int p = 0; p < 3; ++p) {
    const double cp = cap * (1.0 + asymmetry * std::cos(s.standing_v0_angle - 2.0 * std::numbers::pi * p / 3.0));
    if (on) {
      c.i.row(p) = integrate_rlc(e.row(p), r, l, cp, g.onset, g.dt);
    } else {
      const Complex z(r, g.omega * l - 1.0 / (g.omega * cp));
      Row i = steady_current(emf_amplitude(s, p, g.omega), emf_angle(s, p), z, g);
      interrupt_at_zero(i, g.onset);
      c.i.row(p) = i;
    }
  }
}

void motor_start(const GridScenario& s, const PhaseSeries& e, const Rl& src, const Grid& g, Contribution& c) {
  const Rl run = load_impedance(s.v_ll, s.motor_mva, 0.85, g.omega);
  const double z_run = std::hypot(run.r, g.omega * run.l);
  const double z_lr = z_run / s.motor_lr_ratio;
  const Rl lr{z_lr * 0.3, z_lr * std::sqrt(1.0 - 0.09) / g.omega};
  const double t_on = static_cast<double>(g.onset) * g.dt;
  auto at = [&](Eigen::Index k) {
    const double w = 1.0 - std::exp(-(static_cast<double>(k) * g.dt - t_on) / s.motor_accel_s);
    return Rl{src.r + lr.r + (run.r - lr.r) * w, src.l + lr.l + (run.l - lr.l) * w};
  };
  for (int p = 0; p < 3; ++p) {
    for (Eigen::Index k = g.onset; k + 1 < g.fine; ++k) {
      const Rl a = at(k), b = at(k + 1);
      c.i(p, k + 1) = ((a.l / g.dt - a.r / 2.0) * c.i(p, k) + 0.5 * (e(p, k) + e(p, k + 1))) /
                      (b.l / g.dt + b.r / 2.0);
    }
  }
}

// Solid faults: loop currents with M di/dt + R i = B e, trapezoidal.
void short_circuit(const GridScenario& s, EventType type, const PhaseSeries& e, const Rl& src, const Grid& g,
                   Contribution& c) {
  const Fault f = fault_path(s, src);
  const double r = f.r + s.shc_ohm;
  const double rg = grounding_resistance(s);
  const int p = s.faulted_phase, q = (p + 1) % 3;

  if (type == EventType::shc_3ph) {
    for (int k = 0; k < 3; ++k) c.i.row(k) = integrate_rl(e.row(k), r, f.l, g.onset, 0.0, g.dt);
    return;
  }
  if (type == EventType::shc_2ph) {
    const Row drive = e.row(p) - e.row(q);
    const Row i = integrate_rl(drive, 2.0 * f.r + s.shc_ohm, 2.0 * f.l, g.onset, 0.0, g.dt);
    c.i.row(p) = i;
    c.i.row(q) = -i;
    return;
  }
  if (type == EventType::shc_1phg) {
    c.i.row(p) = integrate_rl(e.row(p), r + rg, f.l, g.onset, 0.0, g.dt);
    c.neutral = -rg * c.i.row(p);
    return;
  }
  // Two phases to ground sharing the grounding path.
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity() * f.l;
  Eigen::Matrix2d rr;
  rr << r + rg, rg, rg, r + rg;
  const Eigen::Matrix2d lhs = m / g.dt + rr / 2.0;
  const Eigen::Matrix2d rhs = m / g.dt - rr / 2.0;
  const Eigen::Matrix2d inv = lhs.inverse();
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  for (Eigen::Index k = g.onset; k + 1 < g.fine; ++k) {
    const Eigen::Vector2d drive(0.5 * (e(p, k) + e(p, k + 1)), 0.5 * (e(q, k) + e(q, k + 1)));
    x = inv * (rhs * x + drive);
    c.i(p, k + 1) = x(0);
    c.i(q, k + 1) = x(1);
  }
  c.neutral = -rg * (c.i.row(p) + c.i.row(q));
}

// Arcing ground fault on one phase: series resistance plus the dynamic arc,
// backward Euler in the loop current (the arc resistance is stiff).
void arcing_fault(const GridScenario& s, const EventSpec& spec, const PhaseSeries& e, const Rl& src, const Grid& g,
                  Contribution& c) {
  const bool hif = spec.event == EventType::hif_1phg;
  const Fault f = fault_path(s, src);
  const double rg = grounding_resistance(s);
  const double r = f.r + rg + (hif ? s.hif_ohm : s.shc_ohm);
  const int p = s.faulted_phase;
  ArcParams pos{s.arc_tau_s, s.arc_u0_v, s.arc_r0_ohm};
  ArcParams neg = pos;
  if (hif) neg.u0_v *= 1.0 + s.hif_asymmetry;
  const Eigen::Index extinction =
      hif ? g.fine : g.onset + static_cast<Eigen::Index>(std::llround(s.incipient_s / g.dt));

  Rng rng(spec.seed);
  double flicker = 1.0;
  ArcState arc;
  arc.g = std::max(stationary_conductance(emf_amplitude(s, p, g.omega) / r, pos), kArcFloor);
  double i = 0.0;
  for (Eigen::Index k = g.onset; k + 1 < g.fine; ++k) {
    if (hif && (e(p, k + 1) > 0.0) != (e(p, k) > 0.0)) flicker = std::exp(0.15 * rng.normal());
    const double total = r * flicker + 1.0 / arc.g;
    i = (f.l / g.dt * i + e(p, k + 1)) / (f.l / g.dt + total);
    if (k + 1 < extinction) {
      arc = arc_model_step(arc, i, g.dt, i < 0.0 ? neg : pos);
    } else {
      arc = ArcState{kArcFloor, true};  // the burst clears: the gap no longer conducts
    }
    c.i(p, k + 1) = i;
  }
  c.neutral = -rg * c.i.row(p);
}

Contribution fine_contribution(const EventSpec& spec, const Grid& g, const PhaseSeries& e) {
  const GridScenario& s = spec.scenario;
  const Rl src = source_impedance(s, g.omega);
  Contribution c{PhaseSeries::Zero(3, g.fine), Row::Zero(g.fine)};
  switch (spec.event) {
    case EventType::inrush_lv_trafo:
      inrush(s, s.lv_trafo_mva, g, c);
      break;
    case EventType::inrush_hv_trafo:
      inrush(s, s.hv_trafo_mva, g, c);
      break;
    case EventType::load_on:
    case EventType::load_off:
      switched_load(s, e, src, g, spec.event == EventType::load_on, c);
      break;
    case EventType::capacitor_on:
    case EventType::capacitor_off: {
      const double cap = s.capacitor_mva * 1e6 / (g.omega * s.v_ll * s.v_ll);
      switched_capacitance(s, e, g, src.r, src.l, cap, 0.0, spec.event == EventType::capacitor_on, c);
      break;
    }
    case EventType::ohl_on:
    case EventType::ohl_off: {
      const double len = s.ohl_length_km;
      const double asymmetry = 0.3 * s.ohl_spacing_m / s.ohl_height_m;
      switched_capacitance(s, e, g, src.r + kOhl.r_ohm * len, src.l + kOhl.l_h * len, kOhl.c_f * len, asymmetry,
                           spec.event == EventType::ohl_on, c);
      break;
    }
    case EventType::cable_on:
    case EventType::cable_off: {
      const double len = s.cable_length_km;
      switched_capacitance(s, e, g, src.r + kCable.r_ohm * len, src.l + kCable.l_h * len, kCable.c_f * len, 0.0,
                           spec.event == EventType::cable_on, c);
      break;
    }
    case EventType::motor_start:
      motor_start(s, e, src, g, c);
      break;
    case EventType::shc_1phg:
    case EventType::shc_2ph:
    case EventType::shc_2phg:
    case EventType::shc_3ph:
      short_circuit(s, spec.event, e, src, g, c);
      break;
    case EventType::hif_1phg:
    case EventType::incipient:
      arcing_fault(s, spec, e, src, g, c);
      break;
    default:
      throw InvalidArgument("inject_event: unknown event id");
  }
  return c;
}

Row derivative(const Row& x, double dt) {
  Row d(x.size());
  const Eigen::Index n = x.size();
  if (n < 2) return Row::Zero(n);
  d(0) = (x(1) - x(0)) / dt;
  d(n - 1) = (x(n - 1) - x(n - 2)) / dt;
  if (n > 2) d.segment(1, n - 2) = (x.tail(n - 2) - x.head(n - 2)) / (2.0 * dt);
  return d;
}

template <typename M>
M decimate(const M& fine, Eigen::Index m, Eigen::Index n) {
  M out(fine.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) out.col(k) = fine.col(k * m);
  return out;
}

void refresh_zero_sequence(Samples& x) {
  x.row(index_of(Channel::v0)) = (x.row(0) + x.row(1) + x.row(2)) / 3.0;
  x.row(index_of(Channel::i0)) = (x.row(4) + x.row(5) + x.row(6)) / 3.0;
}

}  // namespace

EventTrace event_trace(const EventSpec& spec, const SynthConfig& config) {
  const Grid g = make_grid(config, spec.scenario.onset_s);
  const PhaseSeries e = emf(spec.scenario, g);
  const Contribution c = fine_contribution(spec, g, e);
  return {decimate(c.i, g.m, g.n), decimate(Eigen::MatrixXd(c.neutral), g.m, g.n).row(0), g.onset / g.m};
}

WaveformWindow synth_base(const GridScenario& s, const SynthConfig& config, std::optional<TimePoint> start) {
  const Grid g = make_grid(config, 0.0);
  const Rl src = source_impedance(s, g.omega);
  const Rl load = load_impedance(s.v_ll, s.load_mva, s.load_pf, g.omega);
  const Complex zs(src.r, g.omega * src.l), zl(load.r, g.omega * load.l);
  Samples x(kChannelCount, g.n);
  const double vn = phase_peak(s) * s.standing_v0_rel;
  for (Eigen::Index k = 0; k < g.n; ++k) {
    const double wt = g.omega * static_cast<double>(k) / config.sample_rate_hz;
    const double v_standing = vn * std::sin(wt + s.standing_v0_angle);
    const double i_standing = s.standing_i0_a * std::numbers::sqrt2 * std::cos(wt + s.standing_v0_angle);
    for (int p = 0; p < 3; ++p) {
      const Complex e = std::polar(emf_amplitude(s, p, g.omega), emf_angle(s, p));
      const Complex i = e / (zs + zl);
      const Complex v = i * zl;
      x(p, k) = std::abs(v) * std::sin(wt + std::arg(v)) + v_standing;
      x(4 + p, k) = std::abs(i) * std::sin(wt + std::arg(i)) + i_standing;
    }
  }
  refresh_zero_sequence(x);
  return WaveformWindow(std::move(x), config.sample_rate_hz, config.fundamental_hz, start);
}

WaveformWindow inject_event(const WaveformWindow& base, const EventSpec& spec, const SynthConfig& config) {
  const GridScenario& s = spec.scenario;
  const Grid g = make_grid(config, s.onset_s);
  if (base.size() != g.n) throw InvalidArgument("inject_event: base window does not match the configuration");
  const PhaseSeries e = emf(s, g);
  const Contribution c = fine_contribution(spec, g, e);
  const Rl src = source_impedance(s, g.omega);
  const Rl load = load_impedance(s.v_ll, s.load_mva, s.load_pf, g.omega);
  const double share = spec.direction == Direction::downstream ? 1.0 : -s.backfeed;

  PhaseSeries dv(3, g.fine), di(3, g.fine);
  for (int p = 0; p < 3; ++p) {
    const Row ip = c.i.row(p);
    const Row v = -(src.r * ip + src.l * derivative(ip, g.dt)) + c.neutral;
    dv.row(p) = v;
    di.row(p) = integrate_rl(v, load.r, load.l, 0, 0.0, g.dt) + share * ip;
  }
  Samples x = base.samples();
  x.topRows(3) += decimate(dv, g.m, g.n);
  x.middleRows(4, 3) += decimate(di, g.m, g.n);
  refresh_zero_sequence(x);
  return WaveformWindow(std::move(x), base.sample_rate_hz(), base.fundamental_hz(), base.start_time());
}

WaveformWindow measure(const WaveformWindow& clean, const GridScenario& s, Rng& rng, const SynthConfig& config) {
  Samples x = clean.samples();
  const double sv = phase_peak(s) * s.noise_v_rel, si = s.noise_i_a;
  for (int p = 0; p < 3; ++p) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(p, k) += sv * rng.normal();
    for (Eigen::Index k = 0; k < x.cols(); ++k) x(4 + p, k) += si * rng.normal();
  }
  refresh_zero_sequence(x);
  auto quantise = [](auto&& row, double lsb) {
    if (lsb > 0.0) row = ((row.array() / lsb).round() * lsb).matrix();
  };
  for (int c = 0; c < 4; ++c) quantise(x.row(c), config.lsb_v);
  for (int c = 4; c < 8; ++c) quantise(x.row(c), config.lsb_i);
  return WaveformWindow(std::move(x), clean.sample_rate_hz(), clean.fundamental_hz(), clean.start_time());
}

WaveformWindow synth_event_window(const EventSpec& spec, std::uint64_t noise_seed, const SynthConfig& config,
                                  std::optional<TimePoint> start) {
  Rng rng(noise_seed);
  return measure(inject_event(synth_base(spec.scenario, config, start), spec, config), spec.scenario, rng, config);
}

WaveformWindow synth_quiet_window(const GridScenario& s, std::uint64_t noise_seed, const SynthConfig& config,
                                  std::optional<TimePoint> start) {
  Rng rng(noise_seed);
  return measure(synth_base(s, config, start), s, rng, config);
}

}  // namespace fpsel::synth
