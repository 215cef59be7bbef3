#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fpsel/common/error.hpp"
#include "fpsel/features/extract.hpp"
#include "fpsel/synth/arc.hpp"
#include "fpsel/synth/generate.hpp"
#include "oracles.hpp"

using namespace fpsel;
using namespace fpsel::synth;

namespace {

GridScenario scenario(std::uint64_t seed) {
  Rng rng(seed);
  return draw_scenario(rng);
}

std::vector<double> cycle(const Eigen::Ref<const Eigen::RowVectorXd>& x, Eigen::Index start, int s) {
  std::vector<double> out(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) out[static_cast<std::size_t>(k)] = x(start + k);
  return out;
}

double rms(const Eigen::Ref<const Eigen::RowVectorXd>& x) { return std::sqrt(x.squaredNorm() / x.size()); }

}  // namespace

TEST(Arc, ConstantCurrentReachesStationaryConductance) {
  const ArcParams p{0.3e-3, 1500.0, 0.012};
  const double i = 400.0, target = i / (p.u0_v + p.r0_ohm * i);
  ArcState s{1e-6, false};
  const double dt = 25e-6;
  for (int k = 0; k < static_cast<int>(5 * p.tau_s / dt); ++k) s = arc_model_step(s, i, dt, p);
  EXPECT_LT(std::abs(s.g - target) / target, 0.01);
  EXPECT_NEAR(stationary_conductance(-i, p), target, 1e-15);
}

TEST(Arc, ZeroCurrentDecaysToFloor) {
  const ArcParams p{0.2e-3, 300.0, 0.01};
  ArcState s{0.5, false};
  for (int k = 0; k < 4000; ++k) s = arc_model_step(s, 0.0, 25e-6, p);
  EXPECT_EQ(s.g, kArcFloor);
  EXPECT_TRUE(s.floored);
  EXPECT_EQ(arc_voltage(s, 0.0), 0.0);
  EXPECT_THROW(arc_model_step(s, 1.0, 0.0, p), InvalidArgument);
}

TEST(Arc, SinusoidMatchesFineStepReference) {
  const ArcParams p{0.3e-3, 2000.0, 0.012};
  auto current = [](double t) { return 1000.0 * std::sin(2.0 * std::numbers::pi * 50.0 * t); };
  const double dt = 25e-6;  // the generator's integration step
  const int steps = 1600;   // two cycles
  const double g0 = 0.05;
  const auto ref = oracle::arc_conductance(current, p.tau_s, p.u0_v, p.r0_ohm, g0, dt / 100, 100, steps);
  ArcState s{g0, false};
  double err = 0.0, norm = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double i = current(k * dt);
    const double u = arc_voltage(s, i), u_ref = i / ref[static_cast<std::size_t>(k)];
    if (k > 0) {
      err += (u - u_ref) * (u - u_ref);
      norm += u_ref * u_ref;
    }
    EXPECT_GE(u * i, 0.0);
    s = arc_model_step(s, i, dt, p);
  }
  EXPECT_LT(std::sqrt(err / norm), 0.02);
}

TEST(Scenario, DrawsStayInsideRanges) {
  Rng rng(1);
  int fields = 0;
  for (int n = 0; n < 10000; ++n) {
    const GridScenario s = draw_scenario(rng);
    fields = 0;
    s.for_each_ranged([&](std::string_view name, double v, Range r) {
      ++fields;
      EXPECT_TRUE(r.contains(v)) << name << " = " << v;
    });
    ASSERT_GE(s.faulted_phase, 0);
    ASSERT_LE(s.faulted_phase, 2);
  }
  EXPECT_GT(fields, 40);
}

TEST(Scenario, ClassLabels) {
  std::set<std::string> names;
  for (int c = 0; c < kClassCount; ++c) names.insert(class_name(c));
  EXPECT_EQ(names.size(), 34u);
  EXPECT_EQ(class_name(0), "inrush_lv_trafo/downstream");
  EXPECT_EQ(spec_from_label(33, {}, 0).event, EventType::incipient);
  EXPECT_EQ(spec_from_label(33, {}, 0).direction, Direction::upstream);
  EXPECT_EQ(event_from_string("shc_3ph"), EventType::shc_3ph);
  EXPECT_THROW(class_name(34), InvalidArgument);
}

TEST(Base, BalancedNoiselessHasNoZeroSequence) {
  GridScenario s = scenario(2);
  s.unbalance = {0, 0, 0};
  s.skew = {0, 0, 0};
  s.standing_v0_rel = 0;
  s.standing_i0_a = 0;
  const auto w = synth_base(s);
  EXPECT_EQ(w.size(), 2000);
  EXPECT_EQ(w.samples_per_cycle(), 80);
  EXPECT_LE(w.channel(Channel::v0).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(w.channel(Channel::i0).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Base, CurrentLagsByPowerFactorAngle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GridScenario s = scenario(100 + seed);
    s.load_pf = 0.9;
    s.standing_v0_rel = 0;
    s.standing_i0_a = 0;
    const auto w = synth_base(s);
    for (int p = 0; p < 3; ++p) {
      const auto v = oracle::dft_bin(cycle(w.samples().row(p), 0, 80), 1);
      const auto i = oracle::dft_bin(cycle(w.samples().row(4 + p), 0, 80), 1);
      const double lag = std::remainder(std::arg(v) - std::arg(i), 2 * std::numbers::pi);
      EXPECT_NEAR(lag * 180 / std::numbers::pi, std::acos(0.9) * 180 / std::numbers::pi, 0.5);
    }
  }
}

TEST(Base, PhaseVoltageIsNominal) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = synth_base(scenario(200 + seed));
    EXPECT_NEAR(rms(w.channel(Channel::va)) / (20e3 / std::sqrt(3.0)), 1.0, 0.01);
  }
}

TEST(Inject, BoltedThreePhaseFault) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GridScenario s = scenario(300 + seed);
    s.shc_ohm = 0.001;
    const EventSpec spec{EventType::shc_3ph, Direction::downstream, s, 1};
    const auto w = inject_event(synth_base(s), spec);
    const auto onset = event_trace(spec).onset;
    for (int p = 0; p < 3; ++p) {
      const auto row = w.samples().row(4 + p);
      const double pre = rms(row.head(onset)), post = rms(row.tail(w.size() - onset));
      EXPECT_GE(post, 5.0 * pre) << "seed " << seed << " phase " << p;
    }
  }
}

TEST(Inject, IncipientBurstSelfExtinguishes) {
  GridScenario s = scenario(400);
  s.incipient_s = 0.02;
  s.onset_s = 0.1;
  s.resonant_grounding = false;
  const EventSpec spec{EventType::incipient, Direction::downstream, s, 3};
  const EventTrace t = event_trace(spec);
  const auto i = t.current.row(s.faulted_phase);
  const Eigen::Index end = t.onset + 80;  // 0.02 s at 4 kHz
  const double peak = i.segment(t.onset, 80).cwiseAbs().maxCoeff();
  EXPECT_GT(peak, 1.0);
  EXPECT_LT(i.tail(i.size() - end - 1).cwiseAbs().maxCoeff(), 1e-6 * peak);
  EXPECT_EQ(i.head(t.onset).cwiseAbs().maxCoeff(), 0.0);

  // Relay current is back to its pre-event cycle RMS two cycles later.
  const auto base = synth_base(s);
  const auto w = inject_event(base, spec);
  const Eigen::Index back = end + 160;
  for (int p = 0; p < 3; ++p) {
    const double after = rms(w.samples().row(4 + p).segment(back, 80));
    const double before = rms(base.samples().row(4 + p).segment(back, 80));
    EXPECT_NEAR(after / before, 1.0, 0.02) << p;
  }
}

TEST(Inject, InrushIsRichInSecondHarmonic) {
  for (auto type : {EventType::inrush_lv_trafo, EventType::inrush_hv_trafo}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const EventSpec spec{type, Direction::downstream, scenario(500 + seed), 0};
      const EventTrace t = event_trace(spec);
      double best = 0.0, ratio = 0.0;
      for (int p = 0; p < 3; ++p) {
        const auto c = cycle(t.current.row(p), t.onset, 80);
        const double h1 = std::abs(oracle::dft_bin(c, 1)), h2 = std::abs(oracle::dft_bin(c, 2));
        if (h1 > best) {
          best = h1;
          ratio = h2 / h1;
        }
      }
      EXPECT_GE(ratio, 0.15) << to_string(type) << " seed " << seed;
    }
  }
}

TEST(Inject, DirectionFlipsCurrentPolarity) {
  const GridScenario s = scenario(600);
  const auto base = synth_base(s);
  const EventSpec down{EventType::capacitor_on, Direction::downstream, s, 0};
  EventSpec up = down;
  up.direction = Direction::upstream;
  const auto a = inject_event(base, down), b = inject_event(base, up);
  const Eigen::RowVectorXd da = a.samples().row(4) - base.samples().row(4);
  const Eigen::RowVectorXd db = b.samples().row(4) - base.samples().row(4);
  EXPECT_LT(da.dot(db), 0.0);
  // Voltages are the same at the bus either way.
  EXPECT_EQ(a.samples().topRows(3), b.samples().topRows(3));
}

TEST(Inject, UnknownEventThrows) {
  EventSpec spec{static_cast<EventType>(99), Direction::downstream, scenario(1), 0};
  EXPECT_THROW(inject_event(synth_base(spec.scenario), spec), InvalidArgument);
}

TEST(Generate, SurrogateDatasetShapeAndDeterminism) {
  const auto a = gen_surrogate_dataset(2, 42, {}, 1);
  ASSERT_EQ(a.windows.size(), 68u);
  for (int c = 0; c < kClassCount; ++c) EXPECT_EQ(std::count(a.labels.begin(), a.labels.end(), c), 2);
  for (const auto& w : a.windows) {
    EXPECT_TRUE(w.is_standard());
    EXPECT_EQ(w.size(), 2000);
    EXPECT_TRUE(w.samples().allFinite());
  }
  const auto b = gen_surrogate_dataset(2, 42, {}, 4);
  for (std::size_t i = 0; i < a.windows.size(); ++i) EXPECT_EQ(a.windows[i].samples(), b.windows[i].samples());
  const auto c = gen_surrogate_dataset(2, 43, {}, 1);
  EXPECT_NE(a.windows[0].samples(), c.windows[0].samples());
  EXPECT_THROW(gen_surrogate_dataset(0, 1), InvalidArgument);
}

TEST(Generate, QuantisedToAdcSteps) {
  const auto d = gen_surrogate_dataset(1, 7);
  const auto& x = d.windows[5].samples();
  EXPECT_EQ(((x.row(0).array() / 0.5).round() * 0.5 - x.row(0).array()).abs().maxCoeff(), 0.0);
  EXPECT_LT(((x.row(4).array() / 1e-3).round() * 1e-3 - x.row(4).array()).abs().maxCoeff(), 1e-12);
}

TEST(Generate, ShortCircuitSeparatesFromLoadOff) {
  const auto d = gen_surrogate_dataset(20, 9);
  std::vector<WaveformWindow> a, b;
  for (std::size_t i = 0; i < d.windows.size(); ++i) {
    if (d.labels[i] == 2 * static_cast<int>(EventType::shc_3ph)) a.push_back(d.windows[i]);
    if (d.labels[i] == 2 * static_cast<int>(EventType::load_off)) b.push_back(d.windows[i]);
  }
  const Eigen::MatrixXd fa = to_matrix(extract_batch(a, 1)), fb = to_matrix(extract_batch(b, 1));
  Eigen::MatrixXd all(fa.rows() + fb.rows(), fa.cols());
  all << fa, fb;
  const Eigen::RowVectorXd mu = all.colwise().mean();
  Eigen::RowVectorXd sd = ((all.rowwise() - mu).array().square().colwise().mean()).sqrt();
  sd = (sd.array() > 0).select(sd, 1.0);
  const Eigen::MatrixXd za = (fa.rowwise() - mu).array().rowwise() / sd.array();
  const Eigen::MatrixXd zb = (fb.rowwise() - mu).array().rowwise() / sd.array();
  auto mean_distance = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, bool same) {
    double sum = 0.0;
    long n = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = same ? i + 1 : 0; j < y.rows(); ++j, ++n) sum += (x.row(i) - y.row(j)).norm();
    }
    return sum / static_cast<double>(n);
  };
  // Mean cross-class pair distance against the mean within-class pair distance.
  const double between = mean_distance(za, zb, false);
  const double within = 0.5 * (mean_distance(za, za, true) + mean_distance(zb, zb, true));
  EXPECT_GT(between / within, 1.0);
}

TEST(Recording, FaultSpacingAndSchedule) {
  RecordingConfig c;
  c.days = 30;
  c.faults = 3;
  const Recording r = gen_fp_recording(c);
  ASSERT_EQ(r.faults().size(), 3u);
  for (std::size_t i = 1; i < r.faults().size(); ++i) {
    EXPECT_GE(hours_between(r.faults()[i - 1], r.faults()[i]), 48.0);
  }
  EXPECT_EQ(r.size(), 30u * 24 * 4);
  EXPECT_EQ(hours_between(c.start, r.window_time(4)), 1.0);

  // Precursor rate before faults against the rate elsewhere.
  double pre = 0, pre_n = 0, rest = 0, rest_n = 0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    const TimePoint t = r.window_time(j);
    bool near = false;
    for (const auto& f : r.faults()) near |= t < f && hours_between(t, f) <= 168.0;
    const bool p = r.kind(j) == WindowKind::precursor;
    (near ? pre : rest) += p;
    (near ? pre_n : rest_n) += 1;
  }
  ASSERT_GT(rest_n, 0);
  EXPECT_GE(pre / pre_n, 5.0 * std::max(rest / rest_n, 1e-9));
}

TEST(Recording, WindowsAreDeterministic) {
  RecordingConfig c;
  c.days = 3;
  c.faults = 1;
  const Recording r = gen_fp_recording(c), again = gen_fp_recording(c);
  for (std::size_t j : {0u, 17u, 100u}) {
    const auto w = r.window(j);
    EXPECT_EQ(w.samples(), again.window(j).samples());
    EXPECT_EQ(*w.start_time(), r.window_time(j));
    EXPECT_TRUE(w.samples().allFinite());
  }
  std::size_t precursor = r.size();
  for (std::size_t j = 0; j < r.size() && precursor == r.size(); ++j) {
    if (r.kind(j) == WindowKind::precursor) precursor = j;
  }
  ASSERT_LT(precursor, r.size());
  const auto e = r.event(precursor).event;
  EXPECT_TRUE(e == EventType::hif_1phg || e == EventType::incipient);
}

TEST(Recording, NoFaultsAndErrors) {
  RecordingConfig c;
  c.days = 10;
  c.faults = 0;
  c.precursor_base_rate = 0.0;
  const Recording r = gen_fp_recording(c);
  EXPECT_TRUE(r.faults().empty());
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NE(r.kind(j), WindowKind::precursor);
  c.faults = 6;
  c.days = 10;
  EXPECT_THROW(gen_fp_recording(c), InvalidArgument);
  c.days = 11;
  EXPECT_NO_THROW(gen_fp_recording(c));
}

TEST(Recording, DecoysAreUpstreamArcs) {
  RecordingConfig c;
  c.days = 5;
  c.faults = 1;
  c.benign_rate = 0.3;
  const Recording plain = gen_fp_recording(c);
  c.decoy_share = 1.0;
  const Recording decoyed = gen_fp_recording(c);
  std::size_t benign = 0;
  for (std::size_t j = 0; j < decoyed.size(); ++j) {
    ASSERT_EQ(decoyed.kind(j), plain.kind(j));
    if (decoyed.kind(j) != WindowKind::benign) continue;
    ++benign;
    const auto e = decoyed.event(j);
    EXPECT_TRUE(e.event == EventType::hif_1phg || e.event == EventType::incipient);
    EXPECT_EQ(e.direction, Direction::upstream);
  }
  EXPECT_GT(benign, 0u);
  c.decoy_share = 1.5;
  EXPECT_THROW(gen_fp_recording(c), InvalidArgument);
}
