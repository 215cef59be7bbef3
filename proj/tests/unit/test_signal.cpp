#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/signal/io.hpp"
#include "fpsel/signal/phasor.hpp"
#include "oracles.hpp"

using namespace fpsel;

TEST(Channel, NamesAreBijective) {
  for (Channel c : kAllChannels) {
    EXPECT_EQ(channel_from_name(channel_name(c)), c);
  }
  EXPECT_EQ(channel_name(Channel::va), "va");
  EXPECT_EQ(channel_name(Channel::i0), "i0");
  EXPECT_EQ(index_of(Channel::ia), 4);
  EXPECT_FALSE(channel_from_name("vx"));
}

TEST(WaveformWindow, StandardShapes) {
  const WaveformWindow a(Samples::Zero(8, 7200), 14400.0);
  EXPECT_TRUE(a.is_standard());
  EXPECT_EQ(a.samples_per_cycle(), 288);
  EXPECT_EQ(a.cycle_count(), 25);
  const WaveformWindow b(Samples::Zero(8, 2000), 4000.0);
  EXPECT_EQ(b.samples_per_cycle(), 80);
  EXPECT_EQ(b.cycle_count(), 25);
}

TEST(WaveformWindow, RejectsInvalid) {
  EXPECT_THROW(WaveformWindow(Samples::Zero(8, 2000), 4010.0), InvalidArgument);
  EXPECT_THROW(WaveformWindow(Samples::Zero(8, 2010), 4000.0), InvalidArgument);
  Samples s = Samples::Zero(8, 80);
  s(2, 5) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(WaveformWindow(s, 4000.0), InvalidArgument);
}

TEST(WaveformWindow, SliceConcatenateIsExact) {
  Samples s = Samples::Random(8, 2000);
  const WaveformWindow w(s, 4000.0, 50.0, parse_iso8601("2024-01-01T00:00:00Z"));
  std::vector<WaveformWindow> parts{w.slice(0, 800), w.slice(800, 1200)};
  EXPECT_EQ(*parts[1].start_time(), parse_iso8601("2024-01-01T00:00:00.200Z"));
  const WaveformWindow joined = concatenate(parts);
  EXPECT_TRUE((joined.samples().array() == s.array()).all());
  EXPECT_EQ(joined.start_time(), w.start_time());
}

TEST(ZeroSequence, Examples) {
  const Samples bal = fixture::balanced(2000, 4000.0, 325.0, 10.0);
  const Series z = derive_zero_sequence(bal.row(0).transpose(), bal.row(1).transpose(), bal.row(2).transpose());
  EXPECT_LT(z.cwiseAbs().maxCoeff(), 1e-9 * 325.0);

  const Series one = derive_zero_sequence(Eigen::VectorXd::Ones(5), Eigen::VectorXd::Ones(5),
                                          Eigen::VectorXd::Ones(5));
  EXPECT_TRUE(one.isApproxToConstant(1.0));

  const Series r = derive_zero_sequence(Eigen::Vector2d(3, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 3));
  EXPECT_EQ(r, Eigen::Vector2d(1, 1));

  EXPECT_THROW(derive_zero_sequence(Eigen::Vector2d(1, 1), Eigen::Vector3d(1, 1, 1), Eigen::Vector2d(1, 1)),
               InvalidArgument);
}

TEST(Phasor, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(0.25 - 4 * std::numbers::pi), 0.25, 1e-14);
}

TEST(Phasor, PureToneMagnitude) {
  Samples s = Samples::Zero(8, 7200);
  s.row(0) = fixture::tone(7200, 14400.0, 2.0);
  const WaveformWindow w(s, 14400.0);
  for (int k = 0; k < w.cycle_count(); ++k) {
    EXPECT_NEAR(fundamental_phasor(CycleFrame(w, k), Channel::va).magnitude, 2.0, 1e-9);
  }
}

TEST(Phasor, ZeroSignal) {
  const WaveformWindow w(Samples::Zero(8, 2000), 4000.0);
  const Phasor p = fundamental_phasor(CycleFrame(w, 3), Channel::ib);
  EXPECT_EQ(p.magnitude, 0.0);
  EXPECT_EQ(p.angle, 0.0);
}

TEST(Phasor, HarmonicRejectedAgainstDftOracle) {
  Samples s = Samples::Zero(8, 7200);
  s.row(4) = fixture::tone(7200, 14400.0, 1.0, 1, std::numbers::pi / 2) +
             fixture::tone(7200, 14400.0, 0.5, 3, std::numbers::pi / 2);
  const WaveformWindow w(s, 14400.0);
  const CycleFrame f(w, 7);
  const Phasor p = fundamental_phasor(f, Channel::ia);
  EXPECT_NEAR(p.magnitude, 1.0, 1e-9);
  EXPECT_NEAR(p.angle, 0.0, 1e-9);  // cosine reference
  std::vector<double> cyc(f.samples(Channel::ia).begin(), f.samples(Channel::ia).end());
  EXPECT_NEAR(p.magnitude, 2.0 * std::abs(oracle::dft_bin(cyc, 1)) / 288.0, 1e-12);
}

TEST(Phasor, ExactForEveryIntegerHarmonic) {
  for (int h = 1; h <= 13; ++h) {
    const Eigen::RowVectorXd x = fixture::tone(80, 4000.0, 3.5, h, 0.3);
    EXPECT_NEAR(cycle_phasor(x, h).magnitude, 3.5, 1e-9 * 3.5) << "h=" << h;
  }
}

TEST(WindowRms, Examples) {
  EXPECT_NEAR(window_rms(fixture::tone(288 * 3, 14400.0, 1.0)), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(window_rms(Eigen::VectorXd::Constant(9, -4.0)), 4.0);
  EXPECT_NEAR(window_rms(Eigen::Vector2d(3, 4)), std::sqrt(12.5), 1e-15);
  EXPECT_THROW(window_rms(Eigen::VectorXd()), InvalidArgument);
}

namespace {

std::string csv_block(int rows, bool with_zero, int nan_row = -1) {
  std::ostringstream out;
  out << (with_zero ? "t,va,vb,vc,v0,ia,ib,ic,i0\n" : "t,va,vb,vc,v0,ia,ib,ic\n");
  const int cols = with_zero ? 8 : 7;
  for (int r = 0; r < rows; ++r) {
    out << csv::format_double(r / 14400.0);
    for (int c = 0; c < cols; ++c) {
      out << ',';
      if (r == nan_row && c == 2) {
        out << "NaN";
      } else {
        out << (c < 4 ? 1.0 + c : 0.5 * c) + r % 7;
      }
    }
    out << '\n';
  }
  return out.str();
}

WaveformManifest manifest_14k4() {
  WaveformManifest m;
  m.sample_rate_hz = 14400.0;
  m.station = "S1";
  m.start_time = parse_iso8601("2024-05-01T00:00:00Z");
  return m;
}

}  // namespace

TEST(LoadWaveform, OneStandardWindow) {
  std::istringstream in(csv_block(7200, true));
  const auto windows = load_waveform(in, manifest_14k4());
  ASSERT_EQ(windows.size(), 1u);
  EXPECT_EQ(windows[0].size(), 7200);
  EXPECT_EQ(windows[0].samples()(1, 3), 2.0 + 3);
}

TEST(LoadWaveform, DerivesMissingZeroSequence) {
  auto m = manifest_14k4();
  m.derive_zero_sequence = true;
  std::istringstream in(csv_block(7200, false));
  const auto windows = load_waveform(in, m);
  const auto& s = windows.at(0).samples();
  for (Eigen::Index t : {0, 100, 7199}) {
    EXPECT_NEAR(s(7, t), (s(4, t) + s(5, t) + s(6, t)) / 3.0, 1e-12);
  }

  std::istringstream again(csv_block(7200, false));
  EXPECT_THROW(load_waveform(again, manifest_14k4()), LoadError);
}

TEST(LoadWaveform, NanReportsRow) {
  std::istringstream in(csv_block(7200, true, 41));
  try {
    load_waveform(in, manifest_14k4());
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.row(), 43u);  // header is row 1, data row 41 is line 43
    EXPECT_EQ(e.column(), "vc");
  }
}

TEST(LoadWaveform, StructuralErrors) {
  auto m = manifest_14k4();
  m.sample_count = 7000;
  std::istringstream counted(csv_block(7200, true));
  EXPECT_THROW(load_waveform(counted, m), LoadError);

  std::string text = csv_block(7200, true);
  const auto pos = text.find("\n0.000138");  // swap in a backwards timestamp
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos + 1, 1, "9");
  std::istringstream backwards(text);
  EXPECT_THROW(load_waveform(backwards, manifest_14k4()), LoadError);
}

TEST(WindowShard, RoundTrip) {
  Samples s = Samples::Random(8, 2000);
  std::vector<WaveformWindow> w{WaveformWindow(s, 4000.0), WaveformWindow(s * 2.0, 4000.0)};
  std::vector<long long> ids{5, 9};
  std::stringstream io;
  write_window_shard(io, w, ids);
  const auto back = read_window_shard(io, 4000.0);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].id, 9);
  EXPECT_TRUE((back[1].window.samples().array() == (s * 2.0).array()).all());
}

TEST(WindowBinary, RoundTripIsExact) {
  Samples a = Samples::Random(kChannelCount, 160);
  Samples b = Samples::Random(kChannelCount, 360);
  const TimePoint start = parse_iso8601("2024-05-01T10:00:00.250Z");
  std::vector<WaveformWindow> windows{WaveformWindow(a, 4000.0, 50.0, start), WaveformWindow(b, 6000.0, 50.0)};
  const std::vector<long long> ids{7, -3};
  std::stringstream buf;
  write_window_binary(buf, windows, ids);
  const auto back = read_window_binary(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].id, 7);
  EXPECT_EQ(back[1].id, -3);
  EXPECT_EQ(back[0].window.samples(), a);
  EXPECT_EQ(back[1].window.samples(), b);
  EXPECT_EQ(back[0].window.start_time(), start);
  EXPECT_FALSE(back[1].window.start_time().has_value());
  EXPECT_EQ(back[1].window.sample_rate_hz(), 6000.0);

  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_window_binary(truncated), DataError);
  std::stringstream junk("not a shard at all");
  EXPECT_THROW(read_window_binary(junk), DataError);
}
