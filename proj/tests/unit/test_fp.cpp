#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fpsel/common/error.hpp"
#include "fpsel/common/rng.hpp"
#include "fpsel/features/extract.hpp"
#include "fpsel/fp/pipeline.hpp"
#include "oracles.hpp"

using namespace fpsel;
using namespace fpsel::fp;

namespace {

const TimePoint kBase = parse_iso8601("2024-03-01T00:00:00Z");

TimePoint at_hour(double h) { return add_seconds(kBase, h * 3600.0); }

std::vector<TimePoint> grid(const std::vector<long>& hours) {
  std::vector<TimePoint> out;
  for (long h : hours) out.push_back(at_hour(static_cast<double>(h)));
  return out;
}

std::vector<long> iota_hours(long n) {
  std::vector<long> h(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) h[static_cast<std::size_t>(i)] = i;
  return h;
}

// Random alarm pattern: runs of high probability, occasional NaN hours and
// gaps in the hour grid.
struct Fixture {
  std::vector<long> hours;
  std::vector<double> p;
  std::vector<double> faults;
};

Fixture random_fixture(std::uint64_t seed) {
  Rng rng(seed);
  Fixture fx;
  const long n = 200 + static_cast<long>(rng.below(600));
  double level = 0.2;
  for (long h = 0; h < n; ++h) {
    if (rng.bernoulli(0.03)) continue;  // gap
    if (rng.bernoulli(0.08)) level = rng.bernoulli(0.4) ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, 0.5);
    fx.hours.push_back(h);
    fx.p.push_back(rng.bernoulli(0.02) ? std::nan("") : (rng.bernoulli(0.05) ? 0.5 : level));
  }
  const int nf = static_cast<int>(rng.below(5));
  for (int k = 0; k < nf; ++k) fx.faults.push_back(rng.uniform(-100.0, static_cast<double>(n) + 100.0));
  if (rng.bernoulli(0.3) && !fx.faults.empty()) fx.faults.push_back(std::floor(fx.faults[0]) + 30.0);
  return fx;
}

}  // namespace

TEST(Hourly, ThreeVectorsGiveTextbookStatistics) {
  const std::vector<TimePoint> t{at_hour(0.1), at_hour(0.4), at_hour(0.7)};
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  const auto rows = hourly_aggregate(t, x, 4);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows.values(0, 0), 1.0);
  EXPECT_EQ(rows.values(0, 1), 3.0);
  EXPECT_EQ(rows.values(0, 2), 2.0);
  EXPECT_NEAR(rows.values(0, 3), std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(rows.coverage[0], 0.75);
  EXPECT_FALSE(rows.missing[0]);
  EXPECT_EQ(rows.hours[0], kBase);
}

TEST(Hourly, SingleVectorIsFlagged) {
  const std::vector<TimePoint> t{at_hour(2.5)};
  Eigen::MatrixXd x(1, 2);
  x << 7, -1;
  const auto rows = hourly_aggregate(t, x, 4);
  EXPECT_EQ(rows.values.row(0), (Eigen::RowVectorXd(8) << 7, 7, 7, 0, -1, -1, -1, 0).finished());
  EXPECT_TRUE(rows.missing[0]);
  EXPECT_TRUE(rows.usable_rows().empty());
}

TEST(Hourly, GridIsContiguousAndShapeIsFourPerFeature) {
  std::vector<TimePoint> t;
  for (int k = 0; k < 4; ++k) t.push_back(at_hour(0.25 * k));
  for (int k = 0; k < 4; ++k) t.push_back(at_hour(3.0 + 0.25 * k));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 374);
  const auto rows = hourly_aggregate(t, x, 4);
  EXPECT_EQ(rows.values.cols(), 1496);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.hours[3], at_hour(3));
  EXPECT_EQ(rows.missing, (std::vector<bool>{false, true, true, false}));
  EXPECT_EQ(rows.values.row(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rows.usable_rows(), (std::vector<std::size_t>{0, 3}));

  std::vector<std::string> names{"a", "b"};
  EXPECT_EQ(hourly_column_names(names),
            (std::vector<std::string>{"a@min", "a@max", "a@mean", "a@std", "b@min", "b@max", "b@mean", "b@std"}));
}

TEST(Hourly, MeanStaysBetweenMinAndMax) {
  Rng rng(5);
  std::vector<TimePoint> t;
  const int n = 400;
  Eigen::MatrixXd x(n, 6);
  for (int i = 0; i < n; ++i) {
    t.push_back(at_hour(i * 0.13));
    x(i, 0) = 0.1;
    x(i, 1) = 1e300;
    x(i, 2) = rng.normal();
    x(i, 3) = 1e-300 * rng.normal();
    x(i, 4) = 3.0 + 1e-15 * rng.uniform();
    x(i, 5) = -0.7;
  }
  const auto rows = hourly_aggregate(t, x, 8);
  for (Eigen::Index r = 0; r < rows.values.rows(); ++r) {
    for (Eigen::Index f = 0; f < 6; ++f) {
      EXPECT_LE(rows.values(r, 4 * f), rows.values(r, 4 * f + 2));
      EXPECT_LE(rows.values(r, 4 * f + 2), rows.values(r, 4 * f + 1));
      EXPECT_GE(rows.values(r, 4 * f + 3), 0.0);
    }
  }
}

TEST(Hourly, Errors) {
  const std::vector<TimePoint> t{at_hour(1), at_hour(0.5)};
  EXPECT_THROW(hourly_aggregate(t, Eigen::MatrixXd::Zero(2, 1), 4), DataError);
  EXPECT_THROW(hourly_aggregate(t, Eigen::MatrixXd::Zero(3, 1), 4), InvalidArgument);
  EXPECT_EQ(hourly_aggregate({}, Eigen::MatrixXd::Zero(0, 3), 4).values.cols(), 12);
}

TEST(Scaler, TrainingStatisticsAreStandardised) {
  Rng rng(8);
  Eigen::MatrixXd x(50, 4);
  for (Eigen::Index i = 0; i < 50; ++i) x.row(i) << rng.normal() * 3 + 10, rng.uniform(), 4.2, 1e6 * rng.normal();
  std::vector<std::size_t> all(50);
  for (std::size_t i = 0; i < 50; ++i) all[i] = i;
  const auto s = ColumnScaler::fit(x, all);
  const Eigen::MatrixXd z = s.transform(x);
  for (Eigen::Index c : {0, 1, 3}) {
    EXPECT_LE(std::abs(z.col(c).mean()), 1e-9);
    EXPECT_NEAR(std::sqrt(z.col(c).array().square().mean()), 1.0, 1e-9);
  }
  EXPECT_EQ(z.col(2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.scale()(2), 0.0);

  const auto back = ColumnScaler::from_json(s.to_json());
  EXPECT_EQ(back.transform(x), z);
  EXPECT_THROW(ColumnScaler::fit(x, {}), InvalidArgument);
}

TEST(Scaler, TestRowsUseTrainingStatistics) {
  // Two periods: training rows around 0, test rows around 100. Scaling the
  // test period must not look at its own statistics.
  Eigen::MatrixXd train(4, 1), test(2, 1);
  train << -1, 1, -1, 1;
  test << 100, 102;
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto s = ColumnScaler::fit(train, rows);
  const Eigen::MatrixXd z = s.transform(test);
  EXPECT_DOUBLE_EQ(z(0, 0), 100.0);
  EXPECT_DOUBLE_EQ(z(1, 0), 102.0);
  // Usable-row selection: a missing row with a wild value is not fitted.
  Eigen::MatrixXd with_missing(5, 1);
  with_missing << -1, 1, 1e9, -1, 1;
  const std::vector<std::size_t> usable{0, 1, 3, 4};
  EXPECT_EQ(ColumnScaler::fit(with_missing, usable).mean(), s.mean());
  EXPECT_EQ(ColumnScaler::fit(with_missing, usable).scale(), s.scale());
}

TEST(Labels, Examples) {
  const std::vector<TimePoint> faults{at_hour(100)};
  const auto hours = grid({95, 101, 100 - 169, 100 - 168, 100});
  EXPECT_EQ(label_with_horizon(hours, faults, 168), (std::vector<int>{1, 0, 0, 1, 0}));
  EXPECT_EQ(label_with_horizon(hours, faults, 0), (std::vector<int>{0, 0, 0, 0, 0}));
}

TEST(Labels, MatchDirectScan) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto hours = grid(iota_hours(500));
    std::vector<TimePoint> faults;
    for (int k = 0; k < 6; ++k) faults.push_back(at_hour(rng.uniform(-50, 600)));
    const double horizon = rng.uniform(0, 200);
    const auto y = label_with_horizon(hours, faults, horizon);
    for (std::size_t i = 0; i < hours.size(); ++i) {
      int expect = 0;
      for (auto f : faults) {
        const double d = hours_between(hours[i], f);
        if (d > 0 && d <= horizon) expect = 1;
      }
      ASSERT_EQ(y[i], expect) << trial << " " << i;
    }
  }
}

TEST(MovingAverage, Examples) {
  const std::vector<double> c(9, 0.6);
  for (double v : moving_average(c)) EXPECT_DOUBLE_EQ(v, 0.6);
  const std::vector<double> pulse{1, 0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(moving_average(pulse)[4], 0.2);
  EXPECT_DOUBLE_EQ(moving_average(pulse)[5], 0.0);
  EXPECT_DOUBLE_EQ(moving_average(pulse)[1], 0.5);
  const std::vector<double> x{0.3, 0.9, 0.1};
  EXPECT_EQ(moving_average(x, 1), x);
  const std::vector<double> gaps{std::nan(""), 1.0, std::nan(""), 0.0};
  const auto m = moving_average(gaps, 2);
  EXPECT_TRUE(std::isnan(m[0]));
  EXPECT_EQ(m[1], 1.0);
  EXPECT_EQ(m[2], 1.0);
  EXPECT_EQ(m[3], 0.0);
  EXPECT_THROW(moving_average(x, 0), InvalidArgument);
}

TEST(Evaluate, FourOfFiveWithOneFalseAlarm) {
  const auto hours_i = iota_hours(2000);
  std::vector<double> p(hours_i.size(), 0.1);
  std::vector<TimePoint> faults;
  for (long f : {300, 600, 900, 1200, 1500}) {
    faults.push_back(at_hour(static_cast<double>(f)));
    if (f != 1200) {
      for (long h = f - 30; h < f - 20; ++h) p[static_cast<std::size_t>(h)] = 0.8;
    }
  }
  for (long h = 1800; h < 1806; ++h) p[static_cast<std::size_t>(h)] = 0.7;
  const auto r = evaluate(grid(hours_i), p, faults);
  EXPECT_EQ(r.tp, 4);
  EXPECT_EQ(r.fn, 1);
  EXPECT_EQ(r.fp_events, 1);
  EXPECT_DOUBLE_EQ(r.precision, 0.8);
  EXPECT_DOUBLE_EQ(r.recall, 0.8);
  EXPECT_DOUBLE_EQ(r.f1, 0.8);
  EXPECT_EQ(r.lead_times(), (std::vector<double>{30, 30, 30, 30}));
  EXPECT_EQ(r.false_positives[0].hours, 6);
}

TEST(Evaluate, AllZero) {
  const auto hours = grid(iota_hours(300));
  const std::vector<double> p(300, 0.0);
  const std::vector<TimePoint> faults{at_hour(150)};
  const auto r = evaluate(hours, p, faults);
  EXPECT_EQ(r.tp, 0);
  EXPECT_EQ(r.fn, 1);
  EXPECT_EQ(r.fp_events, 0);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_TRUE(lead_time_stats(r).empty());
}

TEST(Evaluate, HandBuiltMonth) {
  // 30 days, faults at hour 200.5 and 500. Alarm runs:
  //  [100, 140)  starts 100.5 h before the first fault, reaches into its
  //              attribution window -> lead 100.5
  //  [150, 160)  same fault, already counted
  //  [300, 302)  200 h before the second fault: pending (inside 240 h)
  //  [420, 430)  attributed to the second fault, lead 80
  //  [600, 605) and [620, 622)  false positives, one event (gap < 24 h)
  //  [700, 701)  second false-positive event
  std::vector<double> p(720, 0.0);
  auto set = [&](long a, long b) {
    for (long h = a; h < b; ++h) p[static_cast<std::size_t>(h)] = 0.9;
  };
  set(100, 140);
  set(150, 160);
  set(300, 302);
  set(420, 430);
  set(600, 605);
  set(620, 622);
  set(700, 701);
  const auto hours = iota_hours(720);
  const std::vector<double> fh{200.5, 500.0};
  const std::vector<TimePoint> faults{at_hour(200.5), at_hour(500)};
  const auto r = evaluate(grid(hours), p, faults);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp_events, 2);
  EXPECT_EQ(r.lead_times(), (std::vector<double>{100.5, 80.0}));
  EXPECT_EQ(r.states[300], HourState::pending);
  EXPECT_EQ(r.states[100], HourState::pending);
  EXPECT_EQ(r.states[130], HourState::attributed);
  EXPECT_EQ(r.states[621], HourState::false_positive);

  const auto o = oracle::brute_force_events(hours, p, fh, 0.5, 84, 168, 240, 24, 4);
  EXPECT_EQ(o.tp, r.tp);
  EXPECT_EQ(o.fn, r.fn);
  EXPECT_EQ(o.fp_events, r.fp_events);
  EXPECT_EQ(o.lead_times, r.lead_times());
}

TEST(Evaluate, MatchesBruteForceOnRandomFixtures) {
  long tp = 0, fn = 0, fp = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Fixture fx = random_fixture(seed);
    std::vector<TimePoint> faults;
    for (double f : fx.faults) faults.push_back(at_hour(f));
    const auto r = evaluate(grid(fx.hours), fx.p, faults);
    std::vector<double> sorted = fx.faults;
    std::sort(sorted.begin(), sorted.end());
    const auto o = oracle::brute_force_events(fx.hours, fx.p, sorted, 0.5, 84, 168, 240, 24, 4);
    ASSERT_EQ(r.tp, o.tp) << seed;
    ASSERT_EQ(r.fn, o.fn) << seed;
    ASSERT_EQ(r.fp_events, o.fp_events) << seed;
    tp += r.tp;
    fn += r.fn;
    fp += r.fp_events;
    const auto leads = r.lead_times();
    ASSERT_EQ(leads.size(), o.lead_times.size()) << seed;
    for (std::size_t k = 0; k < leads.size(); ++k) {
      EXPECT_NEAR(leads[k], o.lead_times[k], 1e-6) << seed;
      EXPECT_GT(leads[k], 0.0);
      EXPECT_LE(leads[k], 168.0);
    }
    // Each positive hour has exactly one non-negative state.
    for (std::size_t i = 0; i < fx.p.size(); ++i) {
      const bool pos = !std::isnan(fx.p[i]) && fx.p[i] >= 0.5;
      ASSERT_EQ(pos, r.states[i] != HourState::negative);
    }
  }
  // The fixtures exercise every outcome.
  EXPECT_GT(tp, 20);
  EXPECT_GT(fn, 5);
  EXPECT_GT(fp, 20);
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(evaluate({}, {}, {}), InvalidArgument);
  const auto hours = grid({0, 1});
  EXPECT_THROW(evaluate(hours, std::vector<double>{0.1}, {}), InvalidArgument);
  const auto backwards = grid({1, 0});
  EXPECT_THROW(evaluate(backwards, std::vector<double>{0.1, 0.2}, {}), InvalidArgument);
}

TEST(LeadTimes, Statistics) {
  EvalReport r;
  for (double l : {30.0, 10.0, 20.0}) r.faults.push_back({kBase, true, l});
  r.faults.push_back({kBase, false, 0.0});
  const auto s = lead_time_stats(r);
  EXPECT_EQ(s.count, 3u);
  EXPECT_DOUBLE_EQ(s.mean, 20.0);
  EXPECT_DOUBLE_EQ(s.median, 20.0);
  EXPECT_DOUBLE_EQ(s.q1, 15.0);
  EXPECT_DOUBLE_EQ(s.q3, 25.0);
  EvalReport one;
  one.faults.push_back({kBase, true, 84.8});
  EXPECT_DOUBLE_EQ(lead_time_stats(one).mean, 84.8);

  std::map<std::string, EvalReport> by{{"A", r}, {"B", one}};
  const std::string j = report_to_json(by);
  EXPECT_NE(j.find("\"combined\""), std::string::npos);
  EXPECT_EQ(j.find("NaN"), std::string::npos);
  EXPECT_NE(report_to_json({{"E", EvalReport{}}}).find("\"lead_time_stats\": null"), std::string::npos);
}

TEST(FaultLog, RoundTripAndClustering) {
  FaultLog log{{"S2", {at_hour(5), at_hour(1)}}, {"S1", {at_hour(3)}}};
  std::stringstream buf;
  write_fault_log(buf, log);
  EXPECT_EQ(buf.str(),
            "station,fault_time_iso8601\nS1,2024-03-01T03:00:00Z\nS2,2024-03-01T01:00:00Z\nS2,2024-03-01T05:00:00Z\n");
  const auto back = read_fault_log(buf);
  EXPECT_EQ(back.at("S2"), (std::vector<TimePoint>{at_hour(1), at_hour(5)}));

  std::stringstream bad("station,fault_time_iso8601\nS1,yesterday\n");
  try {
    read_fault_log(bad);
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "fault_time_iso8601");
  }
  std::stringstream header("time,station\n");
  EXPECT_THROW(read_fault_log(header), LoadError);

  const auto c = cluster_faults({at_hour(30), at_hour(0), at_hour(10), at_hour(23.9), at_hour(24)});
  EXPECT_EQ(c, (std::vector<TimePoint>{at_hour(0), at_hour(24)}));
}

namespace {

// Hourly rows where column 0 rises during the last 40 h before each fault.
StationSeries planted_station(std::string name, long n, std::vector<double> fault_hours, std::uint64_t seed,
                              double offset) {
  Rng rng(seed);
  StationSeries s;
  s.station = std::move(name);
  const auto hours = iota_hours(n);
  s.rows.hours = grid(hours);
  s.rows.values.resize(n, 3);
  s.rows.coverage.assign(static_cast<std::size_t>(n), 1.0);
  s.rows.missing.assign(static_cast<std::size_t>(n), false);
  for (double f : fault_hours) s.faults.push_back(at_hour(f));
  for (long h = 0; h < n; ++h) {
    bool near = false;
    for (double f : fault_hours) near |= f > h && f - h <= 40;
    s.rows.values.row(h) << offset + (near ? 3.0 : 0.0) + 0.3 * rng.normal(), rng.normal(), offset;
  }
  s.rows.missing[5] = true;
  return s;
}

}  // namespace

TEST(Pipeline, TrainPredictEvaluate) {
  std::vector<StationSeries> train{planted_station("A", 1500, {300, 700, 1100}, 1, 0.0),
                                   planted_station("B", 1500, {400, 1000}, 2, 50.0)};
  std::vector<StationSeries> test{planted_station("A", 800, {200, 600}, 3, 0.0),
                                  planted_station("B", 800, {500}, 4, 50.0)};
  FpConfig c;
  c.forest.n_estimators = 30;
  c.horizon_h = 40;
  const FpModel m = train_fp(train, c);
  std::vector<EvalReport> reports;
  for (const auto& s : test) {
    const auto p = predict_fp(m, s);
    EXPECT_TRUE(std::isnan(p.probability[5]));
    EXPECT_FALSE(std::isnan(p.smoothed[5]));
    reports.push_back(evaluate_prediction(p, s.faults, c.eval));
  }
  const auto all = combine(reports);
  EXPECT_EQ(all.tp, 3);
  EXPECT_EQ(all.fp_events, 0);
  EXPECT_DOUBLE_EQ(all.f1, 1.0);

  const FpModel back = FpModel::from_json(m.to_json());
  EXPECT_EQ(predict_fp(back, test[1]).probability.back(), predict_fp(m, test[1]).probability.back());

  StationSeries stranger = test[0];
  stranger.station = "C";
  EXPECT_THROW(predict_fp(m, stranger), DataError);
  std::vector<StationSeries> dup{train[0], train[0]};
  EXPECT_THROW(train_fp(dup, c), InvalidArgument);

  std::stringstream csv_out;
  write_predictions(csv_out, predict_fp(m, test[0]));
  std::string line;
  std::getline(csv_out, line);
  EXPECT_EQ(line, "hour,probability,smoothed,decision");
  for (int k = 0; k < 6; ++k) std::getline(csv_out, line);
  EXPECT_EQ(line.substr(0, 22), "2024-03-01T05:00:00Z,,");
}

TEST(Pipeline, HorizonSweep) {
  std::vector<StationSeries> train{planted_station("A", 1500, {300, 700, 1100}, 1, 0.0)};
  std::vector<StationSeries> test{planted_station("A", 800, {200, 600}, 3, 0.0)};
  FpConfig c;
  c.forest.n_estimators = 20;
  const std::vector<double> hs{24, 72, 168, 336};
  const auto sweep = horizon_sweep(train, test, hs, c);
  ASSERT_EQ(sweep.size(), 4u);
  EXPECT_EQ(sweep[2].horizon_h, 168.0);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(horizon_sweep(train, test, zero, c)[0].report.f1, 0.0);
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(horizon_sweep(train, test, negative, c), InvalidArgument);
}

TEST(Pipeline, RecordingExtractionMatchesDirect) {
  synth::RecordingConfig rc;
  rc.days = 0.25;
  rc.faults = 0;
  const auto rec = synth::gen_fp_recording(rc);
  const auto a = extract_recording(rec, 1, 5);
  const auto b = extract_recording(rec, 3, 64);
  ASSERT_EQ(a.x.rows(), 24);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.x.row(13).transpose(), extract_window(rec.window(13)).values);
  const auto rows = hourly_aggregate(a.times, a.x, rc.windows_per_hour);
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.usable_rows().size(), 6u);
}
