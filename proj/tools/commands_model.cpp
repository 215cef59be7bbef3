// select, train, predict, eval, correlate, sweep

#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "fpsel/common/csv.hpp"
#include "fpsel/common/error.hpp"
#include "fpsel/features/registry.hpp"
#include "fpsel/fp/pipeline.hpp"
#include "fpsel/learn/metrics.hpp"
#include "fpsel/select/correlation.hpp"
#include "fpsel/select/rfe.hpp"

namespace fpsel::cli {

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

ForestParams forest_params(const RunConfig& c) {
  ForestParams p;
  p.n_estimators = c.trees;
  p.seed = c.seed;
  p.threads = c.threads;
  return p;
}

FeatureSelection load_selection(const fs::path& path) {
  auto s = FeatureSelection::from_json(read_text(path));
  if (s.registry_hash != default_registry().hash()) {
    throw DataError("selection " + path.string() + ": registry hash mismatch");
  }
  return s;
}

std::vector<std::size_t> all_columns() {
  std::vector<std::size_t> cols(default_registry().size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return cols;
}

std::string station_of(const fs::path& path, const RunConfig& c) {
  const json meta = read_meta(path);
  return meta.contains("station") ? meta["station"].get<std::string>() : c.station;
}

fp::FaultLog load_faults(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  fp::FaultLog log = fp::read_fault_log(in);
  for (auto& [station, faults] : log) faults = fp::cluster_faults(faults);
  return log;
}

// Hourly rows of one feature file restricted to `columns`.
fp::StationSeries station_series(const fs::path& path, const std::vector<std::size_t>& columns,
                                 const fp::FaultLog& faults, const RunConfig& c) {
  const FeatureTable t = read_feature_table(path);
  std::vector<TimePoint> times;
  times.reserve(t.times.size());
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    if (!t.times[i]) throw DataError(path.string() + ": window " + std::to_string(t.ids[i]) + " has no start time");
    times.push_back(*t.times[i]);
  }
  const json meta = read_meta(path);
  const double per_hour = meta.contains("windows_per_hour") ? meta["windows_per_hour"].get<double>() : c.windows_per_hour;
  fp::StationSeries s;
  s.station = station_of(path, c);
  s.rows = fp::hourly_aggregate(times, select_columns(t.x, columns), per_hour);
  const auto it = faults.find(s.station);
  if (it != faults.end()) s.faults = it->second;
  return s;
}

void run_select(const RunConfig& c, const fs::path& features, const fs::path& labels, const fs::path& mask,
                const fs::path& trace_out, const fs::path& selection_out) {
  const FeatureTable t = read_feature_table(features);
  std::vector<int> y = read_labels(labels, t.ids);
  const int k = count_classes(y);
  Dataset d{t.x, std::move(y), k, std::nullopt};
  std::vector<fs::path> inputs{features, labels};
  if (!mask.empty()) {
    d.mask = load_selection(mask).indices;
    inputs.push_back(mask);
  }
  const RfeSchedule schedule{c.rfe_step, c.rfe_fraction, static_cast<std::size_t>(c.rfe_floor)};
  const FoldPlan plan{FoldKind::stratified_kfold, c.folds, true, c.seed};
  const RfeTrace trace = rfe_cv(d, schedule, plan, forest_params(c));
  {
    auto out = open_out(trace_out);
    write_rfe_trace(out, trace, t.names);
  }
  FeatureSelection s;
  s.registry_hash = default_registry().hash();
  s.indices = trace.chosen;
  for (auto i : s.indices) s.names.push_back(t.names[i]);
  write_text(selection_out, s.to_json() + "\n");
  write_manifests("select", c, inputs, {trace_out, selection_out}, {{"registry_hash", s.registry_hash}});
  std::cout << trace.iterations.size() << " iterations, chosen " << s.indices.size() << " features (CV accuracy "
            << trace.chosen_accuracy << ")\n";
}

void run_train(const RunConfig& c, const std::vector<fs::path>& features, const fs::path& faults_path,
               const fs::path& selection_path, const fs::path& model_out) {
  const auto selection = load_selection(selection_path);
  const auto faults = load_faults(faults_path);
  std::vector<fp::StationSeries> series;
  for (const auto& f : features) series.push_back(station_series(f, selection.indices, faults, c));
  fp::FpConfig fc;
  fc.forest = forest_params(c);
  fc.horizon_h = c.horizon_h;
  fc.smooth_width = c.smooth_width;
  fp::FpModel model = fp::train_fp(series, fc);
  model.columns = selection.names;
  model.registry_hash = selection.registry_hash;
  model.save(model_out);
  std::vector<fs::path> inputs = features;
  inputs.push_back(faults_path);
  inputs.push_back(selection_path);
  write_manifests("train", c, inputs, {model_out}, {{"registry_hash", model.registry_hash}});
  std::cout << "trained on " << series.size() << " station period(s), " << model.forest.n_features() << " columns\n";
}

void run_predict(const RunConfig& c, const fs::path& model_path, const fs::path& features, const fs::path& out_path) {
  require_file(model_path);
  const fp::FpModel model = fp::FpModel::load(model_path);
  if (model.registry_hash != default_registry().hash()) throw DataError("model: registry hash mismatch");
  std::vector<std::size_t> cols;
  for (const auto& n : model.columns) cols.push_back(default_registry().require(n));
  const auto series = station_series(features, cols, {}, c);
  const auto p = fp::predict_fp(model, series);
  {
    auto out = open_out(out_path);
    fp::write_predictions(out, p);
  }
  write_manifests("predict", c, {model_path, features}, {out_path}, {{"station", series.station}});
  std::cout << p.hours.size() << " hourly predictions for " << series.station << "\n";
}

fp::StationPrediction read_predictions(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  csv::Reader reader(in);
  const auto header = reader.header();
  if (header != std::vector<std::string>{"hour", "probability", "smoothed", "decision"}) {
    throw LoadError("predictions: expected 'hour,probability,smoothed,decision' header", 1, "");
  }
  fp::StationPrediction p;
  std::vector<std::string_view> fields;
  auto number = [&](std::string_view f, const char* col) {
    return f.empty() ? std::nan("") : csv::parse_double(f, reader.row(), col);
  };
  while (reader.next(fields)) {
    if (fields.size() != 4) throw LoadError("predictions: expected 4 fields", reader.row(), "");
    try {
      p.hours.push_back(parse_iso8601(fields[0]));
    } catch (const DataError& e) {
      throw LoadError(e.what(), reader.row(), "hour");
    }
    p.probability.push_back(number(fields[1], "probability"));
    p.smoothed.push_back(number(fields[2], "smoothed"));
  }
  return p;
}

void run_eval(const RunConfig& c, const std::vector<fs::path>& predictions, const fs::path& faults_path,
              const fs::path& report_out, const fs::path& leads_out) {
  const auto faults = load_faults(faults_path);
  std::map<std::string, fp::EvalReport> reports;
  for (const auto& path : predictions) {
    const std::string station = station_of(path, c);
    if (reports.count(station)) throw InvalidArgument("eval: station " + station + " given twice");
    const auto it = faults.find(station);
    const std::vector<TimePoint> none;
    reports[station] = fp::evaluate_prediction(read_predictions(path), it == faults.end() ? none : it->second);
  }
  write_text(report_out, fp::report_to_json(reports) + "\n");
  std::vector<fs::path> outputs{report_out};
  if (!leads_out.empty()) {
    auto out = open_out(leads_out);
    csv::write_row(out, {"station", "fault_time", "detected", "lead_h"});
    for (const auto& [station, r] : reports) {
      for (const auto& f : r.faults) {
        csv::write_row(out, {station, format_iso8601(f.time), f.detected ? "1" : "0",
                             f.detected ? csv::format_double(f.lead_h) : ""});
      }
    }
    out.close();
    outputs.push_back(leads_out);
  }
  std::vector<fs::path> inputs = predictions;
  inputs.push_back(faults_path);
  write_manifests("eval", c, inputs, outputs);
  std::vector<fp::EvalReport> all;
  for (const auto& [s, r] : reports) all.push_back(r);
  const auto combined = fp::combine(all);
  const auto stats = fp::lead_time_stats(combined);
  std::cout << "precision " << combined.precision << " recall " << combined.recall << " F1 " << combined.f1;
  if (!stats.empty()) std::cout << " mean lead " << stats.mean << " h";
  std::cout << "\n";
}

// Stacked, per-station standardised hourly rows of every registry feature
// with horizon labels (usable hours only).
Dataset fp_dataset(const std::vector<fs::path>& features, const fp::FaultLog& faults, const RunConfig& c) {
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<int> y;
  Eigen::Index rows = 0;
  for (const auto& f : features) {
    const auto s = station_series(f, all_columns(), faults, c);
    const auto usable = s.rows.usable_rows();
    if (usable.empty()) throw DataError(f.string() + ": no usable hours");
    const auto scaler = fp::ColumnScaler::fit(s.rows.values, usable);
    blocks.push_back(scaler.transform(select_rows(s.rows.values, usable)));
    const auto labels = fp::label_with_horizon(s.rows.hours, s.faults, c.horizon_h);
    for (auto r : usable) y.push_back(labels[r]);
    rows += blocks.back().rows();
  }
  Dataset d{Eigen::MatrixXd(rows, blocks.front().cols()), std::move(y), 2, std::nullopt};
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    d.x.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return d;
}

void run_correlate(const RunConfig& c, const fs::path& features, const fs::path& labels,
                   const std::vector<fs::path>& fp_features, const fs::path& faults_path, const fs::path& out_path,
                   const fs::path& summary_out) {
  const FeatureTable t = read_feature_table(features);
  std::vector<int> y = read_labels(labels, t.ids);
  const int k = count_classes(y);
  const Dataset surrogate{t.x, std::move(y), k, std::nullopt};
  const Dataset fp = fp_dataset(fp_features, load_faults(faults_path), c);
  CorrelationOptions o;
  o.min_size = static_cast<std::size_t>(c.subset_min);
  o.max_size = static_cast<std::size_t>(c.subset_max);
  o.surrogate_plan = FoldPlan{FoldKind::stratified_kfold, c.folds, true, c.seed};
  o.fp_plan = FoldPlan{FoldKind::timeseries_split, c.folds, false, c.seed};
  o.fp_group = fp::kHourlyStats;
  o.forest = forest_params(c);
  o.threads = c.threads;
  const auto result = correlation_study(surrogate, fp, c.subsets, c.seed, o);
  {
    auto out = open_out(out_path);
    csv::write_row(out, {"subset", "size", "surrogate_accuracy", "fp_f1", "features"});
    for (std::size_t i = 0; i < result.table.size(); ++i) {
      const auto& s = result.table[i];
      std::string names;
      for (auto f : s.features) names += (names.empty() ? "" : ";") + t.names[f];
      csv::write_row(out, {std::to_string(i), std::to_string(s.features.size()), csv::format_double(s.surrogate),
                           csv::format_double(s.fp), names});
    }
  }
  const json summary{{"pearson_r", result.pearson.r}, {"p_value", result.pearson.p}, {"subsets", result.pearson.n}};
  write_text(summary_out, summary.dump(2) + "\n");
  std::vector<fs::path> inputs{features, labels};
  inputs.insert(inputs.end(), fp_features.begin(), fp_features.end());
  inputs.push_back(faults_path);
  write_manifests("correlate", c, inputs, {out_path, summary_out});
  std::cout << "r = " << result.pearson.r << ", p = " << result.pearson.p << " over " << result.pearson.n
            << " subsets\n";
}

void run_sweep(const RunConfig& c, const std::vector<fs::path>& train, const std::vector<fs::path>& test,
               const fs::path& faults_path, const fs::path& selection_path, const fs::path& out_path) {
  const auto selection = load_selection(selection_path);
  const auto faults = load_faults(faults_path);
  std::vector<fp::StationSeries> tr, te;
  for (const auto& f : train) tr.push_back(station_series(f, selection.indices, faults, c));
  for (const auto& f : test) te.push_back(station_series(f, selection.indices, faults, c));
  fp::FpConfig fc;
  fc.forest = forest_params(c);
  fc.smooth_width = c.smooth_width;
  const auto sweep = fp::horizon_sweep(tr, te, c.horizons, fc);
  {
    auto out = open_out(out_path);
    csv::write_row(out, {"horizon_h", "tp", "fn", "fp_events", "precision", "recall", "f1", "mean_lead_h"});
    for (const auto& p : sweep) {
      const auto s = fp::lead_time_stats(p.report);
      csv::write_row(out, {csv::format_double(p.horizon_h), std::to_string(p.report.tp), std::to_string(p.report.fn),
                           std::to_string(p.report.fp_events), csv::format_double(p.report.precision),
                           csv::format_double(p.report.recall), csv::format_double(p.report.f1),
                           s.empty() ? "" : csv::format_double(s.mean)});
      std::cout << "horizon " << p.horizon_h << " h: F1 " << p.report.f1 << "\n";
    }
  }
  std::vector<fs::path> inputs = train;
  inputs.insert(inputs.end(), test.begin(), test.end());
  inputs.push_back(faults_path);
  inputs.push_back(selection_path);
  write_manifests("sweep", c, inputs, {out_path});
}

std::vector<fs::path> resolved(const std::vector<fs::path>& v) {
  std::vector<fs::path> out;
  for (const auto& p : v) out.push_back(resolve(p));
  return out;
}

fs::path resolved_opt(const fs::path& p) { return p.empty() ? p : resolve(p); }

}  // namespace

void add_model_commands(CLI::App& app, RunConfig& c) {
  static fs::path sel_features, sel_labels, sel_mask, sel_trace, sel_out;
  auto* sel = app.add_subcommand("select", "Recursive feature elimination on a labelled feature table");
  sel->add_option("--features", sel_features, "Feature CSV")->required();
  sel->add_option("--labels", sel_labels, "Label CSV (window,label)")->required();
  sel->add_option("--mask", sel_mask, "Selection JSON restricting the start set");
  sel->add_option("--step", c.rfe_step, "Features removed per round")->check(CLI::PositiveNumber);
  sel->add_option("--fraction", c.rfe_fraction, "Fraction removed per round above --floor")->check(CLI::Range(0.0, 1.0));
  sel->add_option("--floor", c.rfe_floor, "Feature count where fractional removal stops")->check(CLI::NonNegativeNumber);
  sel->add_option("--folds", c.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  sel->add_option("--trees", c.trees, "Trees per forest")->check(CLI::PositiveNumber);
  sel->add_option("--seed", c.seed, "Seed");
  sel->add_option("--trace", sel_trace, "Output trace CSV")->required();
  sel->add_option("--out", sel_out, "Output selection JSON")->required();
  sel->callback([&c] {
    run_select(c, resolve(sel_features), resolve(sel_labels), resolved_opt(sel_mask), resolve(sel_trace),
               resolve(sel_out));
  });

  static std::vector<fs::path> tr_features;
  static fs::path tr_faults, tr_selection, tr_out;
  auto* tr = app.add_subcommand("train", "Train the fault prediction model");
  tr->add_option("--features", tr_features, "Feature CSV of one station period (repeatable)")->required();
  tr->add_option("--faults", tr_faults, "Fault log CSV")->required();
  tr->add_option("--selection", tr_selection, "Selection JSON")->required();
  tr->add_option("--horizon", c.horizon_h, "Prediction horizon in hours")->check(CLI::NonNegativeNumber);
  tr->add_option("--smooth", c.smooth_width, "Moving-average width in hours")->check(CLI::PositiveNumber);
  tr->add_option("--trees", c.trees, "Trees")->check(CLI::PositiveNumber);
  tr->add_option("--seed", c.seed, "Seed");
  tr->add_option("--station", c.station, "Station for feature files without one");
  tr->add_option("--out", tr_out, "Output model JSON")->required();
  tr->callback([&c] { run_train(c, resolved(tr_features), resolve(tr_faults), resolve(tr_selection), resolve(tr_out)); });

  static fs::path pr_model, pr_features, pr_out;
  auto* pr = app.add_subcommand("predict", "Hourly fault probabilities for one station period");
  pr->add_option("--model", pr_model, "Model JSON")->required();
  pr->add_option("--features", pr_features, "Feature CSV")->required();
  pr->add_option("--station", c.station, "Station for feature files without one");
  pr->add_option("--out", pr_out, "Output prediction CSV")->required();
  pr->callback([&c] { run_predict(c, resolve(pr_model), resolve(pr_features), resolve(pr_out)); });

  static std::vector<fs::path> ev_predictions;
  static fs::path ev_faults, ev_out, ev_leads;
  auto* ev = app.add_subcommand("eval", "Event-level precision, recall, F1 and lead times");
  ev->add_option("--predictions", ev_predictions, "Prediction CSV (repeatable, one per station)")->required();
  ev->add_option("--faults", ev_faults, "Fault log CSV")->required();
  ev->add_option("--station", c.station, "Station for prediction files without one");
  ev->add_option("--out", ev_out, "Output report JSON")->required();
  ev->add_option("--lead-times", ev_leads, "Optional per-fault lead-time CSV");
  ev->callback([&c] {
    run_eval(c, resolved(ev_predictions), resolve(ev_faults), resolve(ev_out), resolved_opt(ev_leads));
  });

  static fs::path co_features, co_labels, co_faults, co_out, co_summary;
  static std::vector<fs::path> co_fp;
  auto* co = app.add_subcommand("correlate", "Correlate surrogate and FP scores of random feature subsets");
  co->add_option("--features", co_features, "Surrogate feature CSV")->required();
  co->add_option("--labels", co_labels, "Surrogate label CSV")->required();
  co->add_option("--fp-features", co_fp, "FP feature CSV (repeatable)")->required();
  co->add_option("--faults", co_faults, "Fault log CSV")->required();
  co->add_option("--subsets", c.subsets, "Number of random subsets")->check(CLI::Range(3, 1000000));
  co->add_option("--min-size", c.subset_min, "Smallest subset")->check(CLI::PositiveNumber);
  co->add_option("--max-size", c.subset_max, "Largest subset")->check(CLI::PositiveNumber);
  co->add_option("--horizon", c.horizon_h, "FP label horizon in hours")->check(CLI::NonNegativeNumber);
  co->add_option("--folds", c.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  co->add_option("--trees", c.trees, "Trees")->check(CLI::PositiveNumber);
  co->add_option("--seed", c.seed, "Seed");
  co->add_option("--out", co_out, "Output subset table CSV")->required();
  co->add_option("--summary", co_summary, "Output summary JSON")->required();
  co->callback([&c] {
    run_correlate(c, resolve(co_features), resolve(co_labels), resolved(co_fp), resolve(co_faults), resolve(co_out),
                  resolve(co_summary));
  });

  static std::vector<fs::path> sw_train, sw_test;
  static fs::path sw_faults, sw_selection, sw_out;
  auto* sw = app.add_subcommand("sweep", "F1 across prediction horizons");
  sw->add_option("--train", sw_train, "Training feature CSV (repeatable)")->required();
  sw->add_option("--test", sw_test, "Test feature CSV (repeatable)")->required();
  sw->add_option("--faults", sw_faults, "Fault log CSV")->required();
  sw->add_option("--selection", sw_selection, "Selection JSON")->required();
  sw->add_option("--horizons", c.horizons, "Horizons in hours")->delimiter(',');
  sw->add_option("--trees", c.trees, "Trees")->check(CLI::PositiveNumber);
  sw->add_option("--seed", c.seed, "Seed");
  sw->add_option("--out", sw_out, "Output CSV")->required();
  sw->callback([&c] {
    run_sweep(c, resolved(sw_train), resolved(sw_test), resolve(sw_faults), resolve(sw_selection), resolve(sw_out));
  });
}

}  // namespace fpsel::cli
