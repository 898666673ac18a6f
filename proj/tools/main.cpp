// Copyright 2026-present the featstress project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "featstress/error.hpp"
#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"
#include "featstress/linalg.hpp"
#include "featstress/metrics.hpp"
#include "featstress/rng.hpp"
#include "featstress/runner.hpp"
#include "featstress/stressor.hpp"
#include "featstress/svm.hpp"
#include "featstress/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace featstress;

namespace {

void write_json_file(const json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// Every run echoes its fully resolved configuration next to its outputs.
void echo_config(const json& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_json_file(config, out_dir / "config.json");
}

std::size_t default_threads() {
  if (const char* env = std::getenv("FEATSTRESS_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return std::size_t(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// "1..30" or "2,4,8"
std::vector<std::size_t> parse_count_list(const std::string& spec) {
  std::vector<std::size_t> out;
  const auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    const std::size_t lo = std::stoull(spec.substr(0, range_pos));
    const std::size_t hi = std::stoull(spec.substr(range_pos + 2));
    if (lo == 0 || hi < lo) throw Error("bad range: " + spec);
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
    if (!tok.empty()) out.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_fraction_list(const std::string& spec) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

ApVariant parse_ap_variant(const std::string& s) {
  if (s == "all-points" || s == "all_points") return ApVariant::all_points;
  if (s == "eleven-point" || s == "eleven_point") return ApVariant::eleven_point;
  throw Error("unknown AP variant: " + s);
}

std::vector<StressorKind> parse_kinds(const std::string& spec) {
  std::vector<StressorKind> kinds;
  if (spec == "all") {
    return {StressorKind::dr1, StressorKind::dr2, StressorKind::q1, StressorKind::q2,
            StressorKind::fc};
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
    if (!tok.empty()) {
      const auto kind = kind_from_name(tok);
      if (!kind) throw Error("unknown stressor: " + tok);
      kinds.push_back(*kind);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (kinds.empty()) throw Error("no stressor kinds given");
  return kinds;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SynthParams params;
  std::string tag = "synthetic-v1";
};

int run_synth(const SynthArgs& a) {
  SyntheticDataset data = generate_synthetic(a.params);
  data.features.source_tag = a.tag;
  fs::create_directories(a.out_dir);
  save_features(data.features, fs::path(a.out_dir) / "features.fmat");
  save_labels(data.labels, fs::path(a.out_dir) / "labels.csv");
  save_split(data.split, fs::path(a.out_dir) / "split.txt");
  echo_config(json{{"command", "synth"},
                   {"out_dir", a.out_dir},
                   {"classes", a.params.classes},
                   {"per_class", a.params.per_class},
                   {"dims", a.params.dims},
                   {"informative", a.params.informative_dims},
                   {"noise", a.params.noise_scale},
                   {"scale_spread", a.params.scale_spread},
                   {"seed", a.params.seed},
                   {"tag", a.tag}},
              a.out_dir);
  std::cout << "wrote " << a.params.classes * a.params.per_class << " rows x "
            << a.params.dims << " dims to " << a.out_dir << "\n";
  return 0;
}

// --- fit -----------------------------------------------------------------

struct FitArgs {
  std::string features;
  std::string split;
  std::string stressor;
  std::size_t p = 0;
  double keep_frac = 0.0;
  std::size_t h = 0;
  std::uint64_t seed = 1;
  std::string dr2_mode = "projection";
  bool allow_large_h = false;
  std::string out;
};

int run_fit(const FitArgs& a) {
  const FeatureMatrix all = load_features(a.features);
  FeatureMatrix train_rows = all;
  if (!a.split.empty()) {
    const DatasetSplit split = load_split(a.split);
    split.validate(all.rows);
    train_rows = take_rows(all, split.train_indices);
  }
  const auto kind = kind_from_name(a.stressor);
  if (!kind) throw Error("unknown stressor: " + a.stressor);
  std::size_t p = a.p;
  if (p == 0 && a.keep_frac > 0.0) {
    p = std::max<std::size_t>(1, std::size_t(a.keep_frac * double(all.dims)));
  }

  StressorModel model;
  switch (*kind) {
    case StressorKind::identity:
      model = fit_identity(all.dims);
      break;
    case StressorKind::dr1: {
      if (p == 0) throw Error("dr1 needs --p or --keep-frac");
      RngStream rng(a.seed, "dr1-fit");
      model = fit_dr1(all.dims, p, rng);
      break;
    }
    case StressorKind::dr2:
      if (p == 0) throw Error("dr2 needs --p or --keep-frac");
      model = fit_dr2(train_rows, p,
                      a.dr2_mode == "coordinate" ? Dr2Mode::coordinate_variance
                                                 : Dr2Mode::projection);
      break;
    case StressorKind::q1:
      if (a.h == 0) throw Error("q1 needs --h");
      model = fit_q1(train_rows, a.h, a.allow_large_h);
      break;
    case StressorKind::q2:
      if (a.h == 0) throw Error("q2 needs --h");
      model = fit_q2(train_rows, a.h, a.allow_large_h);
      break;
    case StressorKind::fc:
      if (p == 0 || a.h == 0) throw Error("fc needs --p (or --keep-frac) and --h");
      model = fit_fc(train_rows, p, a.h, a.allow_large_h);
      break;
  }
  save_model(model, a.out);
  write_json_file(json{{"command", "fit"},
                       {"features", a.features},
                       {"split", a.split},
                       {"stressor", a.stressor},
                       {"p", p},
                       {"h", a.h},
                       {"seed", a.seed},
                       {"dr2_mode", a.dr2_mode},
                       {"allow_large_h", a.allow_large_h},
                       {"out", a.out}},
                  a.out + ".config.json");
  std::cout << "fitted " << kind_name(model.kind) << " model -> " << a.out << "\n";
  return 0;
}

// --- apply ---------------------------------------------------------------

struct ApplyArgs {
  std::string model;
  std::string features;
  std::string out;
};

int run_apply(const ApplyArgs& a) {
  const StressorModel model = load_model(a.model);
  const FeatureMatrix input = load_features(a.features);
  FeatureMatrix output = apply(model, input);
  save_features(output, a.out);
  write_json_file(json{{"command", "apply"},
                       {"model", a.model},
                       {"features", a.features},
                       {"out", a.out}},
                  a.out + ".config.json");
  std::cout << "stressed " << output.rows << " rows -> " << output.dims << " dims\n";
  return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::string features;
  std::string labels;
  std::string split;
  double c = 1.0;
  bool no_normalize = false;
  std::uint64_t seed = 1;
  std::string out;
};

int run_train(const TrainArgs& a) {
  FeatureMatrix features = load_features(a.features);
  const LabelSet labels = load_labels(a.labels);
  const DatasetSplit split = load_split(a.split);
  if (!a.no_normalize) l2_normalize_rows(features);
  TrainOptions opts;
  opts.c = a.c;
  opts.permutation_seed = a.seed;
  const TrainedClassifier clf = train(features, labels, split, opts);
  save_classifier(clf, a.out);
  write_json_file(json{{"command", "train"},
                       {"features", a.features},
                       {"labels", a.labels},
                       {"split", a.split},
                       {"c", a.c},
                       {"normalize", !a.no_normalize},
                       {"seed", a.seed},
                       {"out", a.out}},
                  a.out + ".config.json");
  std::size_t unconverged = 0;
  for (bool ok : clf.converged) unconverged += !ok;
  std::cout << "trained " << clf.classes << " one-vs-rest classifiers";
  if (unconverged > 0) std::cout << " (" << unconverged << " hit the epoch cap)";
  std::cout << " -> " << a.out << "\n";
  return 0;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string classifier;
  std::string features;
  std::string labels;
  std::string split;
  std::string metric = "auto";
  std::string ap_variant;  // empty = derive from the dataset tag
  bool no_normalize = false;
  std::string out;
};

// Datasets tagged voc2007-style follow that benchmark's protocol by default.
std::string default_ap_variant(const FeatureMatrix& features) {
  return features.source_tag.find("voc2007") != std::string::npos ? "eleven-point"
                                                                  : "all-points";
}

int run_eval(EvalArgs a) {
  const TrainedClassifier clf = load_classifier(a.classifier);
  FeatureMatrix features = load_features(a.features);
  LabelSet labels = load_labels(a.labels);
  if (a.ap_variant.empty()) a.ap_variant = default_ap_variant(features);
  if (!a.no_normalize) l2_normalize_rows(features);

  if (!a.split.empty()) {
    const DatasetSplit split = load_split(a.split);
    split.validate(features.rows);
    features = take_rows(features, split.test_indices);
    LabelSet test_labels;
    test_labels.kind = labels.kind;
    test_labels.classes = labels.classes;
    for (std::size_t i : split.test_indices) {
      test_labels.assignments.push_back(labels.assignments[i]);
    }
    labels = std::move(test_labels);
  }

  const bool want_map = a.metric == "map" ||
                        (a.metric == "auto" && labels.kind == LabelKind::multi_label);
  ScoreReport report;
  if (want_map) {
    const FeatureMatrix dec = decision_values(clf, features);
    report = mean_average_precision(dec, labels, parse_ap_variant(a.ap_variant));
  } else {
    report = accuracy(predict(clf, features), labels);
  }
  json j = score_report_to_json(report);
  j["ap_variant"] = a.ap_variant;
  std::cout << (want_map ? "mAP" : "accuracy") << " = " << report.overall << " over "
            << report.n_test << " rows\n";
  if (!a.out.empty()) {
    write_json_file(j, a.out);
    write_json_file(json{{"command", "eval"},
                         {"classifier", a.classifier},
                         {"features", a.features},
                         {"labels", a.labels},
                         {"split", a.split},
                         {"metric", a.metric},
                         {"ap_variant", a.ap_variant},
                         {"normalize", !a.no_normalize},
                         {"out", a.out}},
                    a.out + ".config.json");
  }
  return 0;
}

// --- sweep ---------------------------------------------------------------

struct SweepArgs {
  std::string features;
  std::string labels;
  std::string split;
  std::string stressor;
  std::string schedule_mode = "paper";
  std::string keep_frac;
  std::string p_list;
  std::string h_list;
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  double c = 1.0;
  std::size_t threads = 0;
  std::string ap_variant;  // empty = derive from the dataset tag
  bool strict = false;
  bool no_timing = false;
  std::string dr2_mode = "projection";
  bool allow_large_h = false;
  std::string out_dir;
};

int run_sweep_cmd(SweepArgs a) {
  const FeatureMatrix features = load_features(a.features);
  const LabelSet labels = load_labels(a.labels);
  const DatasetSplit split = load_split(a.split);
  if (a.ap_variant.empty()) a.ap_variant = default_ap_variant(features);

  SweepPlan plan;
  plan.kinds = parse_kinds(a.stressor);
  if (!a.p_list.empty()) {
    plan.steps = parse_count_list(a.p_list);
  } else if (!a.keep_frac.empty()) {
    plan.keep_fractions = parse_fraction_list(a.keep_frac);
  } else if (a.schedule_mode != "paper") {
    throw Error("unknown schedule mode: " + a.schedule_mode);
  }
  if (!a.h_list.empty()) plan.h_values = parse_count_list(a.h_list);
  plan.repetitions = a.reps;
  plan.ap_variant = parse_ap_variant(a.ap_variant);
  plan.master_seed = a.seed;
  plan.c_param = a.c;
  plan.threads = a.threads == 0 ? default_threads() : a.threads;
  plan.record_timing = !a.no_timing;
  plan.strict = a.strict;
  plan.allow_large_h = a.allow_large_h;
  plan.dr2_mode = a.dr2_mode == "coordinate" ? Dr2Mode::coordinate_variance
                                             : Dr2Mode::projection;

  const std::vector<SweepResult> results = run_sweep(plan, features, labels, split);

  fs::create_directories(a.out_dir);
  export_results(results, fs::path(a.out_dir) / "results.jsonl", ExportFormat::jsonl);
  export_results(results, fs::path(a.out_dir) / "results.csv", ExportFormat::csv);
  echo_config(json{{"command", "sweep"},
                   {"features", a.features},
                   {"labels", a.labels},
                   {"split", a.split},
                   {"stressor", a.stressor},
                   {"schedule", a.schedule_mode},
                   {"keep_frac", a.keep_frac},
                   {"p", a.p_list},
                   {"h", a.h_list},
                   {"reps", a.reps},
                   {"seed", a.seed},
                   {"c", a.c},
                   {"threads", plan.threads},
                   {"ap_variant", a.ap_variant},
                   {"strict", a.strict},
                   {"no_timing", a.no_timing},
                   {"dr2_mode", a.dr2_mode},
                   {"allow_large_h", a.allow_large_h},
                   {"out_dir", a.out_dir}},
              a.out_dir);

  std::size_t failed = 0;
  for (const auto& r : results) failed += r.failed();
  std::cout << results.size() << " results (" << failed << " failed) -> " << a.out_dir
            << "\n";
  if (failed > 0 && a.strict) return 3;
  return 0;
}

// --- report --------------------------------------------------------------

struct ReportArgs {
  std::string results;
  std::string out_dir;
};

int run_report(const ReportArgs& a) {
  const std::vector<SweepResult> results = import_jsonl(a.results);
  fs::create_directories(a.out_dir);
  if (results.empty()) {
    std::cerr << "warning: results file is empty, emitting header-only tables\n";
  }
  const std::vector<AggregateRow> agg =
      results.empty() ? std::vector<AggregateRow>{} : aggregate(results);
  std::size_t n = 0;
  for (const auto& r : results) n = std::max(n, r.input_dims);

  char buf[64];
  auto pct = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  auto rate4 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };

  for (StressorKind kind : {StressorKind::dr1, StressorKind::dr2}) {
    std::ofstream out(fs::path(a.out_dir) / (std::string("report_") + kind_name(kind) + ".csv"));
    out << "p_percent,mean_retention,std\n";
    for (const auto& row : agg) {
      if (row.kind != kind) continue;
      out << pct(100.0 * double(row.p) / double(n)) << ',' << pct(row.retention_mean) << ','
          << pct(row.retention_std) << "\n";
    }
  }
  for (StressorKind kind : {StressorKind::q1, StressorKind::q2}) {
    std::ofstream out(fs::path(a.out_dir) / (std::string("report_") + kind_name(kind) + ".csv"));
    out << "h,mean_retention,std\n";
    for (const auto& row : agg) {
      if (row.kind != kind) continue;
      out << row.h << ',' << pct(row.retention_mean) << ',' << pct(row.retention_std) << "\n";
    }
  }
  {
    std::ofstream out(fs::path(a.out_dir) / "report_fc.csv");
    out << "p,h,p_percent,rate,mean_retention,std\n";
    for (const auto& row : agg) {
      if (row.kind != StressorKind::fc) continue;
      const CompressionFigure fig = compression_figure(n, row.p, row.h, 1.0, 1.0);
      out << row.p << ',' << row.h << ',' << pct(100.0 * double(row.p) / double(n)) << ','
          << rate4(fig.rate) << ',' << pct(row.retention_mean) << ',' << pct(row.retention_std)
          << "\n";
    }
  }
  echo_config(json{{"command", "report"}, {"results", a.results}, {"out_dir", a.out_dir}},
              a.out_dir);
  std::cout << "report tables -> " << a.out_dir << "\n";
  return 0;
}

// Injects config-file values ahead of the real argv so explicit flags win;
// config keys mirror the long flag names.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") config_path = args[i + 1];
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw Error("cannot open config file " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(std::string("bad config JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config file must hold a flat JSON object");

  std::vector<std::string> merged;
  if (!args.empty()) merged.push_back(args[0]);  // subcommand stays first
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back("--" + key);
      continue;
    }
    merged.push_back("--" + key);
    merged.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  merged.insert(merged.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-vector stress testing: dimension dropping, scalar quantization, "
               "and the linear-SVM evaluation pipeline"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // --h is a real option on fit/sweep, so help stays long-form only
  app.set_help_flag("--help", "print help and exit");
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; keys mirror long flag names")
      ->expected(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->set_help_flag("--help", "print help and exit");
  synth->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth->add_option("--classes", synth_args.params.classes, "number of classes");
  synth->add_option("--per-class", synth_args.params.per_class, "rows per class");
  synth->add_option("--dims", synth_args.params.dims, "feature dimensions");
  synth->add_option("--informative", synth_args.params.informative_dims,
                    "dimensions carrying class separation");
  synth->add_option("--noise", synth_args.params.noise_scale, "gaussian noise scale");
  synth->add_option("--scale-spread", synth_args.params.scale_spread,
                    "per-dimension scale factor upper bound (log-uniform from 1)");
  synth->add_option("--seed", synth_args.params.seed, "generator seed");
  synth->add_option("--tag", synth_args.tag, "source tag written to the FMAT header");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "fit a stressor model");
  fit->set_help_flag("--help", "print help and exit");
  fit->add_option("--features", fit_args.features, "FMAT file")->required();
  fit->add_option("--split", fit_args.split, "split file; fit uses train rows only");
  fit->add_option("--stressor", fit_args.stressor, "identity|dr1|dr2|q1|q2|fc")->required();
  fit->add_option("--p", fit_args.p, "kept dimensions");
  fit->add_option("--keep-frac", fit_args.keep_frac, "kept fraction of dimensions");
  fit->add_option("--h", fit_args.h, "quantizer levels");
  fit->add_option("--seed", fit_args.seed, "seed for randomized stressors");
  fit->add_option("--dr2-mode", fit_args.dr2_mode, "projection|coordinate");
  fit->add_flag("--allow-large-h", fit_args.allow_large_h, "permit h > 30");
  fit->add_option("--out", fit_args.out, "model file to write")->required();

  ApplyArgs apply_args;
  auto* apply_cmd = app.add_subcommand("apply", "apply a stressor model to features");
  apply_cmd->set_help_flag("--help", "print help and exit");
  apply_cmd->add_option("--model", apply_args.model, "model file")->required();
  apply_cmd->add_option("--features", apply_args.features, "FMAT file")->required();
  apply_cmd->add_option("--out", apply_args.out, "stressed FMAT file to write")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train the one-vs-rest linear SVM");
  train_cmd->set_help_flag("--help", "print help and exit");
  train_cmd->add_option("--features", train_args.features, "FMAT file")->required();
  train_cmd->add_option("--labels", train_args.labels, "labels CSV")->required();
  train_cmd->add_option("--split", train_args.split, "split file")->required();
  train_cmd->add_option("--c", train_args.c, "regularization constant");
  train_cmd->add_flag("--no-normalize", train_args.no_normalize,
                      "skip l2 normalization of rows");
  train_cmd->add_option("--seed", train_args.seed, "coordinate permutation seed");
  train_cmd->add_option("--out", train_args.out, "classifier file to write")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a classifier");
  eval_cmd->set_help_flag("--help", "print help and exit");
  eval_cmd->add_option("--classifier", eval_args.classifier, "classifier file")->required();
  eval_cmd->add_option("--features", eval_args.features, "FMAT file")->required();
  eval_cmd->add_option("--labels", eval_args.labels, "labels CSV")->required();
  eval_cmd->add_option("--split", eval_args.split, "split file; scores the test rows");
  eval_cmd->add_option("--metric", eval_args.metric, "auto|map|accuracy");
  eval_cmd->add_option("--ap-variant", eval_args.ap_variant,
                       "all-points|eleven-point (default: eleven-point for voc2007-tagged data)");
  eval_cmd->add_flag("--no-normalize", eval_args.no_normalize,
                     "skip l2 normalization of rows");
  eval_cmd->add_option("--out", eval_args.out, "write the score report JSON here");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a stressor parameter sweep");
  sweep_cmd->set_help_flag("--help", "print help and exit");
  sweep_cmd->add_option("--features", sweep_args.features, "FMAT file")->required();
  sweep_cmd->add_option("--labels", sweep_args.labels, "labels CSV")->required();
  sweep_cmd->add_option("--split", sweep_args.split, "split file")->required();
  sweep_cmd->add_option("--stressor", sweep_args.stressor,
                        "comma list of dr1,dr2,q1,q2,fc or 'all'")
      ->required();
  sweep_cmd->add_option("--schedule", sweep_args.schedule_mode,
                        "'paper' = the 20-step dimension schedule");
  sweep_cmd->add_option("--keep-frac", sweep_args.keep_frac,
                        "comma list of kept fractions, overrides --schedule");
  sweep_cmd->add_option("--p", sweep_args.p_list, "explicit p values (list or a..b)");
  sweep_cmd->add_option("--h", sweep_args.h_list, "quantizer levels (list or a..b)");
  sweep_cmd->add_option("--reps", sweep_args.reps, "repetitions for randomized stressors");
  sweep_cmd->add_option("--seed", sweep_args.seed, "master seed");
  sweep_cmd->add_option("--c", sweep_args.c, "SVM regularization constant");
  sweep_cmd->add_option("--threads", sweep_args.threads,
                        "worker threads (default: cores, or FEATSTRESS_THREADS)");
  sweep_cmd->add_option("--ap-variant", sweep_args.ap_variant,
                        "all-points|eleven-point (default: eleven-point for voc2007-tagged data)");
  sweep_cmd->add_flag("--strict", sweep_args.strict,
                      "exit nonzero when any cell fails; strict mAP class policy");
  sweep_cmd->add_flag("--no-timing", sweep_args.no_timing,
                      "report ms as 0 for byte-stable outputs");
  sweep_cmd->add_option("--dr2-mode", sweep_args.dr2_mode, "projection|coordinate");
  sweep_cmd->add_flag("--allow-large-h", sweep_args.allow_large_h, "permit h > 30");
  sweep_cmd->add_option("--out-dir", sweep_args.out_dir, "output directory")->required();

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "emit plot-ready tables from sweep results");
  report_cmd->set_help_flag("--help", "print help and exit");
  report_cmd->add_option("--results", report_args.results, "results.jsonl from sweep")
      ->required();
  report_cmd->add_option("--out-dir", report_args.out_dir, "output directory")->required();

  for (CLI::App* sub : {synth, fit, apply_cmd, train_cmd, eval_cmd, sweep_cmd, report_cmd}) {
    sub->add_option("--config", config_path, "JSON config file; keys mirror long flag names")
        ->expected(1);
  }

  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> argv2;
    argv2.push_back(argc > 0 ? argv[0] : "featstress");
    for (const auto& s : args) argv2.push_back(s.c_str());
    app.parse(int(argv2.size()), argv2.data());

    if (synth->parsed()) return run_synth(synth_args);
    if (fit->parsed()) return run_fit(fit_args);
    if (apply_cmd->parsed()) return run_apply(apply_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_args);
    if (report_cmd->parsed()) return run_report(report_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
