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

#include "featstress/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "featstress/error.hpp"
#include "featstress/linalg.hpp"
#include "featstress/rng.hpp"
#include "featstress/svm.hpp"

#include "json.hpp"

namespace featstress {

std::uint64_t cell_seed(std::uint64_t master_seed, StressorKind kind, std::size_t p,
                        std::size_t h, std::size_t rep) {
  const std::string label = std::string("cell:") + kind_name(kind) + ":" +
                            std::to_string(p) + ":" + std::to_string(h) + ":" +
                            std::to_string(rep);
  return derive_seed(master_seed, label);
}

namespace {

struct Cell {
  StressorKind kind;
  std::size_t p;
  std::size_t h;
  std::size_t rep;
};

std::vector<std::size_t> resolve_steps(const SweepPlan& plan, std::size_t n) {
  if (!plan.steps.empty()) {
    for (std::size_t p : plan.steps) {
      if (p == 0 || p > n) throw Error("sweep: step p=" + std::to_string(p) + " out of range");
    }
    return plan.steps;
  }
  if (!plan.keep_fractions.empty()) {
    std::vector<std::size_t> steps;
    for (double f : plan.keep_fractions) {
      if (!(f > 0.0) || f > 1.0) throw Error("sweep: keep fraction must be in (0,1]");
      steps.push_back(std::max<std::size_t>(1, std::size_t(f * double(n))));
    }
    return steps;
  }
  return schedule(n).steps;
}

double cell_rate(const Cell& cell, std::size_t n) {
  switch (cell.kind) {
    case StressorKind::identity:
      return 0.0;
    case StressorKind::dr1:
    case StressorKind::dr2:
      return compression_figure_dr(n, cell.p, 1.0, 1.0).rate;
    case StressorKind::q1:
    case StressorKind::q2:
      return compression_figure(n, n, cell.h, 1.0, 1.0).rate;
    case StressorKind::fc:
      return compression_figure(n, cell.p, cell.h, 1.0, 1.0).rate;
  }
  return 0.0;
}

// Full pipeline for one cell. Train/test matrices are stressed with a model
// fitted on the train rows only, l2-normalized, then scored on test.
ScoreReport evaluate_cell(const SweepPlan& plan, const Cell& cell, std::uint64_t seed,
                          const FeatureMatrix& train_m, const FeatureMatrix& test_m,
                          const LabelSet& train_labels, const LabelSet& test_labels) {
  StressorModel model;
  switch (cell.kind) {
    case StressorKind::identity:
      model = fit_identity(train_m.dims);
      break;
    case StressorKind::dr1: {
      RngStream rng(seed, "dr1-fit");
      model = fit_dr1(train_m.dims, cell.p, rng);
      break;
    }
    case StressorKind::dr2:
      model = fit_dr2(train_m, cell.p, plan.dr2_mode);
      break;
    case StressorKind::q1:
      model = fit_q1(train_m, cell.h, plan.allow_large_h);
      break;
    case StressorKind::q2:
      model = fit_q2(train_m, cell.h, plan.allow_large_h);
      break;
    case StressorKind::fc:
      model = fit_fc(train_m, cell.p, cell.h, plan.allow_large_h);
      break;
  }

  FeatureMatrix stressed_train = apply(model, train_m);
  FeatureMatrix stressed_test = apply(model, test_m);
  l2_normalize_rows(stressed_train);
  l2_normalize_rows(stressed_test);

  DatasetSplit local;
  local.train_indices.resize(stressed_train.rows);
  for (std::size_t i = 0; i < stressed_train.rows; ++i) local.train_indices[i] = i;
  local.test_indices.resize(stressed_test.rows);
  for (std::size_t i = 0; i < stressed_test.rows; ++i) {
    local.test_indices[i] = stressed_train.rows + i;
  }

  FeatureMatrix combined = make_matrix(stressed_train.rows + stressed_test.rows,
                                       stressed_train.dims, stressed_train.source_tag);
  std::copy(stressed_train.values.begin(), stressed_train.values.end(),
            combined.values.begin());
  std::copy(stressed_test.values.begin(), stressed_test.values.end(),
            combined.values.begin() + std::ptrdiff_t(stressed_train.values.size()));

  LabelSet combined_labels;
  combined_labels.kind = train_labels.kind;
  combined_labels.classes = train_labels.classes;
  combined_labels.assignments = train_labels.assignments;
  combined_labels.assignments.insert(combined_labels.assignments.end(),
                                     test_labels.assignments.begin(),
                                     test_labels.assignments.end());

  TrainOptions opts;
  opts.c = plan.c_param;
  opts.permutation_seed = seed;
  const TrainedClassifier clf = featstress::train(combined, combined_labels, local, opts);

  if (test_labels.kind == LabelKind::multi_label) {
    const FeatureMatrix dec = decision_values(clf, stressed_test);
    return mean_average_precision(dec, test_labels, plan.ap_variant,
                                  plan.strict ? ZeroPositivePolicy::strict
                                              : ZeroPositivePolicy::exclude_and_report);
  }
  return accuracy(predict(clf, stressed_test), test_labels);
}

}  // namespace

std::vector<SweepResult> run_sweep(const SweepPlan& plan, const FeatureMatrix& features,
                                   const LabelSet& labels, const DatasetSplit& split) {
  features.validate();
  labels.validate();
  if (labels.rows() != features.rows) throw Error("sweep: labels/features row mismatch");
  split.validate(features.rows);
  if (plan.repetitions == 0) throw Error("sweep: repetitions must be >= 1");
  if (plan.kinds.empty()) throw Error("sweep: no stressor kinds given");

  const std::size_t n = features.dims;
  std::vector<std::size_t> h_values = plan.h_values;
  if (h_values.empty()) {
    for (std::size_t h = 1; h <= 30; ++h) h_values.push_back(h);
  }

  std::vector<Cell> cells;
  bool need_steps = false;
  for (StressorKind kind : plan.kinds) {
    if (kind == StressorKind::dr1 || kind == StressorKind::dr2 || kind == StressorKind::fc) {
      need_steps = true;
    }
  }
  const std::vector<std::size_t> steps = need_steps ? resolve_steps(plan, n)
                                                    : std::vector<std::size_t>{};
  for (StressorKind kind : plan.kinds) {
    switch (kind) {
      case StressorKind::identity:
        break;  // the baseline covers it
      case StressorKind::dr1:
        for (std::size_t p : steps) {
          for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
            cells.push_back({kind, p, 0, rep});
          }
        }
        break;
      case StressorKind::dr2:
        for (std::size_t p : steps) cells.push_back({kind, p, 0, 0});
        break;
      case StressorKind::q1:
      case StressorKind::q2:
        for (std::size_t h : h_values) cells.push_back({kind, n, h, 0});
        break;
      case StressorKind::fc:
        for (std::size_t p : steps) {
          for (std::size_t h : h_values) cells.push_back({kind, p, h, 0});
        }
        break;
    }
  }

  const FeatureMatrix train = take_rows(features, split.train_indices);
  const FeatureMatrix test = take_rows(features, split.test_indices);
  LabelSet train_labels, test_labels;
  train_labels.kind = test_labels.kind = labels.kind;
  train_labels.classes = test_labels.classes = labels.classes;
  for (std::size_t i : split.train_indices) {
    train_labels.assignments.push_back(labels.assignments[i]);
  }
  for (std::size_t i : split.test_indices) {
    test_labels.assignments.push_back(labels.assignments[i]);
  }

  auto run_one = [&](const Cell& cell, double vanilla) {
    SweepResult r;
    r.kind = cell.kind;
    r.input_dims = n;
    r.p = cell.p;
    r.h = cell.h;
    r.rep = cell.rep;
    r.seed = cell_seed(plan.master_seed, cell.kind, cell.p, cell.h, cell.rep);
    r.vanilla_score = vanilla;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ScoreReport report =
          evaluate_cell(plan, cell, r.seed, train, test, train_labels, test_labels);
      r.score = report.overall;
      r.per_class = report.per_class;
      r.retention = vanilla > 0.0 ? r.score / vanilla : 0.0;
      r.rate = cell_rate(cell, n);
    } catch (const std::exception& e) {
      r.error = e.what();
      r.score = r.retention = r.rate = 0.0;
      r.per_class.clear();
    }
    if (plan.record_timing) {
      r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
                 .count();
    }
    return r;
  };

  // Baseline first; its score anchors every retention value.
  const Cell baseline{StressorKind::identity, n, 0, 0};
  SweepResult base = run_one(baseline, 0.0);
  if (base.failed()) throw Error("sweep: baseline failed: " + base.error);
  base.vanilla_score = base.score;
  base.retention = 1.0;
  const double vanilla = base.score;

  std::vector<SweepResult> results(cells.size());
  const std::size_t workers = std::max<std::size_t>(1, plan.threads);
  if (workers == 1 || cells.size() <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) results[i] = run_one(cells[i], vanilla);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        results[i] = run_one(cells[i], vanilla);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(workers, cells.size()); ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) t.join();
  }

  std::stable_sort(results.begin(), results.end(),
                   [](const SweepResult& a, const SweepResult& b) {
                     if (a.kind != b.kind) return a.kind < b.kind;
                     if (a.p != b.p) return a.p > b.p;
                     if (a.h != b.h) return a.h < b.h;
                     return a.rep < b.rep;
                   });
  results.insert(results.begin(), std::move(base));
  return results;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results) {
  if (results.empty()) throw Error("aggregate: empty input");
  std::map<std::tuple<StressorKind, std::size_t, std::size_t>, std::vector<const SweepResult*>>
      groups;
  for (const auto& r : results) {
    if (r.failed()) continue;
    groups[{r.kind, r.p, r.h}].push_back(&r);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, members] : groups) {
    AggregateRow row;
    row.kind = std::get<0>(key);
    row.p = std::get<1>(key);
    row.h = std::get<2>(key);
    row.n_reps = members.size();
    double s = 0.0, t = 0.0;
    for (const auto* m : members) {
      s += m->score;
      t += m->retention;
    }
    row.score_mean = s / double(members.size());
    row.retention_mean = t / double(members.size());
    double vs = 0.0, vt = 0.0;
    for (const auto* m : members) {
      vs += (m->score - row.score_mean) * (m->score - row.score_mean);
      vt += (m->retention - row.retention_mean) * (m->retention - row.retention_mean);
    }
    row.score_std = std::sqrt(vs / double(members.size()));
    row.retention_std = std::sqrt(vt / double(members.size()));
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.p != b.p) return a.p > b.p;
    return a.h < b.h;
  });
  return rows;
}

namespace {

nlohmann::json result_to_json(const SweepResult& r) {
  nlohmann::json j;
  j["kind"] = kind_name(r.kind);
  j["n"] = r.input_dims;
  j["p"] = r.p;
  j["h"] = r.h;
  j["rep"] = r.rep;
  j["seed"] = r.seed;
  j["vanilla"] = r.vanilla_score;
  j["score"] = r.score;
  j["retention"] = r.retention;
  j["rate"] = r.rate;
  j["ms"] = r.ms;
  j["per_class"] = r.per_class;
  if (r.failed()) {
    j["error"] = r.error;
  } else {
    j["error"] = nullptr;
  }
  return j;
}

SweepResult result_from_json(const nlohmann::json& j) {
  SweepResult r;
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown stressor kind in results file");
  r.kind = *kind;
  r.input_dims = j.at("n").get<std::size_t>();
  r.p = j.at("p").get<std::size_t>();
  r.h = j.at("h").get<std::size_t>();
  r.rep = j.at("rep").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.vanilla_score = j.at("vanilla").get<double>();
  r.score = j.at("score").get<double>();
  r.retention = j.at("retention").get<double>();
  r.rate = j.at("rate").get<double>();
  r.ms = j.at("ms").get<std::int64_t>();
  r.per_class = j.at("per_class").get<std::vector<double>>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

void export_results(const std::vector<SweepResult>& results,
                    const std::filesystem::path& path, ExportFormat format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  if (format == ExportFormat::jsonl) {
    for (const auto& r : results) out << result_to_json(r).dump() << "\n";
  } else {
    out << "kind,p,h,rep,seed,vanilla,score,retention,rate,ms\n";
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return std::string(buf);
    };
    for (const auto& r : results) {
      out << kind_name(r.kind) << ',' << r.p << ',' << r.h << ',' << r.rep << ',' << r.seed
          << ',' << num(r.vanilla_score) << ',' << num(r.score) << ',' << num(r.retention)
          << ',' << num(r.rate) << ',' << r.ms << "\n";
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<SweepResult> import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<SweepResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      results.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed JSONL at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace featstress
