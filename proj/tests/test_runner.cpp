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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "featstress/error.hpp"
#include "featstress/runner.hpp"
#include "featstress/synth.hpp"

using namespace featstress;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "featstress-test-runner";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const SyntheticDataset& small_dataset() {
  static const SyntheticDataset data = [] {
    SynthParams p;
    p.classes = 3;
    p.per_class = 20;
    p.dims = 24;
    p.informative_dims = 8;
    p.scale_spread = 20.0;
    p.seed = 7;
    return generate_synthetic(p);
  }();
  return data;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("identity-only plan produces the single baseline with retention 1") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::identity};
  const auto results = run_sweep(plan, data.features, data.labels, data.split);
  REQUIRE(results.size() == 1);
  CHECK(results[0].kind == StressorKind::identity);
  CHECK(results[0].retention == 1.0);
  CHECK(results[0].rate == 0.0);
  CHECK(results[0].vanilla_score == results[0].score);
  CHECK(results[0].score > 0.5);
}

TEST_CASE("dr1 sweep: step x repetition grid with distinct seeds and the shared baseline") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::dr1};
  plan.steps = {12, 6};
  plan.repetitions = 5;
  plan.master_seed = 3;
  const auto results = run_sweep(plan, data.features, data.labels, data.split);
  REQUIRE(results.size() == 1 + 2 * 5);

  CHECK(results[0].kind == StressorKind::identity);
  const double vanilla = results[0].score;
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 1; i < results.size(); ++i) {
    CHECK(results[i].kind == StressorKind::dr1);
    CHECK(results[i].vanilla_score == vanilla);
    CHECK(!results[i].failed());
    seeds.insert(results[i].seed);
  }
  CHECK(seeds.size() == 10);  // all distinct

  // canonical order: p desc, then rep
  CHECK(results[1].p == 12);
  CHECK(results[1].rep == 0);
  CHECK(results[5].p == 12);
  CHECK(results[5].rep == 4);
  CHECK(results[6].p == 6);
}

TEST_CASE("q sweep uses the h grid; retention stays positive") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::q2};
  plan.h_values = {1, 2, 8};
  const auto results = run_sweep(plan, data.features, data.labels, data.split);
  REQUIRE(results.size() == 4);
  for (std::size_t i = 1; i < results.size(); ++i) {
    CHECK(results[i].p == data.features.dims);
    CHECK(results[i].retention >= 0.0);
  }
  CHECK(results[1].h == 1);
  CHECK(results[3].h == 8);
}

TEST_CASE("paper schedule expands to exactly the 20 steps") {
  const auto& data = small_dataset();  // dims = 24 >= 20
  SweepPlan plan;
  plan.kinds = {StressorKind::dr2};
  const auto results = run_sweep(plan, data.features, data.labels, data.split);
  const DimensionSchedule s = schedule(data.features.dims);
  REQUIRE(results.size() == 1 + 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(results[1 + i].p == s.steps[i]);
  }
}

TEST_CASE("reruns with one master seed are identical; threads do not matter") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::dr1, StressorKind::q1};
  plan.steps = {12};
  plan.h_values = {2, 4};
  plan.repetitions = 3;
  plan.master_seed = 1234;
  plan.record_timing = false;

  plan.threads = 1;
  const auto serial = run_sweep(plan, data.features, data.labels, data.split);
  plan.threads = 8;
  const auto parallel = run_sweep(plan, data.features, data.labels, data.split);

  const auto p1 = temp_dir() / "serial.jsonl";
  const auto p2 = temp_dir() / "parallel.jsonl";
  export_results(serial, p1, ExportFormat::jsonl);
  export_results(parallel, p2, ExportFormat::jsonl);
  CHECK(file_bytes(p1) == file_bytes(p2));
}

TEST_CASE("cell seeds are isolated from other cells' parameters") {
  const auto a = cell_seed(5, StressorKind::dr1, 10, 0, 0);
  CHECK(a == cell_seed(5, StressorKind::dr1, 10, 0, 0));
  CHECK(a != cell_seed(5, StressorKind::dr1, 10, 0, 1));
  CHECK(a != cell_seed(5, StressorKind::dr1, 11, 0, 0));
  CHECK(a != cell_seed(5, StressorKind::dr2, 10, 0, 0));
  CHECK(a != cell_seed(6, StressorKind::dr1, 10, 0, 0));
}

TEST_CASE("failing cells are recorded, not dropped") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::dr2};
  // dr2 projection cannot exceed min(rows-1, dims); rows=30 train, dims=24,
  // so p=24 works but a fabricated p beyond dims fails in validation
  plan.steps = {24, 23};
  auto results = run_sweep(plan, data.features, data.labels, data.split);
  REQUIRE(results.size() == 3);
  for (const auto& r : results) CHECK(!r.failed());

  // q1 with h=31 without the override fails per cell
  SweepPlan bad;
  bad.kinds = {StressorKind::q1};
  bad.h_values = {2, 31};
  results = run_sweep(bad, data.features, data.labels, data.split);
  REQUIRE(results.size() == 3);
  CHECK(!results[1].failed());
  CHECK(results[2].failed());
  CHECK(results[2].error.find("override") != std::string::npos);
}

TEST_CASE("aggregate: population std over repetitions") {
  std::vector<SweepResult> results(2);
  results[0].kind = results[1].kind = StressorKind::dr1;
  results[0].p = results[1].p = 10;
  results[0].rep = 0;
  results[1].rep = 1;
  results[0].retention = 0.8;
  results[1].retention = 0.9;
  results[0].score = 0.4;
  results[1].score = 0.45;
  const auto agg = aggregate(results);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].n_reps == 2);
  CHECK(agg[0].retention_mean == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(agg[0].retention_std == doctest::Approx(0.05).epsilon(1e-12));

  // single repetition and all-equal repetitions give zero std
  const auto single = aggregate({results[0]});
  CHECK(single[0].retention_std == 0.0);
  auto equal = results;
  equal[1].retention = 0.8;
  equal[1].score = 0.4;
  const auto same = aggregate(equal);
  CHECK(same[0].retention_std == 0.0);
  CHECK(same[0].retention_mean == 0.8);

  CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("jsonl export round-trips the full result list") {
  const auto& data = small_dataset();
  SweepPlan plan;
  plan.kinds = {StressorKind::dr1};
  plan.steps = {12};
  plan.repetitions = 2;
  plan.master_seed = 77;
  const auto results = run_sweep(plan, data.features, data.labels, data.split);

  const auto path = temp_dir() / "roundtrip.jsonl";
  export_results(results, path, ExportFormat::jsonl);
  const auto back = import_jsonl(path);
  REQUIRE(back.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(back[i].kind == results[i].kind);
    CHECK(back[i].p == results[i].p);
    CHECK(back[i].h == results[i].h);
    CHECK(back[i].rep == results[i].rep);
    CHECK(back[i].seed == results[i].seed);
    CHECK(back[i].vanilla_score == results[i].vanilla_score);
    CHECK(back[i].score == results[i].score);
    CHECK(back[i].retention == results[i].retention);
    CHECK(back[i].rate == results[i].rate);
    CHECK(back[i].ms == results[i].ms);
    CHECK(back[i].per_class == results[i].per_class);
    CHECK(back[i].error == results[i].error);
  }
}

TEST_CASE("csv export: header plus one row per result; empty list gives header only") {
  std::vector<SweepResult> results(1);
  results[0].kind = StressorKind::q1;
  results[0].p = 24;
  results[0].h = 4;
  const auto path = temp_dir() / "table.csv";
  export_results(results, path, ExportFormat::csv);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,p,h,rep,seed,vanilla,score,retention,rate,ms");
  std::getline(in, line);
  CHECK(line.rfind("q1,24,4,", 0) == 0);
  CHECK(!std::getline(in, line));

  export_results({}, path, ExportFormat::csv);
  std::ifstream in2(path);
  std::getline(in2, line);
  CHECK(line == "kind,p,h,rep,seed,vanilla,score,retention,rate,ms");
  CHECK(!std::getline(in2, line));

  const auto empty_jsonl = temp_dir() / "empty.jsonl";
  export_results({}, empty_jsonl, ExportFormat::jsonl);
  CHECK(fs::file_size(empty_jsonl) == 0);
}

TEST_CASE("multi-label datasets run the mAP pipeline") {
  SynthParams p;
  p.classes = 3;
  p.per_class = 16;
  p.dims = 20;
  p.informative_dims = 6;
  p.seed = 11;
  SyntheticDataset data = generate_synthetic(p);
  // wrap single labels as multi-label sets
  LabelSet multi;
  multi.kind = LabelKind::multi_label;
  multi.classes = data.labels.classes;
  multi.assignments = data.labels.assignments;
  data.labels = multi;

  SweepPlan plan;
  plan.kinds = {StressorKind::q2};
  plan.h_values = {4};
  plan.ap_variant = ApVariant::eleven_point;
  const auto results = run_sweep(plan, data.features, data.labels, data.split);
  REQUIRE(results.size() == 2);
  CHECK(results[0].score > 0.5);
  CHECK(!results[1].failed());
  CHECK(results[1].per_class.size() == 3);
}
