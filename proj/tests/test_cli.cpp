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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"
#include "featstress/runner.hpp"

#include "json.hpp"

using namespace featstress;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("FEATSTRESS_CLI");
  REQUIRE_MESSAGE(p != nullptr, "FEATSTRESS_CLI must point at the CLI binary");
  return p;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "featstress-test-cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("--help exits 0; unknown flags exit nonzero") {
  CHECK(run("--help") == 0);
  CHECK(run("synth --help") == 0);
  CHECK(run("--no-such-flag") != 0);
  CHECK(run("synth --bogus 1 --out-dir /tmp/x") != 0);
}

TEST_CASE("synth writes the three dataset files plus the config echo") {
  const fs::path out = work_dir() / "synth";
  REQUIRE(run("synth --out-dir " + out.string() +
              " --classes 3 --per-class 8 --dims 20 --informative 5 --seed 7") == 0);
  CHECK(fs::exists(out / "features.fmat"));
  CHECK(fs::exists(out / "labels.csv"));
  CHECK(fs::exists(out / "split.txt"));
  CHECK(fs::exists(out / "config.json"));

  const FeatureMatrix m = load_features(out / "features.fmat");
  CHECK(m.rows == 24);
  CHECK(m.dims == 20);
  const LabelSet labels = load_labels(out / "labels.csv");
  CHECK(labels.classes == 3);
  load_split(out / "split.txt").validate(m.rows);

  const auto config = nlohmann::json::parse(slurp(out / "config.json"));
  CHECK(config["seed"] == 7);
  CHECK(config["classes"] == 3);
}

TEST_CASE("synth with one seed twice gives byte-identical features") {
  const fs::path a = work_dir() / "seed-a";
  const fs::path b = work_dir() / "seed-b";
  const std::string flags = " --classes 2 --per-class 6 --dims 24 --informative 4 --seed 7";
  REQUIRE(run("synth --out-dir " + a.string() + flags) == 0);
  REQUIRE(run("synth --out-dir " + b.string() + flags) == 0);
  CHECK(slurp(a / "features.fmat") == slurp(b / "features.fmat"));
}

TEST_CASE("synth rejects a single class") {
  CHECK(run("synth --out-dir " + (work_dir() / "bad").string() + " --classes 1") != 0);
}

TEST_CASE("fit, apply, train, eval chain works end to end") {
  const fs::path data = work_dir() / "chain";
  REQUIRE(run("synth --out-dir " + data.string() +
              " --classes 2 --per-class 20 --dims 24 --informative 6 --seed 3") == 0);
  const std::string features = (data / "features.fmat").string();
  const std::string labels = (data / "labels.csv").string();
  const std::string split = (data / "split.txt").string();

  const std::string model = (data / "q2.model.json").string();
  REQUIRE(run("fit --features " + features + " --split " + split +
              " --stressor q2 --h 6 --out " + model) == 0);
  CHECK(fs::exists(model));

  const std::string stressed = (data / "stressed.fmat").string();
  REQUIRE(run("apply --model " + model + " --features " + features + " --out " + stressed) ==
          0);
  CHECK(load_features(stressed).dims == 24);

  const std::string clf = (data / "clf.json").string();
  REQUIRE(run("train --features " + stressed + " --labels " + labels + " --split " + split +
              " --out " + clf) == 0);

  const std::string report = (data / "report.json").string();
  REQUIRE(run("eval --classifier " + clf + " --features " + stressed + " --labels " + labels +
              " --split " + split + " --out " + report) == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["metric_kind"] == "accuracy");
  CHECK(j["overall"].get<double>() >= 0.5);
}

TEST_CASE("sweep produces jsonl/csv/config and honors --no-timing determinism") {
  const fs::path data = work_dir() / "sweepdata";
  REQUIRE(run("synth --out-dir " + data.string() +
              " --classes 3 --per-class 10 --dims 20 --informative 6 --scale-spread 30 "
              "--seed 5") == 0);
  const std::string base = " --features " + (data / "features.fmat").string() + " --labels " +
                           (data / "labels.csv").string() + " --split " +
                           (data / "split.txt").string();

  const fs::path out1 = work_dir() / "sweep-1t";
  const fs::path out2 = work_dir() / "sweep-8t";
  const std::string plan = " --stressor q1 --h 2,4 --seed 42 --no-timing";
  REQUIRE(run("sweep" + base + plan + " --threads 1 --out-dir " + out1.string()) == 0);
  REQUIRE(run("sweep" + base + plan + " --threads 8 --out-dir " + out2.string()) == 0);

  CHECK(fs::exists(out1 / "results.jsonl"));
  CHECK(fs::exists(out1 / "results.csv"));
  CHECK(fs::exists(out1 / "config.json"));
  CHECK(slurp(out1 / "results.jsonl") == slurp(out2 / "results.jsonl"));

  const auto results = import_jsonl(out1 / "results.jsonl");
  REQUIRE(results.size() == 3);  // baseline + h=2 + h=4
  CHECK(results[0].kind == StressorKind::identity);
  CHECK(results[0].retention == 1.0);
}

TEST_CASE("sweep dr1 on the paper schedule: 20 steps x 10 reps + baseline") {
  const fs::path data = work_dir() / "grid-count";
  REQUIRE(run("synth --out-dir " + data.string() +
              " --classes 2 --per-class 10 --dims 20 --informative 5 --seed 2") == 0);
  const fs::path out = work_dir() / "grid-count-out";
  REQUIRE(run("sweep --features " + (data / "features.fmat").string() + " --labels " +
              (data / "labels.csv").string() + " --split " + (data / "split.txt").string() +
              " --stressor dr1 --schedule paper --reps 10 --seed 1 --out-dir " +
              out.string()) == 0);
  const auto results = import_jsonl(out / "results.jsonl");
  CHECK(results.size() == 201);  // 20 steps x 10 reps + 1 baseline
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.failed();
  CHECK(failed == 0);
}

TEST_CASE("sweep --stressor identity emits a single baseline row") {
  const fs::path data = work_dir() / "sweepdata";  // reuse from the previous case
  const std::string base = " --features " + (data / "features.fmat").string() + " --labels " +
                           (data / "labels.csv").string() + " --split " +
                           (data / "split.txt").string();
  const fs::path out = work_dir() / "sweep-identity";
  REQUIRE(run("sweep" + base + " --stressor identity --out-dir " + out.string()) == 0);
  const auto results = import_jsonl(out / "results.jsonl");
  REQUIRE(results.size() == 1);
  CHECK(results[0].retention == 1.0);
}

TEST_CASE("report writes per-figure tables from sweep output") {
  const fs::path data = work_dir() / "sweepdata";
  const std::string base = " --features " + (data / "features.fmat").string() + " --labels " +
                           (data / "labels.csv").string() + " --split " +
                           (data / "split.txt").string();
  const fs::path sweep_out = work_dir() / "sweep-report";
  REQUIRE(run("sweep" + base +
              " --stressor dr1,q2 --p 10,5 --reps 2 --h 2,4 --seed 9 --out-dir " +
              sweep_out.string()) == 0);

  const fs::path report_out = work_dir() / "report";
  REQUIRE(run("report --results " + (sweep_out / "results.jsonl").string() + " --out-dir " +
              report_out.string()) == 0);
  CHECK(slurp(report_out / "report_dr1.csv").rfind("p_percent,mean_retention,std", 0) == 0);
  CHECK(slurp(report_out / "report_q2.csv").rfind("h,mean_retention,std", 0) == 0);
  CHECK(slurp(report_out / "report_fc.csv").rfind("p,h,p_percent,rate,mean_retention,std", 0) ==
        0);

  // dr1 table: two p rows with aggregated reps
  const std::string dr1 = slurp(report_out / "report_dr1.csv");
  CHECK(std::count(dr1.begin(), dr1.end(), '\n') == 3);
}

TEST_CASE("report on an empty results file emits header-only tables") {
  const fs::path empty = work_dir() / "empty.jsonl";
  std::ofstream(empty).close();
  const fs::path out = work_dir() / "report-empty";
  REQUIRE(run("report --results " + empty.string() + " --out-dir " + out.string()) == 0);
  CHECK(slurp(out / "report_dr1.csv") == "p_percent,mean_retention,std\n");
}

TEST_CASE("voc2007-tagged features default to the eleven-point AP variant") {
  const fs::path data = work_dir() / "voc-tag";
  REQUIRE(run("synth --out-dir " + data.string() +
              " --classes 2 --per-class 10 --dims 20 --informative 4 --seed 6 "
              "--tag voc2007-standin") == 0);
  const std::string clf = (data / "clf.json").string();
  REQUIRE(run("train --features " + (data / "features.fmat").string() + " --labels " +
              (data / "labels.csv").string() + " --split " + (data / "split.txt").string() +
              " --out " + clf) == 0);
  const std::string report = (data / "report.json").string();
  REQUIRE(run("eval --classifier " + clf + " --features " +
              (data / "features.fmat").string() + " --labels " +
              (data / "labels.csv").string() + " --split " + (data / "split.txt").string() +
              " --out " + report) == 0);
  CHECK(nlohmann::json::parse(slurp(report))["ap_variant"] == "eleven-point");
}

TEST_CASE("FEATSTRESS_THREADS overrides the worker default") {
  const fs::path data = work_dir() / "sweepdata";  // reuse
  const std::string base = " --features " + (data / "features.fmat").string() + " --labels " +
                           (data / "labels.csv").string() + " --split " +
                           (data / "split.txt").string();
  const fs::path out = work_dir() / "sweep-env";
  const std::string cmd = "FEATSTRESS_THREADS=3 " + cli_path() + " sweep" + base +
                          " --stressor q1 --h 2 --out-dir " + out.string() +
                          " >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(nlohmann::json::parse(slurp(out / "config.json"))["threads"] == 3);
}

TEST_CASE("config file supplies defaults and explicit flags win") {
  const fs::path cfg = work_dir() / "synth.config-in.json";
  {
    std::ofstream out(cfg);
    out << R"({"classes": 3, "per-class": 6, "dims": 24, "informative": 4, "seed": 11})";
  }
  const fs::path out_a = work_dir() / "cfg-a";
  REQUIRE(run("synth --config " + cfg.string() + " --out-dir " + out_a.string()) == 0);
  CHECK(load_features(out_a / "features.fmat").rows == 18);

  // flag overrides the config value
  const fs::path out_b = work_dir() / "cfg-b";
  REQUIRE(run("synth --config " + cfg.string() + " --out-dir " + out_b.string() +
              " --per-class 10") == 0);
  CHECK(load_features(out_b / "features.fmat").rows == 30);
}
