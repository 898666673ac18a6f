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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"
#include "featstress/metrics.hpp"
#include "featstress/stressor.hpp"

namespace featstress {

// Parameter grid for one sweep. Dimension steps come from the 20-step
// schedule unless keep_fractions or explicit steps are given; level counts
// default to 1..30. Randomized stressors (dr1) run `repetitions` times per
// cell, everything else once.
struct SweepPlan {
  std::vector<StressorKind> kinds;
  std::vector<std::size_t> steps;        // explicit p values; wins over fractions
  std::vector<double> keep_fractions;    // each in (0,1], mapped to floor(frac*n)
  std::vector<std::size_t> h_values;     // default 1..30
  std::size_t repetitions = 10;
  ApVariant ap_variant = ApVariant::all_points;
  std::uint64_t master_seed = 0;
  double c_param = 1.0;
  std::size_t threads = 1;
  bool record_timing = true;   // off -> ms reported as 0, for byte-stable output
  bool strict = false;         // strict zero-positive-class policy for mAP
  bool allow_large_h = false;
  Dr2Mode dr2_mode = Dr2Mode::projection;
};

// One pipeline evaluation. Failed cells carry the message in `error` and
// zeros elsewhere; they are recorded, never dropped.
struct SweepResult {
  StressorKind kind = StressorKind::identity;
  std::size_t input_dims = 0;
  std::size_t p = 0;
  std::size_t h = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double vanilla_score = 0.0;
  double score = 0.0;
  double retention = 0.0;
  double rate = 0.0;
  std::int64_t ms = 0;
  std::vector<double> per_class;
  std::string error;

  bool failed() const { return !error.empty(); }
};

// Runs the identity baseline first, then every grid cell: fit the stressor
// on the train split only, apply to train and test, l2-normalize, train the
// SVM, score the test rows. Results are byte-stable for a fixed master seed
// regardless of thread count. Output order: baseline, then cells sorted by
// (kind, p desc, h, rep).
std::vector<SweepResult> run_sweep(const SweepPlan& plan, const FeatureMatrix& features,
                                   const LabelSet& labels, const DatasetSplit& split);

struct AggregateRow {
  StressorKind kind;
  std::size_t p = 0;
  std::size_t h = 0;
  std::size_t n_reps = 0;
  double score_mean = 0.0;
  double score_std = 0.0;  // population convention
  double retention_mean = 0.0;
  double retention_std = 0.0;
};

// Per-(kind, p, h) mean/std over repetitions; failed cells are skipped.
std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results);

enum class ExportFormat { csv, jsonl };

void export_results(const std::vector<SweepResult>& results,
                    const std::filesystem::path& path, ExportFormat format);
std::vector<SweepResult> import_jsonl(const std::filesystem::path& path);

// Seed for one (kind, p, h, rep) cell; kind/p/h/rep are baked into the label
// so no cell's seed depends on another cell's parameters.
std::uint64_t cell_seed(std::uint64_t master_seed, StressorKind kind, std::size_t p,
                        std::size_t h, std::size_t rep);

}  // namespace featstress
