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
#include <span>
#include <string>
#include <vector>

#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"

#include "json.hpp"

namespace featstress {

// all_points: mean precision at every positive in the ranking.
// eleven_point: mean of interpolated precision at recalls 0.0, 0.1, ... 1.0.
enum class ApVariant { all_points, eleven_point };

const char* ap_variant_name(ApVariant v);

enum class MetricKind { map, accuracy };

struct ScoreReport {
  MetricKind metric_kind = MetricKind::map;
  double overall = 0.0;
  std::vector<double> per_class;  // AP per class, or per-class recall
  std::size_t n_test = 0;
  // Classes with no positive test rows, skipped under the lenient policy.
  // Their per_class entries read 0.
  std::vector<std::size_t> skipped_classes;
};

enum class ZeroPositivePolicy { exclude_and_report, strict };

// Ranking ties are broken by original row order (stable sort on descending
// score). Throws when no row is positive.
double average_precision(std::span<const double> scores, std::span<const char> positives,
                         ApVariant variant);

// decisions is rows x classes; labels must be multi_label.
ScoreReport mean_average_precision(const FeatureMatrix& decisions, const LabelSet& labels,
                                   ApVariant variant,
                                   ZeroPositivePolicy policy = ZeroPositivePolicy::exclude_and_report);

// per_class holds per-class recall; classes absent from the test rows read 0.
ScoreReport accuracy(const std::vector<std::uint32_t>& predictions, const LabelSet& labels);

// Stored-bits accounting against the 32-bit float baseline. h = 1 encodes to
// zero bits per value (the dictionary itself is not counted).
struct CompressionFigure {
  std::uint64_t original_bits = 0;  // 32 * n
  std::uint64_t stressed_bits = 0;  // p * ceil(log2 h)
  double rate = 0.0;                // 1 - stressed/original
  double retention = 0.0;           // stressed_score / vanilla_score
};

std::uint64_t bits_per_value(std::uint64_t h);

CompressionFigure compression_figure(std::size_t n, std::size_t p, std::size_t h,
                                     double stressed_score, double vanilla_score);
// Variant for dimension-only stressors: kept values stay 32-bit floats.
CompressionFigure compression_figure_dr(std::size_t n, std::size_t p,
                                        double stressed_score, double vanilla_score);

nlohmann::json score_report_to_json(const ScoreReport& r);
nlohmann::json compression_figure_to_json(const CompressionFigure& f);

}  // namespace featstress
