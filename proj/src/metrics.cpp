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

#include "featstress/metrics.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "featstress/error.hpp"

namespace featstress {

const char* ap_variant_name(ApVariant v) {
  return v == ApVariant::all_points ? "all_points" : "eleven_point";
}

double average_precision(std::span<const double> scores, std::span<const char> positives,
                         ApVariant variant) {
  const std::size_t n = scores.size();
  if (positives.size() != n) throw Error("average_precision: size mismatch");
  std::size_t n_pos = 0;
  for (char p : positives) n_pos += p != 0;
  if (n_pos == 0) throw Error("average_precision: no positive rows, AP undefined");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  if (variant == ApVariant::all_points) {
    std::size_t tp = 0;
    double sum = 0.0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
      if (positives[order[rank - 1]]) {
        ++tp;
        sum += double(tp) / double(rank);
      }
    }
    return sum / double(n_pos);
  }

  // eleven_point: interpolated precision at recall thresholds r/10. The
  // recall comparison is done in integers (10*tp >= r*n_pos) so threshold
  // boundaries are exact.
  std::vector<std::size_t> tp_at(n + 1, 0);
  for (std::size_t rank = 1; rank <= n; ++rank) {
    tp_at[rank] = tp_at[rank - 1] + (positives[order[rank - 1]] ? 1 : 0);
  }
  double sum = 0.0;
  for (std::size_t r = 0; r <= 10; ++r) {
    double p_max = 0.0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
      if (10 * tp_at[rank] >= r * n_pos) {
        p_max = std::max(p_max, double(tp_at[rank]) / double(rank));
      }
    }
    sum += p_max;
  }
  return sum / 11.0;
}

ScoreReport mean_average_precision(const FeatureMatrix& decisions, const LabelSet& labels,
                                   ApVariant variant, ZeroPositivePolicy policy) {
  if (labels.kind != LabelKind::multi_label) {
    throw Error("mean_average_precision: labels must be multi_label");
  }
  if (labels.rows() != decisions.rows) {
    throw Error("mean_average_precision: row count mismatch");
  }
  if (labels.classes != decisions.dims) {
    throw Error("mean_average_precision: class count mismatch");
  }

  ScoreReport report;
  report.metric_kind = MetricKind::map;
  report.n_test = decisions.rows;
  report.per_class.assign(labels.classes, 0.0);

  std::vector<double> scores(decisions.rows);
  std::vector<char> positives(decisions.rows);
  double sum = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t k = 0; k < labels.classes; ++k) {
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < decisions.rows; ++i) {
      scores[i] = decisions.at(i, k);
      positives[i] = labels.contains(i, std::uint32_t(k)) ? 1 : 0;
      n_pos += positives[i];
    }
    if (n_pos == 0) {
      if (policy == ZeroPositivePolicy::strict) {
        throw Error("class " + std::to_string(k) + " has no positive test rows");
      }
      report.skipped_classes.push_back(k);
      continue;
    }
    const double ap = average_precision(scores, positives, variant);
    report.per_class[k] = ap;
    sum += ap;
    ++evaluated;
  }
  if (evaluated == 0) throw Error("mean_average_precision: every class was skipped");
  report.overall = sum / double(evaluated);
  return report;
}

ScoreReport accuracy(const std::vector<std::uint32_t>& predictions, const LabelSet& labels) {
  if (labels.kind != LabelKind::single_label) {
    throw Error("accuracy: labels must be single_label");
  }
  if (labels.rows() != predictions.size()) throw Error("accuracy: row count mismatch");

  ScoreReport report;
  report.metric_kind = MetricKind::accuracy;
  report.n_test = predictions.size();
  report.per_class.assign(labels.classes, 0.0);

  std::vector<std::size_t> per_class_total(labels.classes, 0);
  std::vector<std::size_t> per_class_correct(labels.classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::uint32_t truth = labels.single(i);
    ++per_class_total[truth];
    if (predictions[i] == truth) {
      ++correct;
      ++per_class_correct[truth];
    }
  }
  for (std::size_t k = 0; k < labels.classes; ++k) {
    if (per_class_total[k] > 0) {
      report.per_class[k] = double(per_class_correct[k]) / double(per_class_total[k]);
    }
  }
  report.overall = double(correct) / double(predictions.size());
  return report;
}

std::uint64_t bits_per_value(std::uint64_t h) {
  if (h == 0) throw Error("bits_per_value: h must be >= 1");
  if (h == 1) return 0;
  return std::uint64_t(std::bit_width(h - 1));  // ceil(log2 h)
}

CompressionFigure compression_figure(std::size_t n, std::size_t p, std::size_t h,
                                     double stressed_score, double vanilla_score) {
  if (p > n) throw Error("compression_figure: p must be <= n");
  if (h == 0) throw Error("compression_figure: h must be >= 1");
  if (!(vanilla_score > 0.0)) throw Error("compression_figure: vanilla score must be positive");
  CompressionFigure f;
  f.original_bits = std::uint64_t(n) * 32;
  f.stressed_bits = std::uint64_t(p) * bits_per_value(h);
  f.rate = 1.0 - double(f.stressed_bits) / double(f.original_bits);
  f.retention = stressed_score / vanilla_score;
  return f;
}

CompressionFigure compression_figure_dr(std::size_t n, std::size_t p,
                                        double stressed_score, double vanilla_score) {
  if (p > n) throw Error("compression_figure: p must be <= n");
  if (!(vanilla_score > 0.0)) throw Error("compression_figure: vanilla score must be positive");
  CompressionFigure f;
  f.original_bits = std::uint64_t(n) * 32;
  f.stressed_bits = std::uint64_t(p) * 32;
  f.rate = 1.0 - double(f.stressed_bits) / double(f.original_bits);
  f.retention = stressed_score / vanilla_score;
  return f;
}

nlohmann::json score_report_to_json(const ScoreReport& r) {
  nlohmann::json j;
  j["metric_kind"] = r.metric_kind == MetricKind::map ? "map" : "accuracy";
  j["overall"] = r.overall;
  j["per_class"] = r.per_class;
  j["n_test"] = r.n_test;
  j["skipped_classes"] = r.skipped_classes;
  return j;
}

nlohmann::json compression_figure_to_json(const CompressionFigure& f) {
  nlohmann::json j;
  j["original_bits"] = f.original_bits;
  j["stressed_bits"] = f.stressed_bits;
  j["rate"] = f.rate;
  j["retention"] = f.retention;
  return j;
}

}  // namespace featstress
