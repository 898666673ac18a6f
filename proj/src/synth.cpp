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

#include "featstress/synth.hpp"

#include <cmath>
#include <numeric>

#include "featstress/error.hpp"
#include "featstress/rng.hpp"

namespace featstress {

SyntheticDataset generate_synthetic(const SynthParams& p) {
  if (p.classes < 2) throw Error("generate_synthetic: need at least 2 classes");
  if (p.per_class < 2) throw Error("generate_synthetic: need at least 2 rows per class");
  if (p.dims == 0) throw Error("generate_synthetic: dims must be >= 1");
  if (p.informative_dims == 0 || p.informative_dims > p.dims) {
    throw Error("generate_synthetic: need 1 <= informative_dims <= dims");
  }
  if (!(p.noise_scale > 0.0)) throw Error("generate_synthetic: noise_scale must be positive");
  if (!(p.scale_spread >= 1.0)) throw Error("generate_synthetic: scale_spread must be >= 1");

  RngStream placement(p.seed, "synth-placement");
  RngStream scales_rng(p.seed, "synth-scales");
  RngStream means_rng(p.seed, "synth-means");
  RngStream noise_rng(p.seed, "synth-noise");

  std::vector<std::size_t> dim_order(p.dims);
  std::iota(dim_order.begin(), dim_order.end(), 0);
  placement.shuffle(dim_order);
  std::vector<char> informative(p.dims, 0);
  for (std::size_t k = 0; k < p.informative_dims; ++k) informative[dim_order[k]] = 1;

  std::vector<double> scale(p.dims);
  const double log_spread = std::log(p.scale_spread);
  for (std::size_t t = 0; t < p.dims; ++t) {
    scale[t] = p.scale_spread == 1.0 ? 1.0 : std::exp(scales_rng.next_double() * log_spread);
  }

  // Means are drawn for every (class, dim) pair so the stream layout does
  // not depend on which dims ended up informative; non-informative dims keep
  // mean zero.
  std::vector<double> mean(p.classes * p.dims, 0.0);
  for (std::size_t c = 0; c < p.classes; ++c) {
    for (std::size_t t = 0; t < p.dims; ++t) {
      const double draw = means_rng.next_gaussian();
      if (informative[t]) mean[c * p.dims + t] = draw;
    }
  }

  const std::size_t rows = p.classes * p.per_class;
  SyntheticDataset out;
  out.features = make_matrix(rows, p.dims, "synthetic-v1");
  out.labels.kind = LabelKind::single_label;
  out.labels.classes = p.classes;
  out.labels.assignments.resize(rows);

  for (std::size_t c = 0; c < p.classes; ++c) {
    for (std::size_t r = 0; r < p.per_class; ++r) {
      const std::size_t row = c * p.per_class + r;
      double* dst = out.features.row(row);
      for (std::size_t t = 0; t < p.dims; ++t) {
        const double v =
            scale[t] * (mean[c * p.dims + t] + p.noise_scale * noise_rng.next_gaussian());
        dst[t] = double(float(v));
      }
      out.labels.assignments[row] = {std::uint32_t(c)};
      if (r % 2 == 0) {
        out.split.train_indices.push_back(row);
      } else {
        out.split.test_indices.push_back(row);
      }
    }
  }
  out.features.validate();
  out.labels.validate();
  out.split.validate(rows);
  return out;
}

}  // namespace featstress
