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

#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"

namespace featstress {

// Gaussian blobs for desk-scale experiments. Class means differ only on a
// random subset of informative_dims dimensions; every dimension is then
// scaled by a factor drawn log-uniformly from [1, scale_spread], which gives
// per-dimension quantizers something to adapt to. Values are rounded through
// float32 so in-memory data matches a file round-trip bit for bit.
struct SynthParams {
  std::size_t classes = 4;
  std::size_t per_class = 100;
  std::size_t dims = 256;
  std::size_t informative_dims = 32;
  double noise_scale = 0.3;
  double scale_spread = 1.0;
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  FeatureMatrix features;
  LabelSet labels;       // single_label, rows grouped by class
  DatasetSplit split;    // stratified 50/50, alternating rows per class
};

SyntheticDataset generate_synthetic(const SynthParams& params);

}  // namespace featstress
