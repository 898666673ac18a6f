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
#include <vector>

#include "featstress/fmat.hpp"
#include "featstress/labels.hpp"

namespace featstress {

enum class SvmLoss { l1_hinge, l2_hinge };

struct TrainOptions {
  double c = 1.0;
  SvmLoss loss = SvmLoss::l1_hinge;
  // Stop when the max projected-gradient violation over an epoch drops below
  // this; bounded by max_epochs either way.
  double tolerance = 0.1;
  std::size_t max_epochs = 1000;
  // Seeds the coordinate-visit permutation; fixed seed -> bit-identical weights.
  std::uint64_t permutation_seed = 1;
};

// One-vs-rest linear SVM. weights is classes x dims row-major; the bias is
// learned through an implicit constant feature of value 1.
struct TrainedClassifier {
  std::size_t classes = 0;
  std::size_t dims = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  double c_param = 1.0;
  SvmLoss loss = SvmLoss::l1_hinge;
  double tolerance = 0.1;
  std::vector<std::size_t> iterations_used;  // epochs per class
  std::vector<bool> converged;               // per class; false = hit the epoch cap

  const double* class_weights(std::size_t k) const { return weights.data() + k * dims; }
};

// Trains on the split's train rows. Every class needs at least one positive
// and one negative training row.
TrainedClassifier train(const FeatureMatrix& features, const LabelSet& labels,
                        const DatasetSplit& split, const TrainOptions& opts = {});

// value[i][k] = w_k . x_i + b_k, returned as a rows x classes matrix.
FeatureMatrix decision_values(const TrainedClassifier& clf, const FeatureMatrix& features);

// Argmax over decision values; ties go to the smaller class id.
std::vector<std::uint32_t> predict(const TrainedClassifier& clf,
                                   const FeatureMatrix& features);

// Single binary solve, exposed for the solver tests. rows: l x dims, labels
// in {-1, +1}. Bias comes back separately from the augmented coordinate.
struct BinarySolveResult {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> alpha;
  std::size_t epochs = 0;
  bool converged = false;
};
BinarySolveResult solve_binary_hinge(const FeatureMatrix& rows,
                                     const std::vector<int>& labels,
                                     const TrainOptions& opts,
                                     std::uint64_t permutation_salt = 0);

void save_classifier(const TrainedClassifier& clf, const std::filesystem::path& path);
TrainedClassifier load_classifier(const std::filesystem::path& path);

}  // namespace featstress
