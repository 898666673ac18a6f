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

#include <set>

#include "featstress/error.hpp"
#include "featstress/linalg.hpp"
#include "featstress/metrics.hpp"
#include "featstress/svm.hpp"
#include "featstress/synth.hpp"

using namespace featstress;

TEST_CASE("same seed gives identical datasets") {
  SynthParams p;
  p.classes = 3;
  p.per_class = 10;
  p.dims = 16;
  p.informative_dims = 4;
  p.scale_spread = 10.0;
  p.seed = 99;
  const SyntheticDataset a = generate_synthetic(p);
  const SyntheticDataset b = generate_synthetic(p);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.split == b.split);

  p.seed = 100;
  const SyntheticDataset c = generate_synthetic(p);
  CHECK(a.features.values != c.features.values);
}

TEST_CASE("split is a stratified 50/50 partition of all rows") {
  SynthParams p;
  p.classes = 4;
  p.per_class = 10;
  p.dims = 8;
  p.informative_dims = 2;
  const SyntheticDataset d = generate_synthetic(p);
  CHECK(d.split.train_indices.size() == 20);
  CHECK(d.split.test_indices.size() == 20);
  std::set<std::size_t> all;
  all.insert(d.split.train_indices.begin(), d.split.train_indices.end());
  all.insert(d.split.test_indices.begin(), d.split.test_indices.end());
  CHECK(all.size() == 40);
  CHECK(*all.rbegin() == 39);
  // per class: 5 train, 5 test
  for (std::size_t c = 0; c < 4; ++c) {
    std::size_t train_count = 0;
    for (std::size_t i : d.split.train_indices) {
      train_count += d.labels.single(i) == c;
    }
    CHECK(train_count == 5);
  }
}

TEST_CASE("scale_spread = 1 leaves every dimension on a common scale") {
  SynthParams p;
  p.classes = 2;
  p.per_class = 50;
  p.dims = 6;
  p.informative_dims = 6;
  p.noise_scale = 0.01;
  p.scale_spread = 1.0;
  p.seed = 3;
  const SyntheticDataset d = generate_synthetic(p);
  // with all dims informative, per-dimension spans stay within the same
  // order of magnitude when no scale spread is applied
  for (std::size_t t = 0; t < p.dims; ++t) {
    double mn = d.features.at(0, t), mx = mn;
    for (std::size_t i = 0; i < d.features.rows; ++i) {
      mn = std::min(mn, d.features.at(i, t));
      mx = std::max(mx, d.features.at(i, t));
    }
    CHECK(mx - mn < 20.0);
  }
}

TEST_CASE("values are float32-representable so files match memory") {
  SynthParams p;
  p.classes = 2;
  p.per_class = 5;
  p.dims = 4;
  p.informative_dims = 2;
  const SyntheticDataset d = generate_synthetic(p);
  for (double v : d.features.values) {
    CHECK(double(float(v)) == v);
  }
}

TEST_CASE("parameter validation") {
  SynthParams p;
  p.classes = 1;
  CHECK_THROWS_AS(generate_synthetic(p), Error);
  p.classes = 2;
  p.informative_dims = p.dims + 1;
  CHECK_THROWS_AS(generate_synthetic(p), Error);
  p.informative_dims = 2;
  p.scale_spread = 0.5;
  CHECK_THROWS_AS(generate_synthetic(p), Error);
}

TEST_CASE("default-noise two-class set is linearly separable: >= 99% test accuracy") {
  SynthParams p;
  p.classes = 2;
  p.per_class = 100;
  p.dims = 50;
  p.informative_dims = 10;
  p.noise_scale = 0.1;
  p.scale_spread = 1.0;
  p.seed = 1;
  const SyntheticDataset d = generate_synthetic(p);

  FeatureMatrix normalized = d.features;
  l2_normalize_rows(normalized);
  const TrainedClassifier clf = train(normalized, d.labels, d.split);

  const FeatureMatrix test = take_rows(normalized, d.split.test_indices);
  LabelSet test_labels;
  test_labels.kind = LabelKind::single_label;
  test_labels.classes = d.labels.classes;
  for (std::size_t i : d.split.test_indices) {
    test_labels.assignments.push_back(d.labels.assignments[i]);
  }
  const ScoreReport r = accuracy(predict(clf, test), test_labels);
  CHECK(r.overall >= 0.99);
}
