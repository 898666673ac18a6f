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
#include <optional>
#include <string>
#include <vector>

#include "featstress/fmat.hpp"
#include "featstress/linalg.hpp"
#include "featstress/rng.hpp"

namespace featstress {

// Transforms that selectively destroy information in feature vectors.
//   identity  pass-through baseline
//   dr1       drop dimensions at random, keep p of n
//   dr2       PCA: project onto the top-p principal components (or, in
//             coordinate mode, keep the p highest-variance coordinates)
//   q1        scalar quantization, one global dictionary of h centroids
//   q2        scalar quantization, one dictionary per dimension
//   fc        dr2 followed by q2 fitted in the projected space
enum class StressorKind { identity, dr1, dr2, q1, q2, fc };

const char* kind_name(StressorKind k);
std::optional<StressorKind> kind_from_name(const std::string& name);

enum class Dr2Mode { projection, coordinate_variance };

// 20-step dimension schedule: steps[i-1] = floor(n*(21-i)/20) for i = 1..20.
// The first step keeps everything; the last keeps 5% of n (rounded down).
struct DimensionSchedule {
  std::size_t n = 0;
  std::vector<std::size_t> steps;
};

DimensionSchedule schedule(std::size_t n);

// Fitted transform parameters. Which fields are populated depends on kind;
// fit_fingerprint hashes the fit inputs so applications can detect mismatched
// model/data pairings.
struct StressorModel {
  StressorKind kind = StressorKind::identity;
  std::size_t input_dims = 0;
  std::size_t p = 0;  // output dims for dr1/dr2/fc
  std::size_t h = 0;  // dictionary size for q1/q2/fc
  Dr2Mode dr2_mode = Dr2Mode::projection;
  std::vector<std::size_t> kept_dims;             // dr1, dr2 coordinate mode
  std::optional<EigenBasis> basis;                // dr2 projection mode, fc
  std::vector<std::vector<double>> dictionaries;  // q1: one; q2/fc: per dim
  std::vector<double> q_min;                      // per dictionary
  std::vector<double> q_step;                     // per dictionary; 0 = degenerate
  std::uint64_t fit_fingerprint = 0;

  std::size_t output_dims() const;
  void validate() const;
};

StressorModel fit_identity(std::size_t n);
StressorModel fit_dr1(std::size_t n, std::size_t p, RngStream& rng);
StressorModel fit_dr2(const FeatureMatrix& train, std::size_t p,
                      Dr2Mode mode = Dr2Mode::projection);
// h is capped at 30 unless allow_large_h is set.
StressorModel fit_q1(const FeatureMatrix& train, std::size_t h, bool allow_large_h = false);
StressorModel fit_q2(const FeatureMatrix& train, std::size_t h, bool allow_large_h = false);
StressorModel fit_fc(const FeatureMatrix& train, std::size_t p, std::size_t h,
                     bool allow_large_h = false);

FeatureMatrix apply(const StressorModel& model, const FeatureMatrix& m);

// Nearest centroid of x in an increasing dictionary; exact midpoints go to
// the smaller centroid. min_v/step are the fit-time interval parameters
// backing the fast cell-index path.
std::size_t quantize_index(const std::vector<double>& dict, double min_v, double step,
                           double x);

void save_model(const StressorModel& model, const std::filesystem::path& path);
StressorModel load_model(const std::filesystem::path& path);

std::uint64_t fingerprint_matrix(const FeatureMatrix& m);

}  // namespace featstress
