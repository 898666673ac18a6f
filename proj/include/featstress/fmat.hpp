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

namespace featstress {

// Dense row-major matrix of descriptor values. Stored as float32 on disk
// (FMAT format, docs/FORMATS.md); held as double in memory. Immutable by
// convention once built, safe to share across threads.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> values;  // row-major, rows*dims
  std::string source_tag;

  double& at(std::size_t r, std::size_t c) { return values[r * dims + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * dims + c]; }
  const double* row(std::size_t r) const { return values.data() + r * dims; }
  double* row(std::size_t r) { return values.data() + r * dims; }

  // Throws Error when rows/dims are zero, the buffer size disagrees, or any
  // value is non-finite or not representable as float32.
  void validate() const;

  bool operator==(const FeatureMatrix&) const = default;
};

FeatureMatrix make_matrix(std::size_t rows, std::size_t dims, std::string tag = {});

// Rows of `m` selected by `indices`, in order.
FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<std::size_t>& indices);

FeatureMatrix load_features(const std::filesystem::path& path);

// Writes atomically: a temp file in the target directory is renamed into
// place, so a failed write leaves nothing behind.
void save_features(const FeatureMatrix& m, const std::filesystem::path& path);

}  // namespace featstress
