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
#include <vector>

namespace featstress {

enum class LabelKind { single_label, multi_label };

// Per-row class membership. single_label rows carry exactly one id;
// multi_label rows carry any number (including none).
struct LabelSet {
  LabelKind kind = LabelKind::single_label;
  std::size_t classes = 0;
  std::vector<std::vector<std::uint32_t>> assignments;  // sorted, unique per row

  std::size_t rows() const { return assignments.size(); }
  std::uint32_t single(std::size_t row) const { return assignments[row][0]; }
  bool contains(std::size_t row, std::uint32_t cls) const;
  void validate() const;

  bool operator==(const LabelSet&) const = default;
};

struct DatasetSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;

  // Disjoint, both non-empty, all ids < rows.
  void validate(std::size_t rows) const;

  bool operator==(const DatasetSplit&) const = default;
};

// CSV with header "row,labels"; labels are ';'-separated class ids.
// Kind is inferred (multi_label when any row has a count other than one)
// unless overridden; classes defaults to max id + 1.
void save_labels(const LabelSet& labels, const std::filesystem::path& path);
LabelSet load_labels(const std::filesystem::path& path,
                     std::optional<LabelKind> kind_override = std::nullopt,
                     std::optional<std::size_t> classes_override = std::nullopt);

// Two lines: "train: i,j,..." and "test: i,j,...".
void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

}  // namespace featstress
