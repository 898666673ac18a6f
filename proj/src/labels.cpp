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

#include "featstress/labels.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "featstress/error.hpp"

namespace featstress {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(std::string("cannot parse ") + what + ": '" + s + "'");
  }
  return v;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool LabelSet::contains(std::size_t row, std::uint32_t cls) const {
  const auto& a = assignments[row];
  return std::binary_search(a.begin(), a.end(), cls);
}

void LabelSet::validate() const {
  if (classes == 0) throw Error("label set has zero classes");
  for (std::size_t r = 0; r < assignments.size(); ++r) {
    const auto& a = assignments[r];
    if (kind == LabelKind::single_label && a.size() != 1) {
      throw Error("single-label row " + std::to_string(r) + " has " +
                  std::to_string(a.size()) + " labels");
    }
    if (!std::is_sorted(a.begin(), a.end()) ||
        std::adjacent_find(a.begin(), a.end()) != a.end()) {
      throw Error("labels of row " + std::to_string(r) + " are not sorted unique");
    }
    for (std::uint32_t c : a) {
      if (c >= classes) {
        throw Error("class id " + std::to_string(c) + " out of range at row " +
                    std::to_string(r));
      }
    }
  }
}

void DatasetSplit::validate(std::size_t rows) const {
  if (train_indices.empty() || test_indices.empty()) {
    throw Error("split must have non-empty train and test parts");
  }
  std::vector<char> seen(rows, 0);
  for (std::size_t i : train_indices) {
    if (i >= rows) throw Error("train index " + std::to_string(i) + " out of range");
    if (seen[i]) throw Error("row " + std::to_string(i) + " appears twice in the split");
    seen[i] = 1;
  }
  for (std::size_t i : test_indices) {
    if (i >= rows) throw Error("test index " + std::to_string(i) + " out of range");
    if (seen[i]) throw Error("row " + std::to_string(i) + " appears twice in the split");
    seen[i] = 1;
  }
}

void save_labels(const LabelSet& labels, const std::filesystem::path& path) {
  labels.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "row,labels\n";
  for (std::size_t r = 0; r < labels.assignments.size(); ++r) {
    out << r << ",";
    const auto& a = labels.assignments[r];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (k) out << ';';
      out << a[k];
    }
    out << "\n";
  }
  if (!out) throw Error("write failed for " + path.string());
}

LabelSet load_labels(const std::filesystem::path& path,
                     std::optional<LabelKind> kind_override,
                     std::optional<std::size_t> classes_override) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || strip(line) != "row,labels") {
    throw Error("labels file " + path.string() + " missing 'row,labels' header");
  }
  LabelSet ls;
  std::uint32_t max_id = 0;
  bool any_label = false;
  bool all_single = true;
  std::size_t expect_row = 0;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty()) continue;
    const auto parts = split_on(line, ',');
    if (parts.size() != 2) throw Error("malformed labels line: '" + line + "'");
    if (parse_u64(parts[0], "row id") != expect_row) {
      throw Error("labels rows must be consecutive from 0; got '" + parts[0] + "'");
    }
    ++expect_row;
    std::vector<std::uint32_t> ids;
    if (!strip(parts[1]).empty()) {
      for (const auto& tok : split_on(strip(parts[1]), ';')) {
        const std::uint64_t v = parse_u64(strip(tok), "class id");
        if (v > 0xFFFFFFFFull) throw Error("class id too large: " + tok);
        ids.push_back(std::uint32_t(v));
      }
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() != 1) all_single = false;
    for (std::uint32_t id : ids) {
      max_id = std::max(max_id, id);
      any_label = true;
    }
    ls.assignments.push_back(std::move(ids));
  }
  if (ls.assignments.empty()) throw Error("labels file " + path.string() + " has no rows");
  ls.kind = kind_override.value_or(all_single ? LabelKind::single_label
                                              : LabelKind::multi_label);
  ls.classes = classes_override.value_or(any_label ? std::size_t(max_id) + 1 : 0);
  ls.validate();
  return ls;
}

namespace {
void write_index_line(std::ofstream& out, const char* prefix,
                      const std::vector<std::size_t>& ids) {
  out << prefix << ": ";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out << ',';
    out << ids[k];
  }
  out << "\n";
}

std::vector<std::size_t> parse_index_line(const std::string& line, const char* prefix) {
  const std::string p = std::string(prefix) + ":";
  if (line.rfind(p, 0) != 0) {
    throw Error("split file line must start with '" + p + "'");
  }
  std::vector<std::size_t> ids;
  const std::string rest = strip(line.substr(p.size()));
  if (rest.empty()) return ids;
  for (const auto& tok : split_on(rest, ',')) {
    ids.push_back(std::size_t(parse_u64(strip(tok), "row index")));
  }
  return ids;
}
}  // namespace

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_index_line(out, "train", split.train_indices);
  write_index_line(out, "test", split.test_indices);
  if (!out) throw Error("write failed for " + path.string());
}

DatasetSplit load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string train_line, test_line;
  if (!std::getline(in, train_line) || !std::getline(in, test_line)) {
    throw Error("split file " + path.string() + " must have two lines");
  }
  DatasetSplit s;
  s.train_indices = parse_index_line(strip(train_line), "train");
  s.test_indices = parse_index_line(strip(test_line), "test");
  return s;
}

}  // namespace featstress
