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

#include "featstress/fmat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "featstress/error.hpp"
#include "featstress/io_util.hpp"

namespace featstress {

void FeatureMatrix::validate() const {
  if (rows == 0 || dims == 0) throw Error("invalid dimensions: rows and dims must be >= 1");
  if (values.size() != rows * dims) throw Error("value buffer does not match rows*dims");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw Error("non-finite value at row " + std::to_string(i / dims) + ", dim " +
                  std::to_string(i % dims));
    }
    if (std::abs(v) > double(std::numeric_limits<float>::max())) {
      throw Error("value overflows 32-bit float at row " + std::to_string(i / dims));
    }
  }
}

FeatureMatrix make_matrix(std::size_t rows, std::size_t dims, std::string tag) {
  FeatureMatrix m;
  m.rows = rows;
  m.dims = dims;
  m.values.assign(rows * dims, 0.0);
  m.source_tag = std::move(tag);
  return m;
}

FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<std::size_t>& indices) {
  FeatureMatrix out = make_matrix(indices.size(), m.dims, m.source_tag);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= m.rows) throw Error("row index out of range");
    std::copy(m.row(indices[i]), m.row(indices[i]) + m.dims, out.row(i));
  }
  return out;
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const bool magic_ok =
      bytes.size() >= 7 && std::equal(bytes.begin(), bytes.begin() + 4, "FMAT");
  if (magic_ok && bytes[6] != 1) {
    throw Error("unsupported dtype " + std::to_string(int(bytes[6])) +
                " at offset 6 (feature files must be float32)");
  }
  io::UnpackedBlob blob = io::unpack_fmat(bytes);
  if (blob.rows == 0 || blob.dims == 0) {
    throw Error("invalid dimensions at offset 8: rows and dims must be >= 1");
  }
  FeatureMatrix m;
  m.rows = std::size_t(blob.rows);
  m.dims = std::size_t(blob.dims);
  m.source_tag = std::move(blob.tag);
  m.values = std::move(blob.values);
  return m;
}

void save_features(const FeatureMatrix& m, const std::filesystem::path& path) {
  m.validate();
  if (m.source_tag.size() > 0xFFFF) throw Error("source_tag too long");

  io::ByteWriter w;
  w.bytes("FMAT", 4);
  w.u16(1);
  w.u8(1);  // float32
  w.u8(0);
  w.u64(m.rows);
  w.u64(m.dims);
  w.u16(std::uint16_t(m.source_tag.size()));
  w.bytes(m.source_tag.data(), m.source_tag.size());
  for (double v : m.values) w.f32(float(v));

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    const auto& buf = w.data();
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move temp file into place at " + path.string());
  }
}

}  // namespace featstress
