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
#include <string>
#include <string_view>
#include <vector>

namespace featstress::io {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian byte writer/reader used by the FMAT container.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void bytes(const void* data, std::size_t n);
  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  std::string str(std::size_t n);
  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n);
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

// FMAT container for raw numeric blobs embedded in JSON manifests.
// Same header layout as feature files; dtype 1 = float32, dtype 2 = float64
// (models use float64 so round-trips are lossless). Shape is rows x dims.
std::vector<std::uint8_t> pack_fmat_f64(const std::vector<double>& values,
                                        std::uint64_t rows, std::uint64_t dims,
                                        std::string_view tag);
struct UnpackedBlob {
  std::uint64_t rows = 0;
  std::uint64_t dims = 0;
  std::string tag;
  std::vector<double> values;
};
UnpackedBlob unpack_fmat(const std::vector<std::uint8_t>& bytes);

}  // namespace featstress::io
