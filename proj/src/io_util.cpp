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

#include "featstress/io_util.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "featstress/error.hpp"

namespace featstress::io {

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    std::uint32_t v = (std::uint32_t(bytes[i]) << 16) | (std::uint32_t(bytes[i + 1]) << 8) |
                      bytes[i + 2];
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back(kB64Alphabet[v & 63]);
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    std::uint32_t v = std::uint32_t(bytes[i]) << 16;
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    std::uint32_t v = (std::uint32_t(bytes[i]) << 16) | (std::uint32_t(bytes[i + 1]) << 8);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw Error("base64: misplaced padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) throw Error("base64: data after padding");
      int d = b64_value(c);
      if (d < 0) throw Error("base64: invalid character");
      v = (v << 6) | std::uint32_t(d);
    }
    out.push_back(std::uint8_t(v >> 16));
    if (pad < 2) out.push_back(std::uint8_t(v >> 8));
    if (pad < 1) out.push_back(std::uint8_t(v));
  }
  return out;
}

void ByteWriter::u16(std::uint16_t v) {
  buf_.push_back(std::uint8_t(v));
  buf_.push_back(std::uint8_t(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int k = 0; k < 4; ++k) buf_.push_back(std::uint8_t(v >> (8 * k)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int k = 0; k < 8; ++k) buf_.push_back(std::uint8_t(v >> (8 * k)));
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  buf_.insert(buf_.end(), p, p + n);
}

void ByteReader::need(std::size_t n) {
  if (size_ - pos_ < n) {
    throw Error("truncated file at offset " + std::to_string(size_) + " (needed " +
                std::to_string(pos_ + n) + " bytes)");
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = std::uint16_t(data_[pos_]) | (std::uint16_t(data_[pos_ + 1]) << 8);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= std::uint32_t(data_[pos_ + k]) << (8 * k);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t(data_[pos_ + k]) << (8 * k);
  pos_ += 8;
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str(std::size_t n) {
  need(n);
  std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> pack_fmat_f64(const std::vector<double>& values,
                                        std::uint64_t rows, std::uint64_t dims,
                                        std::string_view tag) {
  if (values.size() != rows * dims) throw Error("pack_fmat_f64: shape mismatch");
  if (tag.size() > 0xFFFF) throw Error("pack_fmat_f64: tag too long");
  ByteWriter w;
  w.bytes("FMAT", 4);
  w.u16(1);           // format version
  w.u8(2);            // dtype: float64
  w.u8(0);            // reserved
  w.u64(rows);
  w.u64(dims);
  w.u16(std::uint16_t(tag.size()));
  w.bytes(tag.data(), tag.size());
  for (double v : values) w.f64(v);
  return w.take();
}

UnpackedBlob unpack_fmat(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes.data(), bytes.size());
  if (r.str(4) != "FMAT") throw Error("bad magic at offset 0");
  const std::uint16_t version = r.u16();
  if (version != 1) {
    throw Error("unsupported version " + std::to_string(version) + " at offset 4");
  }
  const std::uint8_t dtype = r.u8();
  if (dtype != 1 && dtype != 2) {
    throw Error("unsupported dtype " + std::to_string(int(dtype)) + " at offset 6");
  }
  r.u8();  // reserved
  UnpackedBlob out;
  out.rows = r.u64();
  out.dims = r.u64();
  const std::size_t elem = dtype == 1 ? 4 : 8;
  if (out.rows != 0 && out.dims > (std::uint64_t(-1) / out.rows / elem)) {
    throw Error("dimension overflow at offset 8");
  }
  const std::uint16_t tag_len = r.u16();
  out.tag = r.str(tag_len);
  const std::uint64_t count = out.rows * out.dims;
  if (r.remaining() != count * elem) {
    throw Error("truncated file at offset " + std::to_string(r.offset() + r.remaining()) +
                " (expected " + std::to_string(r.offset() + count * elem) + " bytes)");
  }
  out.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t off = r.offset();
    const double v = dtype == 1 ? double(r.f32()) : r.f64();
    if (!std::isfinite(v)) {
      throw Error("non-finite value at row " + std::to_string(out.dims ? i / out.dims : 0) +
                  ", dim " + std::to_string(out.dims ? i % out.dims : 0) + " (offset " +
                  std::to_string(off) + ")");
    }
    out.values[i] = v;
  }
  return out;
}

}  // namespace featstress::io
