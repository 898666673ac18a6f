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

namespace featstress {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t basis);

// One step of the splitmix64 sequence; advances `state`.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Deterministic, cross-platform random stream. The generator is frozen:
// state = four splitmix64 outputs from (seed XOR fnv1a64(label)), then
// xoshiro256++ for the draws. Pure 64-bit integer arithmetic, so sequences
// are identical on every platform. See docs/FORMATS.md for the exact
// derivation scheme; tests/test_rng.cpp pins it against an independent
// re-implementation.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53 random bits.
  double next_double();
  // Uniform in [0, bound); bound >= 1. Masked rejection.
  std::uint64_t next_below(std::uint64_t bound);
  // Standard normal via Box-Muller; second value of each pair is cached.
  double next_gaussian();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::string label_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Seed for a sweep cell, mixed once through splitmix64 so nearby labels do
// not produce nearby seeds. Used by the runner; recorded in SweepResult.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

}  // namespace featstress
