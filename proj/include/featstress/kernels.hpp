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

#include <cstddef>
#include <utility>

namespace featstress::kern {

// Function table for the hot numeric loops. Two implementations ship: a
// scalar reference and an AVX2 variant selected at runtime via CPUID.
//
// Contract: both variants return bit-identical results for every operation.
// Elementwise ops share the per-element expression (mul then add, no FMA),
// and the reductions (dot, sum_squares) fix the same 4-lane accumulation
// and the reduction order ((l0+l2)+(l1+l3), then the sequential tail) in
// both paths. The core library is compiled with -ffp-contract=off so the
// scalar path cannot be silently fused. tests/test_kernels.cpp asserts
// exact equality, so results never depend on which CPU ran them.
struct Ops {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // y[i] *= a
  void (*scale)(double* y, double a, std::size_t n);
  // out[i] = a[i] - b[i]
  void (*subtract)(double* out, const double* a, const double* b, std::size_t n);
  // mn[i] = min(mn[i], x[i]); mx[i] = max(mx[i], x[i]); finite inputs only
  void (*minmax_update)(double* mn, double* mx, const double* x, std::size_t n);
  // global (min, max); n == 0 yields (+inf, -inf)
  std::pair<double, double> (*minmax)(const double* x, std::size_t n);
};

const Ops& scalar_ops();

// True when the AVX2 translation unit was compiled in and this CPU has AVX2.
bool avx2_available();
const Ops& avx2_ops();

const Ops& active();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double sum_squares(const double* a, std::size_t n) {
  return active().sum_squares(a, n);
}
inline void axpy(double* y, double a, const double* x, std::size_t n) {
  active().axpy(y, a, x, n);
}
inline void scale(double* y, double a, std::size_t n) { active().scale(y, a, n); }
inline void subtract(double* out, const double* a, const double* b, std::size_t n) {
  active().subtract(out, a, b, n);
}
inline void minmax_update(double* mn, double* mx, const double* x, std::size_t n) {
  active().minmax_update(mn, mx, x, n);
}
inline std::pair<double, double> minmax(const double* x, std::size_t n) {
  return active().minmax(x, n);
}

}  // namespace featstress::kern
