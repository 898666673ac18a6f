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

// Compiled with -mavx2. No FMA: products and sums stay separate so each
// lane performs the same two roundings as the scalar reference.

#include "featstress/kernels.hpp"

#if defined(FEATSTRESS_ENABLE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <limits>

namespace featstress::kern {
namespace {

// ((l0+l2)+(l1+l3)), identical to the scalar reduction order.
inline double reduce_add(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double s = reduce_add(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double s = reduce_add(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_avx2(double* y, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), va));
  }
  for (; i < n; ++i) y[i] = y[i] * a;
}

void subtract_avx2(double* out, const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void minmax_update_avx2(double* mn, double* mx, const double* x, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(mn + i, _mm256_min_pd(_mm256_loadu_pd(mn + i), vx));
    _mm256_storeu_pd(mx + i, _mm256_max_pd(_mm256_loadu_pd(mx + i), vx));
  }
  for (; i < n; ++i) {
    mn[i] = std::min(mn[i], x[i]);
    mx[i] = std::max(mx[i], x[i]);
  }
}

std::pair<double, double> minmax_avx2(const double* x, std::size_t n) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  if (n4 > 0) {
    __m256d vmn = _mm256_set1_pd(mn);
    __m256d vmx = _mm256_set1_pd(mx);
    for (; i < n4; i += 4) {
      __m256d v = _mm256_loadu_pd(x + i);
      vmn = _mm256_min_pd(vmn, v);
      vmx = _mm256_max_pd(vmx, v);
    }
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, vmn);
    mn = std::min(std::min(tmp[0], tmp[1]), std::min(tmp[2], tmp[3]));
    _mm256_store_pd(tmp, vmx);
    mx = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
  }
  for (; i < n; ++i) {
    mn = std::min(mn, x[i]);
    mx = std::max(mx, x[i]);
  }
  return {mn, mx};
}

}  // namespace

namespace detail {

const Ops& avx2_table() {
  static const Ops ops{
      "avx2",       dot_avx2,      sum_squares_avx2, axpy_avx2,
      scale_avx2,   subtract_avx2, minmax_update_avx2, minmax_avx2,
  };
  return ops;
}

}  // namespace detail
}  // namespace featstress::kern

#endif  // FEATSTRESS_ENABLE_AVX2
