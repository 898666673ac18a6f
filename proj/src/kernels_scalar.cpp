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

#include "featstress/kernels.hpp"

#include <algorithm>
#include <limits>

namespace featstress::kern {
namespace {

// Reference kernels. The 4-lane accumulators and the fixed reduction order
// mirror the AVX2 variant exactly; see kernels.hpp for the contract.

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    l0 += a[i] * b[i];
    l1 += a[i + 1] * b[i + 1];
    l2 += a[i + 2] * b[i + 2];
    l3 += a[i + 3] * b[i + 3];
  }
  double s = (l0 + l2) + (l1 + l3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    l0 += a[i] * a[i];
    l1 += a[i + 1] * a[i + 1];
    l2 += a[i + 2] * a[i + 2];
    l3 += a[i + 3] * a[i + 3];
  }
  double s = (l0 + l2) + (l1 + l3);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void scale_scalar(double* y, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] * a;
}

void subtract_scalar(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void minmax_update_scalar(double* mn, double* mx, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    mn[i] = std::min(mn[i], x[i]);
    mx[i] = std::max(mx[i], x[i]);
  }
}

std::pair<double, double> minmax_scalar(const double* x, std::size_t n) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    mn = std::min(mn, x[i]);
    mx = std::max(mx, x[i]);
  }
  return {mn, mx};
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",       dot_scalar,      sum_squares_scalar, axpy_scalar,
      scale_scalar,   subtract_scalar, minmax_update_scalar, minmax_scalar,
  };
  return ops;
}

}  // namespace featstress::kern
