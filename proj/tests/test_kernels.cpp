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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "featstress/kernels.hpp"
#include "featstress/rng.hpp"

using namespace featstress;

namespace {
std::vector<double> random_vec(RngStream& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.next_double();
  return v;
}
}  // namespace

TEST_CASE("scalar dot matches a plain loop within reassociation tolerance") {
  RngStream rng(7, "kernels-dot");
  const auto a = random_vec(rng, 1001, -2.0, 2.0);
  const auto b = random_vec(rng, 1001, -2.0, 2.0);
  double plain = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) plain += a[i] * b[i];
  const double got = kern::scalar_ops().dot(a.data(), b.data(), a.size());
  CHECK(got == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("AVX2 variant is bit-identical to the scalar reference") {
  if (!kern::avx2_available()) {
    MESSAGE("AVX2 not available on this host; dispatch falls back to scalar");
    return;
  }
  const auto& s = kern::scalar_ops();
  const auto& v = kern::avx2_ops();
  RngStream rng(11, "kernels-equivalence");

  // lengths cover every tail residue and the empty case
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 64, 255, 256, 1000, 4096}) {
    const auto a = random_vec(rng, n, -100.0, 100.0);
    const auto b = random_vec(rng, n, -100.0, 100.0);
    const double alpha = rng.next_double() * 4.0 - 2.0;

    CHECK(s.dot(a.data(), b.data(), n) == v.dot(a.data(), b.data(), n));
    CHECK(s.sum_squares(a.data(), n) == v.sum_squares(a.data(), n));

    auto y1 = b, y2 = b;
    s.axpy(y1.data(), alpha, a.data(), n);
    v.axpy(y2.data(), alpha, a.data(), n);
    CHECK(y1 == y2);

    y1 = a;
    y2 = a;
    s.scale(y1.data(), alpha, n);
    v.scale(y2.data(), alpha, n);
    CHECK(y1 == y2);

    std::vector<double> o1(n), o2(n);
    s.subtract(o1.data(), a.data(), b.data(), n);
    v.subtract(o2.data(), a.data(), b.data(), n);
    CHECK(o1 == o2);

    if (n > 0) {
      CHECK(s.minmax(a.data(), n) == v.minmax(a.data(), n));
      auto mn1 = b, mx1 = b, mn2 = b, mx2 = b;
      s.minmax_update(mn1.data(), mx1.data(), a.data(), n);
      v.minmax_update(mn2.data(), mx2.data(), a.data(), n);
      CHECK(mn1 == mn2);
      CHECK(mx1 == mx2);
    }
  }
}

TEST_CASE("minmax agrees with std::minmax_element") {
  RngStream rng(3, "kernels-minmax");
  const auto a = random_vec(rng, 333, -50.0, 50.0);
  const auto [mn, mx] = kern::minmax(a.data(), a.size());
  double emn = a[0], emx = a[0];
  for (double x : a) {
    emn = std::min(emn, x);
    emx = std::max(emx, x);
  }
  CHECK(mn == emn);
  CHECK(mx == emx);
}

TEST_CASE("axpy and subtract do what they say") {
  std::vector<double> y{1.0, 2.0, 3.0};
  const std::vector<double> x{10.0, 20.0, 30.0};
  kern::axpy(y.data(), 0.5, x.data(), 3);
  CHECK(y == std::vector<double>{6.0, 12.0, 18.0});

  std::vector<double> out(3);
  kern::subtract(out.data(), y.data(), x.data(), 3);
  CHECK(out == std::vector<double>{-4.0, -8.0, -12.0});
}

TEST_CASE("active dispatch picks an implementation that exists") {
  const auto& ops = kern::active();
  CHECK((std::string(ops.name) == "avx2" || std::string(ops.name) == "scalar"));
  if (kern::avx2_available()) CHECK(std::string(ops.name) == "avx2");
}
