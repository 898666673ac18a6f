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
#include <span>
#include <vector>

#include "featstress/fmat.hpp"

#include "json.hpp"

namespace featstress {

// Scales v to unit Euclidean norm in place. Vectors with norm below 1e-12
// pass through unchanged (quantization can produce all-equal rows; this
// policy avoids NaN). Throws on non-finite input.
void l2_normalize(std::span<double> v);
void l2_normalize_rows(FeatureMatrix& m);

// Orthonormal principal axes of a training set. components is row-major,
// n_components x dims; eigenvalues are the per-component variances, sorted
// descending and clamped at zero. Sign convention: each component's entry
// of largest magnitude is positive (first such entry on ties).
struct EigenBasis {
  std::size_t dims = 0;
  std::size_t n_components = 0;
  std::vector<double> mean;
  std::vector<double> components;
  std::vector<double> eigenvalues;

  const double* component(std::size_t k) const { return components.data() + k * dims; }
  double total_variance() const;
  void validate() const;

  bool operator==(const EigenBasis&) const = default;
};

// Cyclic Jacobi for a symmetric d x d matrix (row-major, destroyed).
// Outputs all d eigenpairs, unsorted: eigenvectors[k*d..] is the k-th
// eigenvector. Returns the number of sweeps used; throws when the sweep
// cap is exceeded.
std::size_t jacobi_eigen_symmetric(std::vector<double>& a, std::size_t d,
                                   std::vector<double>& eigenvectors,
                                   std::vector<double>& eigenvalues,
                                   std::size_t max_sweeps = 64);

// Sample covariance eigendecomposition of the mean-centered training rows.
// Keeps min(rows-1, dims) components. Uses the dims x dims covariance when
// dims <= rows-1 and the Gram-matrix route otherwise.
EigenBasis fit_eigenbasis(const FeatureMatrix& train);

// Projects each row onto the top p components: out[i] = C[0..p) . (row - mean).
FeatureMatrix project(const EigenBasis& basis, const FeatureMatrix& m, std::size_t p);

nlohmann::json eigenbasis_to_json(const EigenBasis& basis);
EigenBasis eigenbasis_from_json(const nlohmann::json& j);

}  // namespace featstress
