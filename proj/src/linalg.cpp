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

#include "featstress/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "featstress/error.hpp"
#include "featstress/io_util.hpp"
#include "featstress/kernels.hpp"

namespace featstress {

void l2_normalize(std::span<double> v) {
  const double ss = kern::sum_squares(v.data(), v.size());
  if (!std::isfinite(ss)) throw Error("l2_normalize: non-finite input");
  const double norm = std::sqrt(ss);
  if (norm < 1e-12) return;
  kern::scale(v.data(), 1.0 / norm, v.size());
}

void l2_normalize_rows(FeatureMatrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    l2_normalize(std::span<double>(m.row(r), m.dims));
  }
}

double EigenBasis::total_variance() const {
  return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
}

void EigenBasis::validate() const {
  if (mean.size() != dims) throw Error("eigen basis: mean size mismatch");
  if (components.size() != n_components * dims) {
    throw Error("eigen basis: component buffer mismatch");
  }
  if (eigenvalues.size() != n_components) throw Error("eigen basis: eigenvalue count mismatch");
  for (std::size_t k = 0; k + 1 < n_components; ++k) {
    if (eigenvalues[k] < eigenvalues[k + 1]) {
      throw Error("eigen basis: eigenvalues not sorted descending");
    }
  }
  for (double ev : eigenvalues) {
    if (ev < 0.0) throw Error("eigen basis: negative eigenvalue");
  }
  for (std::size_t a = 0; a < n_components; ++a) {
    for (std::size_t b = a; b < n_components; ++b) {
      const double d = kern::dot(component(a), component(b), dims);
      const double want = a == b ? 1.0 : 0.0;
      if (std::abs(d - want) > 1e-8) throw Error("eigen basis: components not orthonormal");
    }
  }
}

std::size_t jacobi_eigen_symmetric(std::vector<double>& a, std::size_t d,
                                   std::vector<double>& eigenvectors,
                                   std::vector<double>& eigenvalues,
                                   std::size_t max_sweeps) {
  if (a.size() != d * d) throw Error("jacobi: matrix buffer mismatch");
  auto A = [&](std::size_t r, std::size_t c) -> double& { return a[r * d + c]; };

  // v holds eigenvectors as columns while rotating; transposed on output.
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  std::vector<double> w(d), b(d), z(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) w[i] = b[i] = A(i, i);

  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double sm = 0.0;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) sm += std::abs(A(p, q));
    }
    if (sm == 0.0) {
      eigenvalues = w;
      eigenvectors.assign(d * d, 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) eigenvectors[k * d + i] = v[i * d + k];
      }
      return sweep;
    }
    const double tresh = sweep < 4 ? 0.2 * sm / double(d * d) : 0.0;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double g = 100.0 * std::abs(A(p, q));
        if (sweep > 4 && std::abs(w[p]) + g == std::abs(w[p]) &&
            std::abs(w[q]) + g == std::abs(w[q])) {
          A(p, q) = 0.0;
        } else if (std::abs(A(p, q)) > tresh) {
          double h = w[q] - w[p];
          double t;
          if (std::abs(h) + g == std::abs(h)) {
            t = A(p, q) / h;
          } else {
            const double theta = 0.5 * h / A(p, q);
            t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);
          h = t * A(p, q);
          z[p] -= h;
          z[q] += h;
          w[p] -= h;
          w[q] += h;
          A(p, q) = 0.0;
          auto rot = [&](double& x, double& y) {
            const double gx = x, gy = y;
            x = gx - s * (gy + gx * tau);
            y = gy + s * (gx - gy * tau);
          };
          for (std::size_t j = 0; j < p; ++j) rot(A(j, p), A(j, q));
          for (std::size_t j = p + 1; j < q; ++j) rot(A(p, j), A(j, q));
          for (std::size_t j = q + 1; j < d; ++j) rot(A(p, j), A(q, j));
          for (std::size_t j = 0; j < d; ++j) rot(v[j * d + p], v[j * d + q]);
        }
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      b[i] += z[i];
      w[i] = b[i];
      z[i] = 0.0;
    }
  }
  throw Error("eigensolver did not converge within " + std::to_string(max_sweeps) +
              " sweeps");
}

namespace {

void fix_component_sign(double* comp, std::size_t dims) {
  std::size_t arg = 0;
  double best = std::abs(comp[0]);
  for (std::size_t i = 1; i < dims; ++i) {
    const double m = std::abs(comp[i]);
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  if (comp[arg] < 0.0) {
    for (std::size_t i = 0; i < dims; ++i) comp[i] = -comp[i];
  }
}

std::vector<std::size_t> sort_desc(const std::vector<double>& vals) {
  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  return order;
}

// Completes an orthonormal set with coordinate vectors; used when the
// training data has lower rank than the requested component count.
void complete_basis(std::vector<double>& components, std::size_t have,
                    std::size_t want, std::size_t dims) {
  std::vector<double> cand(dims);
  for (std::size_t e = 0; e < dims && have < want; ++e) {
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[e] = 1.0;
    for (std::size_t k = 0; k < have; ++k) {
      const double* comp = components.data() + k * dims;
      const double proj = kern::dot(comp, cand.data(), dims);
      kern::axpy(cand.data(), -proj, comp, dims);
    }
    const double norm = std::sqrt(kern::sum_squares(cand.data(), dims));
    if (norm < 1e-8) continue;
    kern::scale(cand.data(), 1.0 / norm, dims);
    std::copy(cand.begin(), cand.end(), components.begin() + have * dims);
    ++have;
  }
  if (have < want) throw Error("could not complete orthonormal basis");
}

}  // namespace

EigenBasis fit_eigenbasis(const FeatureMatrix& train) {
  if (train.rows < 2) throw Error("fit_eigenbasis: need at least 2 rows");
  const std::size_t r = train.rows;
  const std::size_t d = train.dims;
  const std::size_t nc = std::min(r - 1, d);

  EigenBasis basis;
  basis.dims = d;
  basis.n_components = nc;
  basis.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < r; ++i) kern::axpy(basis.mean.data(), 1.0, train.row(i), d);
  kern::scale(basis.mean.data(), 1.0 / double(r), d);

  std::vector<double> centered(r * d);
  for (std::size_t i = 0; i < r; ++i) {
    kern::subtract(centered.data() + i * d, train.row(i), basis.mean.data(), d);
  }

  basis.components.assign(nc * d, 0.0);
  basis.eigenvalues.assign(nc, 0.0);

  if (d <= r - 1) {
    // covariance route: C = centered^T centered / (r-1)
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      const double* row = centered.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) {
        if (row[j] != 0.0) kern::axpy(cov.data() + j * d, row[j], row, d);
      }
    }
    kern::scale(cov.data(), 1.0 / double(r - 1), d * d);
    std::vector<double> vecs, vals;
    jacobi_eigen_symmetric(cov, d, vecs, vals);
    const auto order = sort_desc(vals);
    for (std::size_t k = 0; k < nc; ++k) {
      basis.eigenvalues[k] = std::max(vals[order[k]], 0.0);
      std::copy(vecs.begin() + std::ptrdiff_t(order[k] * d),
                vecs.begin() + std::ptrdiff_t((order[k] + 1) * d),
                basis.components.begin() + std::ptrdiff_t(k * d));
    }
  } else {
    // Gram route: G = centered centered^T / (r-1) shares the covariance
    // spectrum; components come back through centered^T u / sqrt((r-1) l).
    std::vector<double> gram(r * r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = i; j < r; ++j) {
        const double g =
            kern::dot(centered.data() + i * d, centered.data() + j * d, d) / double(r - 1);
        gram[i * r + j] = g;
        gram[j * r + i] = g;
      }
    }
    std::vector<double> vecs, vals;
    jacobi_eigen_symmetric(gram, r, vecs, vals);
    const auto order = sort_desc(vals);
    const double lmax = std::max(vals[order[0]], 0.0);
    const double tol = std::max(lmax * 1e-12, 1e-300);
    std::size_t have = 0;
    for (std::size_t k = 0; k < nc; ++k) {
      const double lambda = vals[order[k]];
      if (lambda <= tol) break;
      basis.eigenvalues[have] = lambda;
      const double* u = vecs.data() + order[k] * r;
      double* comp = basis.components.data() + have * d;
      for (std::size_t i = 0; i < r; ++i) {
        if (u[i] != 0.0) kern::axpy(comp, u[i], centered.data() + i * d, d);
      }
      const double norm = std::sqrt(kern::sum_squares(comp, d));
      if (norm < 1e-150) continue;  // numerically dead direction, refill below
      kern::scale(comp, 1.0 / norm, d);
      ++have;
    }
    complete_basis(basis.components, have, nc, d);
  }

  for (std::size_t k = 0; k < nc; ++k) {
    fix_component_sign(basis.components.data() + k * d, d);
  }
  return basis;
}

FeatureMatrix project(const EigenBasis& basis, const FeatureMatrix& m, std::size_t p) {
  if (p == 0 || p > basis.n_components) {
    throw Error("project: p must be in [1, " + std::to_string(basis.n_components) + "]");
  }
  if (m.dims != basis.dims) throw Error("project: dimension mismatch");
  FeatureMatrix out = make_matrix(m.rows, p, m.source_tag);
  std::vector<double> centered(m.dims);
  for (std::size_t i = 0; i < m.rows; ++i) {
    kern::subtract(centered.data(), m.row(i), basis.mean.data(), m.dims);
    double* dst = out.row(i);
    for (std::size_t k = 0; k < p; ++k) {
      dst[k] = kern::dot(basis.component(k), centered.data(), m.dims);
    }
  }
  return out;
}

nlohmann::json eigenbasis_to_json(const EigenBasis& basis) {
  nlohmann::json j;
  j["dims"] = basis.dims;
  j["n_components"] = basis.n_components;
  j["eigenvalues"] = basis.eigenvalues;  // JSON doubles round-trip losslessly
  j["mean"] = io::base64_encode(io::pack_fmat_f64(basis.mean, 1, basis.dims, "mean"));
  j["components"] = io::base64_encode(
      io::pack_fmat_f64(basis.components, basis.n_components, basis.dims, "components"));
  return j;
}

EigenBasis eigenbasis_from_json(const nlohmann::json& j) {
  EigenBasis basis;
  basis.dims = j.at("dims").get<std::size_t>();
  basis.n_components = j.at("n_components").get<std::size_t>();
  basis.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  basis.mean = io::unpack_fmat(io::base64_decode(j.at("mean").get<std::string>())).values;
  basis.components =
      io::unpack_fmat(io::base64_decode(j.at("components").get<std::string>())).values;
  basis.validate();
  return basis;
}

}  // namespace featstress
