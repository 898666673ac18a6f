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

#include "featstress/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "featstress/error.hpp"
#include "featstress/io_util.hpp"
#include "featstress/kernels.hpp"
#include "featstress/rng.hpp"

#include "json.hpp"

namespace featstress {

// Dual coordinate descent for the hinge-loss SVM:
//
//   min_a  0.5 a^T (Q + D) a - e^T a,  0 <= a_i <= U
//
// with Q_ij = y_i y_j x_i.x_j. L1 hinge: D = 0, U = C. L2 hinge:
// D_ii = 1/(2C), U = inf. Coordinate order is reshuffled every epoch from a
// seeded stream; shrinking follows the usual projected-gradient bookkeeping
// (coordinates pinned at a bound with a gradient pushing outward drop out of
// the active set until the remaining set converges, then one full pass
// confirms).
BinarySolveResult solve_binary_hinge(const FeatureMatrix& rows,
                                     const std::vector<int>& labels,
                                     const TrainOptions& opts,
                                     std::uint64_t permutation_salt) {
  const std::size_t l = rows.rows;
  const std::size_t d = rows.dims;
  if (labels.size() != l) throw Error("solve_binary_hinge: label count mismatch");
  if (!(opts.c > 0.0)) throw Error("solve_binary_hinge: C must be positive");

  // Augmented representation: one extra constant coordinate of value 1
  // carries the bias.
  const std::size_t da = d + 1;
  std::vector<double> x(l * da);
  for (std::size_t i = 0; i < l; ++i) {
    std::copy(rows.row(i), rows.row(i) + d, x.begin() + std::ptrdiff_t(i * da));
    x[i * da + d] = 1.0;
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double diag = opts.loss == SvmLoss::l1_hinge ? 0.0 : 0.5 / opts.c;
  const double upper = opts.loss == SvmLoss::l1_hinge ? opts.c : inf;

  std::vector<double> alpha(l, 0.0), w(da, 0.0), qd(l);
  std::vector<std::size_t> index(l);
  for (std::size_t i = 0; i < l; ++i) {
    qd[i] = diag + kern::sum_squares(&x[i * da], da);
    index[i] = i;
  }

  RngStream perm(opts.permutation_seed ^ permutation_salt, "svm-permutation");
  std::size_t active = l;
  double pg_max_old = inf, pg_min_old = -inf;
  std::size_t epoch = 0;
  bool converged = false;

  while (epoch < opts.max_epochs) {
    double pg_max = -inf, pg_min = inf;
    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t j = s + std::size_t(perm.next_below(active - s));
      std::swap(index[s], index[j]);
    }
    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double yi = labels[i];
      double g = yi * kern::dot(w.data(), &x[i * da], da) - 1.0 + alpha[i] * diag;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == upper) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), upper);
        kern::axpy(w.data(), (alpha[i] - old) * yi, &x[i * da], da);
      }
    }
    ++epoch;

    if (pg_max - pg_min <= opts.tolerance) {
      if (active == l) {
        converged = true;
        break;
      }
      // converged on the shrunk set; confirm against everything
      active = l;
      pg_max_old = inf;
      pg_min_old = -inf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? inf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -inf : pg_min;
  }

  BinarySolveResult out;
  out.weights.assign(w.begin(), w.begin() + std::ptrdiff_t(d));
  out.bias = w[d];
  out.alpha = std::move(alpha);
  out.epochs = epoch;
  out.converged = converged;
  return out;
}

TrainedClassifier train(const FeatureMatrix& features, const LabelSet& labels,
                        const DatasetSplit& split, const TrainOptions& opts) {
  features.validate();
  labels.validate();
  if (labels.rows() != features.rows) throw Error("train: labels/features row mismatch");
  split.validate(features.rows);

  const FeatureMatrix train_rows = take_rows(features, split.train_indices);
  const std::size_t l = train_rows.rows;
  const std::size_t k_classes = labels.classes;

  TrainedClassifier clf;
  clf.classes = k_classes;
  clf.dims = features.dims;
  clf.weights.assign(k_classes * features.dims, 0.0);
  clf.bias.assign(k_classes, 0.0);
  clf.c_param = opts.c;
  clf.loss = opts.loss;
  clf.tolerance = opts.tolerance;
  clf.iterations_used.assign(k_classes, 0);
  clf.converged.assign(k_classes, false);

  std::vector<int> y(l);
  for (std::size_t k = 0; k < k_classes; ++k) {
    std::size_t positives = 0;
    for (std::size_t i = 0; i < l; ++i) {
      const bool pos = labels.contains(split.train_indices[i], std::uint32_t(k));
      y[i] = pos ? 1 : -1;
      positives += pos;
    }
    if (positives == 0) {
      throw Error("train: class " + std::to_string(k) + " has no positive training rows");
    }
    if (positives == l) {
      throw Error("train: class " + std::to_string(k) + " has no negative training rows");
    }
    const BinarySolveResult solved =
        solve_binary_hinge(train_rows, y, opts, fnv1a64("class-" + std::to_string(k)));
    std::copy(solved.weights.begin(), solved.weights.end(),
              clf.weights.begin() + std::ptrdiff_t(k * features.dims));
    clf.bias[k] = solved.bias;
    clf.iterations_used[k] = solved.epochs;
    clf.converged[k] = solved.converged;
  }
  return clf;
}

FeatureMatrix decision_values(const TrainedClassifier& clf, const FeatureMatrix& features) {
  if (features.dims != clf.dims) {
    throw Error("decision_values: features have " + std::to_string(features.dims) +
                " dims, classifier expects " + std::to_string(clf.dims));
  }
  FeatureMatrix out = make_matrix(features.rows, clf.classes, "decision-values");
  for (std::size_t i = 0; i < features.rows; ++i) {
    double* dst = out.row(i);
    for (std::size_t k = 0; k < clf.classes; ++k) {
      dst[k] = kern::dot(clf.class_weights(k), features.row(i), clf.dims) + clf.bias[k];
    }
  }
  return out;
}

std::vector<std::uint32_t> predict(const TrainedClassifier& clf,
                                   const FeatureMatrix& features) {
  const FeatureMatrix dec = decision_values(clf, features);
  std::vector<std::uint32_t> out(features.rows);
  for (std::size_t i = 0; i < dec.rows; ++i) {
    const double* row = dec.row(i);
    std::size_t best = 0;
    for (std::size_t k = 1; k < clf.classes; ++k) {
      if (row[k] > row[best]) best = k;
    }
    out[i] = std::uint32_t(best);
  }
  return out;
}

void save_classifier(const TrainedClassifier& clf, const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["classes"] = clf.classes;
  j["dims"] = clf.dims;
  j["c_param"] = clf.c_param;
  j["loss"] = clf.loss == SvmLoss::l1_hinge ? "l1_hinge" : "l2_hinge";
  j["tolerance"] = clf.tolerance;
  j["iterations_used"] = clf.iterations_used;
  j["converged"] = std::vector<int>(clf.converged.begin(), clf.converged.end());
  j["weights"] = io::base64_encode(
      io::pack_fmat_f64(clf.weights, clf.classes, clf.dims, "weights"));
  j["bias"] = io::base64_encode(io::pack_fmat_f64(clf.bias, 1, clf.classes, "bias"));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed for " + path.string());
}

TrainedClassifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt classifier file " + path.string() + ": " + e.what());
  }
  const int version = j.at("version").get<int>();
  if (version != 1) {
    throw Error("unsupported version " + std::to_string(version) + " in " + path.string());
  }
  TrainedClassifier clf;
  clf.classes = j.at("classes").get<std::size_t>();
  clf.dims = j.at("dims").get<std::size_t>();
  clf.c_param = j.at("c_param").get<double>();
  clf.loss = j.at("loss") == "l2_hinge" ? SvmLoss::l2_hinge : SvmLoss::l1_hinge;
  clf.tolerance = j.at("tolerance").get<double>();
  clf.iterations_used = j.at("iterations_used").get<std::vector<std::size_t>>();
  for (int v : j.at("converged").get<std::vector<int>>()) clf.converged.push_back(v != 0);
  clf.weights = io::unpack_fmat(io::base64_decode(j.at("weights").get<std::string>())).values;
  clf.bias = io::unpack_fmat(io::base64_decode(j.at("bias").get<std::string>())).values;
  if (clf.weights.size() != clf.classes * clf.dims || clf.bias.size() != clf.classes) {
    throw Error("corrupt classifier payload in " + path.string());
  }
  return clf;
}

}  // namespace featstress
