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

#include "featstress/stressor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "featstress/error.hpp"
#include "featstress/io_util.hpp"
#include "featstress/kernels.hpp"

#include "json.hpp"

namespace featstress {

namespace {
constexpr std::size_t kSoftMaxLevels = 30;
}

const char* kind_name(StressorKind k) {
  switch (k) {
    case StressorKind::identity: return "identity";
    case StressorKind::dr1: return "dr1";
    case StressorKind::dr2: return "dr2";
    case StressorKind::q1: return "q1";
    case StressorKind::q2: return "q2";
    case StressorKind::fc: return "fc";
  }
  return "?";
}

std::optional<StressorKind> kind_from_name(const std::string& name) {
  for (StressorKind k : {StressorKind::identity, StressorKind::dr1, StressorKind::dr2,
                         StressorKind::q1, StressorKind::q2, StressorKind::fc}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

DimensionSchedule schedule(std::size_t n) {
  if (n < 20) throw Error("schedule: n must be >= 20 (the last step would hit 0 dims)");
  if (n > (std::numeric_limits<std::size_t>::max() / 21)) throw Error("schedule: n too large");
  DimensionSchedule s;
  s.n = n;
  s.steps.reserve(20);
  for (std::size_t i = 1; i <= 20; ++i) {
    s.steps.push_back(n * (21 - i) / 20);
  }
  return s;
}

std::size_t StressorModel::output_dims() const {
  switch (kind) {
    case StressorKind::identity: return input_dims;
    case StressorKind::dr1: return kept_dims.size();
    case StressorKind::dr2:
      return dr2_mode == Dr2Mode::projection ? p : kept_dims.size();
    case StressorKind::q1:
    case StressorKind::q2: return input_dims;
    case StressorKind::fc: return p;
  }
  return 0;
}

void StressorModel::validate() const {
  if (input_dims == 0) throw Error("stressor model: input_dims must be >= 1");
  auto check_dicts = [&](std::size_t expect) {
    if (dictionaries.size() != expect) throw Error("stressor model: dictionary count mismatch");
    if (q_min.size() != expect || q_step.size() != expect) {
      throw Error("stressor model: quantizer interval arrays mismatch");
    }
    for (const auto& dict : dictionaries) {
      if (dict.empty()) throw Error("stressor model: empty dictionary");
      if (dict.size() != 1 && dict.size() != h) {
        throw Error("stressor model: dictionary size must be h (or 1 when degenerate)");
      }
      for (std::size_t i = 0; i + 1 < dict.size(); ++i) {
        if (!(dict[i] < dict[i + 1])) {
          throw Error("stressor model: centroids must be strictly increasing");
        }
      }
    }
  };
  switch (kind) {
    case StressorKind::identity:
      break;
    case StressorKind::dr1: {
      if (kept_dims.empty() || kept_dims.size() != p) {
        throw Error("stressor model: dr1 kept_dims must have p entries");
      }
      for (std::size_t i = 0; i < kept_dims.size(); ++i) {
        if (kept_dims[i] >= input_dims) throw Error("stressor model: kept dim out of range");
        if (i > 0 && kept_dims[i - 1] >= kept_dims[i]) {
          throw Error("stressor model: kept_dims must be strictly increasing");
        }
      }
      break;
    }
    case StressorKind::dr2:
      if (dr2_mode == Dr2Mode::projection) {
        if (!basis || p == 0 || p > basis->n_components) {
          throw Error("stressor model: dr2 projection needs a basis with p components");
        }
      } else if (kept_dims.size() != p) {
        throw Error("stressor model: dr2 coordinate mode needs p kept dims");
      }
      break;
    case StressorKind::q1:
      if (h == 0) throw Error("stressor model: q1 needs h >= 1");
      check_dicts(1);
      break;
    case StressorKind::q2:
      if (h == 0) throw Error("stressor model: q2 needs h >= 1");
      check_dicts(input_dims);
      break;
    case StressorKind::fc:
      if (!basis || p == 0 || p > basis->n_components) {
        throw Error("stressor model: fc needs a basis with p components");
      }
      if (h == 0) throw Error("stressor model: fc needs h >= 1");
      check_dicts(p);
      break;
  }
}

std::uint64_t fingerprint_matrix(const FeatureMatrix& m) {
  std::uint64_t h = fnv1a64("fmat");
  h = fnv1a64(&m.rows, sizeof m.rows, h);
  h = fnv1a64(&m.dims, sizeof m.dims, h);
  return fnv1a64(m.values.data(), m.values.size() * sizeof(double), h);
}

StressorModel fit_identity(std::size_t n) {
  if (n == 0) throw Error("fit_identity: n must be >= 1");
  StressorModel model;
  model.kind = StressorKind::identity;
  model.input_dims = n;
  std::uint64_t fp = fnv1a64("identity");
  model.fit_fingerprint = fnv1a64(&n, sizeof n, fp);
  return model;
}

StressorModel fit_dr1(std::size_t n, std::size_t p, RngStream& rng) {
  if (n == 0 || p == 0 || p > n) throw Error("fit_dr1: need 1 <= p <= n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  idx.resize(p);
  std::sort(idx.begin(), idx.end());

  StressorModel model;
  model.kind = StressorKind::dr1;
  model.input_dims = n;
  model.p = p;
  model.kept_dims = std::move(idx);
  std::uint64_t fp = fnv1a64("dr1");
  fp = fnv1a64(&n, sizeof n, fp);
  fp = fnv1a64(&p, sizeof p, fp);
  model.fit_fingerprint =
      fnv1a64(model.kept_dims.data(), model.kept_dims.size() * sizeof(std::size_t), fp);
  return model;
}

namespace {

std::vector<std::size_t> top_variance_dims(const FeatureMatrix& train, std::size_t p) {
  const std::size_t d = train.dims;
  std::vector<double> mean(d, 0.0), sq(d, 0.0);
  for (std::size_t i = 0; i < train.rows; ++i) {
    kern::axpy(mean.data(), 1.0, train.row(i), d);
  }
  kern::scale(mean.data(), 1.0 / double(train.rows), d);
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < train.rows; ++i) {
    kern::subtract(diff.data(), train.row(i), mean.data(), d);
    for (std::size_t j = 0; j < d; ++j) sq[j] += diff[j] * diff[j];
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sq[a] > sq[b]; });
  order.resize(p);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

StressorModel fit_dr2(const FeatureMatrix& train, std::size_t p, Dr2Mode mode) {
  if (train.rows < 2) throw Error("fit_dr2: need at least 2 training rows");
  StressorModel model;
  model.kind = StressorKind::dr2;
  model.input_dims = train.dims;
  model.p = p;
  model.dr2_mode = mode;
  if (mode == Dr2Mode::projection) {
    EigenBasis basis = fit_eigenbasis(train);
    if (p == 0 || p > basis.n_components) {
      throw Error("fit_dr2: p must be in [1, " + std::to_string(basis.n_components) + "]");
    }
    model.basis = std::move(basis);
  } else {
    if (p == 0 || p > train.dims) throw Error("fit_dr2: p must be in [1, dims]");
    model.kept_dims = top_variance_dims(train, p);
  }
  std::uint64_t fp = fnv1a64(mode == Dr2Mode::projection ? "dr2" : "dr2-coord");
  fp = fnv1a64(&p, sizeof p, fp);
  std::uint64_t mfp = fingerprint_matrix(train);
  model.fit_fingerprint = fnv1a64(&mfp, sizeof mfp, fp);
  return model;
}

namespace {

// H = {(min + st/2) + st*i | 0 <= i < h} with st = (max-min)/h.
// A degenerate range (max == min) collapses to a singleton at that value.
void build_dictionary(double min_v, double max_v, std::size_t h,
                      std::vector<double>& dict, double& out_min, double& out_step) {
  out_min = min_v;
  if (max_v == min_v) {
    dict.assign(1, min_v);
    out_step = 0.0;
    return;
  }
  const double st = (max_v - min_v) / double(h);
  dict.resize(h);
  const double base = min_v + st / 2.0;
  for (std::size_t i = 0; i < h; ++i) dict[i] = base + st * double(i);
  for (std::size_t i = 0; i + 1 < h; ++i) {
    if (!(dict[i] < dict[i + 1])) {
      throw Error("quantizer step underflows at this scale; reduce h");
    }
  }
  out_step = st;
}

void check_levels(std::size_t h, bool allow_large_h) {
  if (h == 0) throw Error("quantizer: h must be >= 1");
  if (h > kSoftMaxLevels && !allow_large_h) {
    throw Error("quantizer: h > 30 requires the large-h override");
  }
}

}  // namespace

StressorModel fit_q1(const FeatureMatrix& train, std::size_t h, bool allow_large_h) {
  check_levels(h, allow_large_h);
  train.validate();
  const auto [mn, mx] = kern::minmax(train.values.data(), train.values.size());

  StressorModel model;
  model.kind = StressorKind::q1;
  model.input_dims = train.dims;
  model.h = h;
  model.dictionaries.resize(1);
  model.q_min.resize(1);
  model.q_step.resize(1);
  build_dictionary(mn, mx, h, model.dictionaries[0], model.q_min[0], model.q_step[0]);
  std::uint64_t fp = fnv1a64("q1");
  fp = fnv1a64(&h, sizeof h, fp);
  std::uint64_t mfp = fingerprint_matrix(train);
  model.fit_fingerprint = fnv1a64(&mfp, sizeof mfp, fp);
  return model;
}

namespace {

void fit_per_dimension_dictionaries(const FeatureMatrix& train, std::size_t h,
                                    StressorModel& model) {
  const std::size_t d = train.dims;
  std::vector<double> mn(d, std::numeric_limits<double>::infinity());
  std::vector<double> mx(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < train.rows; ++i) {
    kern::minmax_update(mn.data(), mx.data(), train.row(i), d);
  }
  model.dictionaries.resize(d);
  model.q_min.resize(d);
  model.q_step.resize(d);
  for (std::size_t t = 0; t < d; ++t) {
    build_dictionary(mn[t], mx[t], h, model.dictionaries[t], model.q_min[t],
                     model.q_step[t]);
  }
}

}  // namespace

StressorModel fit_q2(const FeatureMatrix& train, std::size_t h, bool allow_large_h) {
  check_levels(h, allow_large_h);
  train.validate();

  StressorModel model;
  model.kind = StressorKind::q2;
  model.input_dims = train.dims;
  model.h = h;
  fit_per_dimension_dictionaries(train, h, model);
  std::uint64_t fp = fnv1a64("q2");
  fp = fnv1a64(&h, sizeof h, fp);
  std::uint64_t mfp = fingerprint_matrix(train);
  model.fit_fingerprint = fnv1a64(&mfp, sizeof mfp, fp);
  return model;
}

StressorModel fit_fc(const FeatureMatrix& train, std::size_t p, std::size_t h,
                     bool allow_large_h) {
  check_levels(h, allow_large_h);
  StressorModel dr2 = fit_dr2(train, p, Dr2Mode::projection);
  FeatureMatrix projected = project(*dr2.basis, train, p);

  StressorModel model;
  model.kind = StressorKind::fc;
  model.input_dims = train.dims;
  model.p = p;
  model.h = h;
  model.basis = std::move(dr2.basis);
  fit_per_dimension_dictionaries(projected, h, model);
  std::uint64_t fp = fnv1a64("fc");
  fp = fnv1a64(&p, sizeof p, fp);
  fp = fnv1a64(&h, sizeof h, fp);
  std::uint64_t mfp = fingerprint_matrix(train);
  model.fit_fingerprint = fnv1a64(&mfp, sizeof mfp, fp);
  return model;
}

std::size_t quantize_index(const std::vector<double>& dict, double min_v, double step,
                           double x) {
  const std::size_t h = dict.size();
  if (h == 1) return 0;
  // Cell guess: values in (boundary_i, boundary_{i+1}] belong to centroid i,
  // which matches the low tie-break at exact midpoints. Rounding can land
  // the guess a cell or two off, so the final pick scans a +-2 window with
  // the same comparison brute-force argmin uses.
  const double q = (x - min_v) / step;
  const double guess = std::clamp(std::ceil(q) - 1.0, 0.0, double(h - 1));
  const std::size_t g = static_cast<std::size_t>(guess);
  const std::size_t lo = g >= 2 ? g - 2 : 0;
  const std::size_t hi = std::min(g + 2, h - 1);
  std::size_t best = lo;
  double best_d = std::abs(x - dict[lo]);
  for (std::size_t j = lo + 1; j <= hi; ++j) {
    const double dj = std::abs(x - dict[j]);
    if (dj < best_d) {
      best_d = dj;
      best = j;
    }
  }
  return best;
}

namespace {

FeatureMatrix take_columns(const FeatureMatrix& m, const std::vector<std::size_t>& cols,
                           const std::string& tag) {
  FeatureMatrix out = make_matrix(m.rows, cols.size(), tag);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* src = m.row(i);
    double* dst = out.row(i);
    for (std::size_t k = 0; k < cols.size(); ++k) dst[k] = src[cols[k]];
  }
  return out;
}

void quantize_in_place(const StressorModel& model, FeatureMatrix& m) {
  const bool global = model.dictionaries.size() == 1;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* row = m.row(i);
    for (std::size_t t = 0; t < m.dims; ++t) {
      const std::size_t di = global ? 0 : t;
      const auto& dict = model.dictionaries[di];
      row[t] = dict[quantize_index(dict, model.q_min[di], model.q_step[di], row[t])];
    }
  }
}

}  // namespace

FeatureMatrix apply(const StressorModel& model, const FeatureMatrix& m) {
  model.validate();
  if (m.dims != model.input_dims) {
    throw Error("apply: matrix has " + std::to_string(m.dims) + " dims, model expects " +
                std::to_string(model.input_dims));
  }
  switch (model.kind) {
    case StressorKind::identity:
      return m;
    case StressorKind::dr1:
      return take_columns(m, model.kept_dims, m.source_tag);
    case StressorKind::dr2:
      if (model.dr2_mode == Dr2Mode::projection) {
        return project(*model.basis, m, model.p);
      }
      return take_columns(m, model.kept_dims, m.source_tag);
    case StressorKind::q1:
    case StressorKind::q2: {
      FeatureMatrix out = m;
      quantize_in_place(model, out);
      return out;
    }
    case StressorKind::fc: {
      FeatureMatrix out = project(*model.basis, m, model.p);
      quantize_in_place(model, out);
      return out;
    }
  }
  throw Error("apply: unknown stressor kind");
}

namespace {

std::string pack_doubles(const std::vector<double>& v, std::string_view tag) {
  return io::base64_encode(io::pack_fmat_f64(v, 1, v.size(), tag));
}

std::vector<double> unpack_doubles(const nlohmann::json& j, const char* key) {
  return io::unpack_fmat(io::base64_decode(j.at(key).get<std::string>())).values;
}

}  // namespace

void save_model(const StressorModel& model, const std::filesystem::path& path) {
  model.validate();
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = kind_name(model.kind);
  j["input_dims"] = model.input_dims;
  j["fit_fingerprint"] = model.fit_fingerprint;
  if (model.p > 0) j["p"] = model.p;
  if (model.h > 0) j["h"] = model.h;
  if (model.kind == StressorKind::dr2) {
    j["dr2_mode"] = model.dr2_mode == Dr2Mode::projection ? "projection" : "coordinate";
  }
  if (!model.kept_dims.empty()) {
    std::vector<double> as_double(model.kept_dims.begin(), model.kept_dims.end());
    j["kept_dims"] = pack_doubles(as_double, "kept_dims");
  }
  if (model.basis) j["basis"] = eigenbasis_to_json(*model.basis);
  if (!model.dictionaries.empty()) {
    std::vector<double> sizes, flat;
    for (const auto& dict : model.dictionaries) {
      sizes.push_back(double(dict.size()));
      flat.insert(flat.end(), dict.begin(), dict.end());
    }
    j["dict_sizes"] = pack_doubles(sizes, "dict_sizes");
    j["dict_values"] = pack_doubles(flat, "dict_values");
    j["q_min"] = pack_doubles(model.q_min, "q_min");
    j["q_step"] = pack_doubles(model.q_step, "q_step");
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed for " + path.string());
}

StressorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt model file " + path.string() + ": " + e.what());
  }
  const int version = j.at("version").get<int>();
  if (version != 1) {
    throw Error("unsupported version " + std::to_string(version) + " in " + path.string());
  }
  StressorModel model;
  const auto kind = kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown stressor kind in " + path.string());
  model.kind = *kind;
  model.input_dims = j.at("input_dims").get<std::size_t>();
  model.fit_fingerprint = j.at("fit_fingerprint").get<std::uint64_t>();
  model.p = j.value("p", std::size_t{0});
  model.h = j.value("h", std::size_t{0});
  if (j.contains("dr2_mode")) {
    model.dr2_mode = j["dr2_mode"] == "coordinate" ? Dr2Mode::coordinate_variance
                                                   : Dr2Mode::projection;
  }
  if (j.contains("kept_dims")) {
    for (double v : unpack_doubles(j, "kept_dims")) {
      model.kept_dims.push_back(std::size_t(v));
    }
  }
  if (j.contains("basis")) model.basis = eigenbasis_from_json(j["basis"]);
  if (j.contains("dict_values")) {
    const auto sizes = unpack_doubles(j, "dict_sizes");
    const auto flat = unpack_doubles(j, "dict_values");
    model.q_min = unpack_doubles(j, "q_min");
    model.q_step = unpack_doubles(j, "q_step");
    std::size_t pos = 0;
    for (double sz : sizes) {
      const auto n = std::size_t(sz);
      if (pos + n > flat.size()) throw Error("corrupt dictionary payload in " + path.string());
      model.dictionaries.emplace_back(flat.begin() + std::ptrdiff_t(pos),
                                      flat.begin() + std::ptrdiff_t(pos + n));
      pos += n;
    }
    if (pos != flat.size()) throw Error("corrupt dictionary payload in " + path.string());
  }
  model.validate();
  return model;
}

}  // namespace featstress
