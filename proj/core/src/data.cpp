/* Copyright 2026 The csreject Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "csreject/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace csreject {
namespace {

// Lower Cholesky factor, or empty if the matrix is not positive definite.
std::vector<double> cholesky(const std::vector<std::vector<double>>& a) {
  const std::size_t d = a.size();
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        if (!(s > 0.0)) return {};
        l[i * d + i] = std::sqrt(s);
      } else {
        l[i * d + j] = s / l[j * d + j];
      }
    }
  }
  return l;
}

std::vector<std::vector<double>> identity(std::size_t d, double diag = 1.0) {
  std::vector<std::vector<double>> m(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = diag;
  return m;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void SyntheticSpec::validate() const {
  const auto k = static_cast<std::size_t>(num_classes);
  if (num_classes < 1) throw std::invalid_argument("SyntheticSpec: num_classes must be >= 1");
  if (means.size() != k || covariances.size() != k || priors.size() != k) {
    throw std::invalid_argument("SyntheticSpec: per-class arrays must have K entries");
  }
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0)) throw std::invalid_argument("SyntheticSpec: negative prior");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SyntheticSpec: priors must sum to 1");
  for (std::size_t y = 0; y < k; ++y) {
    if (means[y].size() != dim) throw std::invalid_argument("SyntheticSpec: mean has wrong length");
    const auto& cov = covariances[y];
    if (cov.size() != dim) throw std::invalid_argument("SyntheticSpec: covariance has wrong shape");
    for (std::size_t i = 0; i < dim; ++i) {
      if (cov[i].size() != dim) {
        throw std::invalid_argument("SyntheticSpec: covariance has wrong shape");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (std::abs(cov[i][j] - cov[j][i]) > 1e-12) {
          throw std::invalid_argument("SyntheticSpec: covariance is not symmetric");
        }
      }
    }
    if (cholesky(cov).empty()) {
      throw std::invalid_argument("SyntheticSpec: covariance is not positive definite");
    }
  }
}

SyntheticSpec twonorm_spec(double prior_pos) {
  constexpr std::size_t kDim = 20;
  const double a = 2.0 / std::sqrt(static_cast<double>(kDim));
  SyntheticSpec spec;
  spec.kind = SyntheticSpec::Kind::kTwonorm;
  spec.num_classes = 2;
  spec.dim = kDim;
  spec.means = {std::vector<double>(kDim, a), std::vector<double>(kDim, -a)};
  spec.covariances = {identity(kDim), identity(kDim)};
  spec.priors = {prior_pos, 1.0 - prior_pos};
  return spec;
}

SyntheticSpec planar_mixture_spec(int num_classes, double radius, double stddev) {
  SyntheticSpec spec;
  spec.num_classes = num_classes;
  spec.dim = 2;
  const double pi = std::acos(-1.0);
  for (int y = 0; y < num_classes; ++y) {
    const double angle = pi / 2.0 + 2.0 * pi * y / num_classes;
    spec.means.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    spec.covariances.push_back(identity(2, stddev * stddev));
    spec.priors.push_back(1.0 / num_classes);
  }
  return spec;
}

PosteriorOracle::PosteriorOracle(SyntheticSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t d = spec_.dim;
  for (int y = 0; y < spec_.num_classes; ++y) {
    auto l = cholesky(spec_.covariances[static_cast<std::size_t>(y)]);
    double log_det = 0.0;
    for (std::size_t i = 0; i < d; ++i) log_det += 2.0 * std::log(l[i * d + i]);
    const double prior = spec_.priors[static_cast<std::size_t>(y)];
    log_norm_.push_back((prior > 0.0 ? std::log(prior) : -INFINITY) - 0.5 * log_det);
    cholesky_.push_back(std::move(l));
  }
}

PosteriorSimplex PosteriorOracle::operator()(std::span<const double> x) const {
  const std::size_t d = spec_.dim;
  if (x.size() != d) throw std::invalid_argument("PosteriorOracle: wrong feature length");
  const auto k = static_cast<std::size_t>(spec_.num_classes);
  std::vector<double> logp(k);
  std::vector<double> z(d);
  for (std::size_t y = 0; y < k; ++y) {
    const auto& l = cholesky_[y];
    const auto& mu = spec_.means[y];
    double quad = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = x[i] - mu[i];
      for (std::size_t j = 0; j < i; ++j) s -= l[i * d + j] * z[j];
      z[i] = s / l[i * d + i];
      quad += z[i] * z[i];
    }
    logp[y] = log_norm_[y] - 0.5 * quad;
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (auto& v : logp) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : logp) v /= sum;
  return PosteriorSimplex(std::move(logp));
}

GeneratedData gen_gauss_mixture(const SyntheticSpec& spec, std::size_t n, Rng& rng) {
  PosteriorOracle oracle(spec);
  const std::size_t d = spec.dim;
  std::vector<std::vector<double>> factors;
  for (const auto& cov : spec.covariances) factors.push_back(cholesky(cov));
  std::discrete_distribution<int> pick_class(spec.priors.begin(), spec.priors.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data(d, spec.num_classes);
  std::vector<double> z(d), x(d);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = pick_class(rng);
    for (auto& v : z) v = normal(rng);
    const auto& l = factors[static_cast<std::size_t>(y)];
    const auto& mu = spec.means[static_cast<std::size_t>(y)];
    for (std::size_t r = 0; r < d; ++r) {
      double s = mu[r];
      for (std::size_t c = 0; c <= r; ++c) s += l[r * d + c] * z[c];
      x[r] = s;
    }
    data.add(x, y + 1);
  }
  return {std::move(data), std::move(oracle)};
}

GeneratedData gen_twonorm(std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("gen_twonorm: n must be >= 2");
  return gen_gauss_mixture(twonorm_spec(), n, rng);
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 bool has_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path.string());

  std::string line;
  std::size_t row = 0;
  std::size_t label_index = 0;
  std::size_t n_fields = 0;

  if (has_header) {
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: missing header");
    ++row;
    const auto names = split_fields(line);
    n_fields = names.size();
    if (const auto* name = std::get_if<std::string>(&label_column.column)) {
      const auto it = std::find(names.begin(), names.end(), *name);
      if (it == names.end()) throw std::runtime_error("load_csv: no column named '" + *name + "'");
      label_index = static_cast<std::size_t>(it - names.begin());
    }
  } else if (std::holds_alternative<std::string>(label_column.column)) {
    throw std::runtime_error("load_csv: label column by name requires a header");
  }
  if (const auto* idx = std::get_if<std::size_t>(&label_column.column)) label_index = *idx;

  std::vector<double> features;
  std::vector<long long> raw_labels;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (n_fields == 0) n_fields = fields.size();
    if (fields.size() != n_fields) {
      throw std::runtime_error("load_csv: row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(n_fields));
    }
    if (label_index >= n_fields) {
      throw std::runtime_error("load_csv: label column " + std::to_string(label_index) +
                               " out of range");
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_index) {
        long long y = 0;
        if (!parse_number(fields[c], y)) {
          throw std::runtime_error("load_csv: row " + std::to_string(row) +
                                   ": label is not an integer: '" + std::string(fields[c]) + "'");
        }
        raw_labels.push_back(y);
      } else {
        double v = 0.0;
        if (!parse_number(fields[c], v) || !std::isfinite(v)) {
          throw std::runtime_error("load_csv: row " + std::to_string(row) + ", column " +
                                   std::to_string(c) + ": non-numeric feature '" +
                                   std::string(fields[c]) + "'");
        }
        features.push_back(v);
      }
    }
  }
  if (raw_labels.empty()) throw std::runtime_error("load_csv: no data rows in " + path.string());

  std::map<long long, int> remap;
  for (long long y : raw_labels) remap.emplace(y, 0);
  int next = 1;
  for (auto& [raw, mapped] : remap) mapped = next++;
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (long long y : raw_labels) labels.push_back(remap[y]);
  return Dataset(std::move(features), std::move(labels), n_fields - 1,
                 static_cast<int>(remap.size()));
}

std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions,
                           std::uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("split: no fractions");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("split: negative fraction");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split: fractions must sum to 1");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Dataset> parts;
  const auto n = static_cast<double>(data.size());
  double cumulative = 0.0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    cumulative += fractions[i];
    const std::size_t end = i + 1 == fractions.size()
                                ? data.size()
                                : static_cast<std::size_t>(std::llround(cumulative * n));
    parts.push_back(data.select(std::span(order).subspan(begin, end - begin)));
    begin = end;
  }
  return parts;
}

Dataset StandardizeTransform::apply(const Dataset& data) const {
  if (data.dim() != mean.size()) throw std::invalid_argument("standardize: dimension mismatch");
  Dataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto x = out.mutable_features(i);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - mean[j]) * scale[j];
  }
  return out;
}

std::pair<StandardizeTransform, Dataset> standardize(const Dataset& train) {
  if (train.empty()) throw std::invalid_argument("standardize: empty training set");
  const std::size_t d = train.dim();
  const auto n = static_cast<double>(train.size());
  StandardizeTransform t{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto x = train.features(i);
    for (std::size_t j = 0; j < d; ++j) t.mean[j] += x[j];
  }
  for (auto& m : t.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto x = train.features(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - t.mean[j]) * (x[j] - t.mean[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double v = var[j] / n;
    t.scale[j] = v < 1e-12 ? 0.0 : 1.0 / std::sqrt(v);
  }
  Dataset transformed = t.apply(train);
  return {std::move(t), std::move(transformed)};
}

}  // namespace csreject
