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

#include "csreject/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace csreject {
namespace {

std::size_t argmax_index(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Tuning over the sorted, de-duplicated candidates; `fallback` is only
// evaluated for reporting.
template <typename RiskAt>
TuningResult tune(std::span<const double> candidates, double fallback, const RiskAt& risk_at) {
  std::vector<double> values(candidates.begin(), candidates.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  TuningResult result;
  result.default_risk = risk_at(fallback);
  bool first = true;
  for (double v : values) {
    const double r = v == fallback ? result.default_risk : risk_at(v);
    if (first || r < result.risk) {
      result.risk = r;
      result.value = v;
      first = false;
    }
  }
  return result;
}

void check_candidates(std::span<const double> candidates, bool allow_zero) {
  if (candidates.empty()) throw std::invalid_argument("tuning: empty candidate list");
  for (double v : candidates) {
    if (allow_zero ? !(v >= 0.0) : !(v > 0.0)) {
      throw std::invalid_argument("tuning: invalid candidate " + std::to_string(v));
    }
  }
}

}  // namespace

std::vector<double> softmax(std::span<const double> g, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax: temperature must be > 0");
  std::vector<double> p(g.size());
  if (g.empty()) return p;
  const double top = *std::max_element(g.begin(), g.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    p[i] = std::exp((g[i] - top) / temperature);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double sce_loss_grad(std::span<const double> g, Label y, std::span<double> grad) {
  if (g.size() != static_cast<std::size_t>(y.num_classes()) || grad.size() != g.size()) {
    throw std::invalid_argument("sce_loss_grad: shape mismatch");
  }
  const double top = *std::max_element(g.begin(), g.end());
  double sum = 0.0;
  for (double v : g) sum += std::exp(v - top);
  const double log_z = top + std::log(sum);
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] = std::exp(g[i] - log_z);
  grad[y.index()] -= 1.0;
  return log_z - g[y.index()];
}

Decision sce_decide(std::span<const double> g, double temperature, RejectionCost cost) {
  const auto p = softmax(g, temperature);
  const std::size_t best = argmax_index(p);
  if (p[best] <= 1.0 - cost.value()) return Decision::reject(RejectReason::kDistance);
  return Decision::predict(Label(static_cast<int>(best) + 1, static_cast<int>(g.size())));
}

std::vector<double> default_candidates() {
  std::vector<double> out;
  for (int i = 0; i < 20; ++i) out.push_back(std::pow(10.0, -3.0 + 3.0 * i / 19.0));
  out.back() = 1.0;
  for (int v = 2; v <= 10; ++v) out.push_back(static_cast<double>(v));
  return out;
}

std::vector<double> default_delta_candidates() {
  std::vector<double> out{0.0};
  const auto grid = default_candidates();
  out.insert(out.end(), grid.begin(), grid.end());
  return out;
}

TuningResult tune_temperature(const Model& model, const Dataset& val, RejectionCost cost,
                              std::span<const double> candidates) {
  if (val.empty()) throw std::invalid_argument("tune_temperature: empty validation set");
  check_candidates(candidates, false);
  std::vector<ScoreVector> scores;
  scores.reserve(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) scores.push_back(forward(model, val.features(i)));
  auto risk_at = [&](double t) {
    double total = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      total += zero_one_c_loss(sce_decide(scores[i], t, cost), val.label(i), cost);
    }
    return total / static_cast<double>(val.size());
  };
  return tune(candidates, 1.0, risk_at);
}

double defer_loss_grad(std::span<const double> g, Label y, RejectionCost cost,
                       std::span<double> grad, bool printed_form) {
  const std::size_t k = static_cast<std::size_t>(y.num_classes());
  if (g.size() != k + 1 || grad.size() != g.size()) {
    throw std::invalid_argument("defer_loss_grad: expected K + 1 scores");
  }
  const double w = 1.0 - cost.value();
  const double top = *std::max_element(g.begin(), g.end());
  double sum = 0.0;
  for (double v : g) sum += std::exp(v - top);
  const double log_z = top + std::log(sum);
  const double loss = (log_z - g[y.index()]) + w * (log_z - g[k]);
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] = (1.0 + w) * std::exp(g[i] - log_z);
  grad[y.index()] -= 1.0;
  grad[k] -= w;
  if (printed_form) {
    for (auto& v : grad) v = -v;
    return -loss;
  }
  return loss;
}

Decision defer_decide(std::span<const double> g) {
  if (g.size() < 3) throw std::invalid_argument("defer_decide: expected K + 1 >= 3 scores");
  const std::size_t k = g.size() - 1;
  const std::size_t best = argmax_index(g.first(k));
  if (g[k] > g[best]) return Decision::reject(RejectReason::kDistance);
  return Decision::predict(Label(static_cast<int>(best) + 1, static_cast<int>(k)));
}

std::vector<std::vector<double>> angle_vertices(int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("angle_vertices: K must be >= 2");
  const auto k = static_cast<double>(num_classes);
  const std::size_t dim = static_cast<std::size_t>(num_classes - 1);
  std::vector<std::vector<double>> vertices;
  vertices.emplace_back(dim, 1.0 / std::sqrt(k - 1.0));
  const double shift = -(1.0 + std::sqrt(k)) / std::pow(k - 1.0, 1.5);
  const double spike = std::sqrt(k / (k - 1.0));
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> v(dim, shift);
    v[j] += spike;
    vertices.push_back(std::move(v));
  }
  return vertices;
}

double angle_slope_a1(RejectionCost cost, int num_classes) {
  const double c = cost.value();
  const auto k = static_cast<double>(num_classes);
  return (k - 1.0 - c) / (k * c - c);
}

double angle_slope_a2(RejectionCost cost, int num_classes) {
  const double c = cost.value();
  const auto k = static_cast<double>(num_classes);
  return (k - 1.0) * (1.0 - c) / c;
}

AngleConfig::AngleConfig(int k, double slope, double delta)
    : num_classes(k), bend_slope(slope), threshold(delta), vertices(angle_vertices(k)) {
  if (!(slope > 0.0)) throw std::invalid_argument("AngleConfig: bend slope must be > 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("AngleConfig: threshold must be >= 0");
}

AngleConfig AngleConfig::for_cost(RejectionCost cost, int k, bool use_a2) {
  return AngleConfig(k, use_a2 ? angle_slope_a2(cost, k) : angle_slope_a1(cost, k));
}

BentHinge bent_hinge(double u, double a) {
  if (u < 0.0) return {1.0 - a * u, -a};
  if (u < 1.0) return {1.0 - u, -1.0};
  return {0.0, 0.0};
}

double angle_loss_grad(std::span<const double> g, Label y, const AngleConfig& config,
                       std::span<double> grad) {
  const std::size_t dim = static_cast<std::size_t>(config.num_classes - 1);
  if (g.size() != dim || grad.size() != dim || y.num_classes() != config.num_classes) {
    throw std::invalid_argument("angle_loss_grad: shape mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t j = 0; j < config.vertices.size(); ++j) {
    if (j == y.index()) continue;
    const auto& vertex = config.vertices[j];
    double proj = 0.0;
    for (std::size_t i = 0; i < dim; ++i) proj += vertex[i] * g[i];
    const BentHinge b = bent_hinge(-proj, config.bend_slope);
    loss += b.value;
    for (std::size_t i = 0; i < dim; ++i) grad[i] -= b.derivative * vertex[i];
  }
  return loss;
}

double soft_threshold(double v, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("soft_threshold: delta must be >= 0");
  const double mag = std::max(std::abs(v) - delta, 0.0);
  return v > 0.0 ? mag : (v < 0.0 ? -mag : 0.0);
}

Decision angle_decide(std::span<const double> g, const AngleConfig& config) {
  const std::size_t dim = static_cast<std::size_t>(config.num_classes - 1);
  if (g.size() != dim) throw std::invalid_argument("angle_decide: expected K - 1 scores");
  std::vector<double> proj(config.vertices.size(), 0.0);
  bool all_zero = true;
  for (std::size_t j = 0; j < proj.size(); ++j) {
    for (std::size_t i = 0; i < dim; ++i) proj[j] += config.vertices[j][i] * g[i];
    if (soft_threshold(proj[j], config.threshold) != 0.0) all_zero = false;
  }
  if (all_zero) return Decision::reject(RejectReason::kDistance);
  return Decision::predict(Label(static_cast<int>(argmax_index(proj)) + 1, config.num_classes));
}

TuningResult tune_delta(const Model& model, const Dataset& val, RejectionCost cost,
                        const AngleConfig& config, std::span<const double> candidates) {
  if (val.empty()) throw std::invalid_argument("tune_delta: empty validation set");
  check_candidates(candidates, true);
  std::vector<ScoreVector> scores;
  scores.reserve(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) scores.push_back(forward(model, val.features(i)));
  AngleConfig probe = config;
  auto risk_at = [&](double delta) {
    probe.threshold = delta;
    double total = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      total += zero_one_c_loss(angle_decide(scores[i], probe), val.label(i), cost);
    }
    return total / static_cast<double>(val.size());
  };
  return tune(candidates, 0.0, risk_at);
}

}  // namespace csreject
