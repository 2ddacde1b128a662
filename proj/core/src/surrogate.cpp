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

#include "csreject/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace csreject {
namespace {

double phi_value(MarginLoss loss, double z, bool training) {
  return training ? phi_train_eval(loss, z) : phi_eval(loss, z);
}

double phi_slope(MarginLoss loss, double z, bool training) {
  return training ? phi_train_grad(loss, z) : phi_grad(loss, z);
}

void check_scores(std::span<const double> g, Label y) {
  if (g.size() != static_cast<std::size_t>(y.num_classes())) {
    throw std::invalid_argument("score vector has " + std::to_string(g.size()) +
                                " entries but label expects " +
                                std::to_string(y.num_classes()));
  }
}

}  // namespace

PosteriorSimplex::PosteriorSimplex(std::vector<double> eta) : eta_(std::move(eta)) {
  if (eta_.empty()) throw std::invalid_argument("PosteriorSimplex: empty");
  double sum = 0.0;
  for (double v : eta_) {
    if (!(v >= 0.0)) throw std::invalid_argument("PosteriorSimplex: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("PosteriorSimplex: entries sum to " + std::to_string(sum));
  }
}

double PosteriorSimplex::max() const noexcept {
  return *std::max_element(eta_.begin(), eta_.end());
}

std::size_t PosteriorSimplex::argmax() const noexcept {
  return static_cast<std::size_t>(std::max_element(eta_.begin(), eta_.end()) - eta_.begin());
}

double cs_surrogate_loss(MarginLoss loss, RejectionCost cost, std::span<const double> g, Label y,
                         bool training) {
  check_scores(g, y);
  const double c = cost.value();
  double rest = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k != y.index()) rest += phi_value(loss, -g[k], training);
  }
  return c * phi_value(loss, g[y.index()], training) + (1.0 - c) * rest;
}

double cs_surrogate_loss_grad(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                              Label y, std::span<double> grad, bool training) {
  check_scores(g, y);
  if (grad.size() != g.size()) throw std::invalid_argument("gradient buffer size mismatch");
  const double c = cost.value();
  double value = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == y.index()) {
      value += c * phi_value(loss, g[k], training);
      grad[k] = c * phi_slope(loss, g[k], training);
    } else {
      value += (1.0 - c) * phi_value(loss, -g[k], training);
      grad[k] = -(1.0 - c) * phi_slope(loss, -g[k], training);
    }
  }
  return value;
}

ScoreVector cs_surrogate_grad(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                              Label y, bool training) {
  ScoreVector grad(g.size());
  cs_surrogate_loss_grad(loss, cost, g, y, grad, training);
  return grad;
}

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double empirical_risk(MarginLoss loss, RejectionCost cost, const ScoreFn& score_fn,
                      const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("empirical_risk: empty dataset");
  std::vector<double> losses(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ScoreVector g = score_fn(data.features(i));
    losses[i] = cs_surrogate_loss(loss, cost, g, data.label(i));
  }
  return pairwise_sum(losses) / static_cast<double>(data.size());
}

Decision decide(std::span<const double> g) {
  if (g.empty()) throw std::invalid_argument("decide: empty score vector");
  std::size_t best = 0;
  int positives = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] > g[best]) best = k;
    if (g[k] > 0.0) ++positives;
  }
  if (g[best] <= 0.0) return Decision::reject(RejectReason::kDistance);
  if (positives >= 2) return Decision::reject(RejectReason::kAmbiguity);
  return Decision::predict(Label(static_cast<int>(best) + 1, static_cast<int>(g.size())));
}

double pointwise_conditional_risk(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                                  const PosteriorSimplex& eta) {
  if (eta.num_classes() != g.size()) {
    throw std::invalid_argument("pointwise_conditional_risk: dimension mismatch");
  }
  const int k = static_cast<int>(g.size());
  double total = 0.0;
  for (int y = 1; y <= k; ++y) {
    total += eta[static_cast<std::size_t>(y - 1)] * cs_surrogate_loss(loss, cost, g, Label(y, k));
  }
  return total;
}

double pointwise_conditional_risk_decomposed(MarginLoss loss, RejectionCost cost,
                                             std::span<const double> g,
                                             const PosteriorSimplex& eta) {
  if (eta.num_classes() != g.size()) {
    throw std::invalid_argument("pointwise_conditional_risk_decomposed: dimension mismatch");
  }
  const double c = cost.value();
  double total = 0.0;
  for (std::size_t y = 0; y < g.size(); ++y) {
    total += eta[y] * c * phi_eval(loss, g[y]) + (1.0 - eta[y]) * (1.0 - c) * phi_eval(loss, -g[y]);
  }
  return total;
}

}  // namespace csreject
