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

// The cost-sensitive one-vs-rest surrogate, its gradient and empirical risk,
// and the ensemble decision rule with distance and ambiguity rejection.

#ifndef CSREJECT_SURROGATE_HPP_
#define CSREJECT_SURROGATE_HPP_

#include <functional>
#include <span>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/losses.hpp"
#include "csreject/posterior.hpp"

namespace csreject {

/// Scores g_1(x), ..., g_K(x).
using ScoreVector = std::vector<double>;
using ScoreFn = std::function<ScoreVector(std::span<const double>)>;

/// c * phi(g_y) + (1 - c) * sum_{y' != y} phi(-g_{y'}).
/// With `training` set the exponential loss saturates (see phi_train_eval).
double cs_surrogate_loss(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                         Label y, bool training = false);

/// Gradient with respect to g: c * phi'(g_y) at y, -(1 - c) * phi'(-g_{y'})
/// elsewhere.
ScoreVector cs_surrogate_grad(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                              Label y, bool training = false);

/// Loss value and gradient in one pass; `grad` must have g.size() entries.
double cs_surrogate_loss_grad(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                              Label y, std::span<double> grad, bool training = false);

/// Mean surrogate loss over `data`. Throws on an empty dataset.
double empirical_risk(MarginLoss loss, RejectionCost cost, const ScoreFn& score_fn,
                      const Dataset& data);

/// Reject(Distance) when max_y g_y <= 0, Reject(Ambiguity) when two or more
/// scores are positive, otherwise Predict(argmax).
Decision decide(std::span<const double> g);

/// sum_y eta_y * L(g; y).
double pointwise_conditional_risk(MarginLoss loss, RejectionCost cost, std::span<const double> g,
                                  const PosteriorSimplex& eta);

/// The same quantity as K independent weighted binary risks:
/// sum_y [eta_y c phi(g_y) + (1 - eta_y)(1 - c) phi(-g_y)].
double pointwise_conditional_risk_decomposed(MarginLoss loss, RejectionCost cost,
                                             std::span<const double> g,
                                             const PosteriorSimplex& eta);

/// Deterministic blocked pairwise sum.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace csreject

#endif  // CSREJECT_SURROGATE_HPP_
