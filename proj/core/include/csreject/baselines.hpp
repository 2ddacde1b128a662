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

// Comparison methods: softmax cross-entropy with temperature scaling (SCE),
// the augmented rejection-class loss (DEFER) and the angle-based bent-hinge
// method (ANGLE).

#ifndef CSREJECT_BASELINES_HPP_
#define CSREJECT_BASELINES_HPP_

#include <span>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/models.hpp"
#include "csreject/surrogate.hpp"

namespace csreject {

// --- SCE ---------------------------------------------------------------------

/// exp(g_i / T) / sum_j exp(g_j / T), max-shifted.
std::vector<double> softmax(std::span<const double> g, double temperature = 1.0);

/// -log softmax_y(g); gradient softmax(g) - onehot(y) written to `grad`.
double sce_loss_grad(std::span<const double> g, Label y, std::span<double> grad);

/// Confidence plug-in of Chow's rule: Reject(Distance) when the largest
/// tempered probability is <= 1 - c.
Decision sce_decide(std::span<const double> g, double temperature, RejectionCost cost);

/// 20 log-spaced values on [1e-3, 1] followed by the integers 2..10.
std::vector<double> default_candidates();

/// default_candidates() preceded by 0, the untuned ANGLE threshold.
std::vector<double> default_delta_candidates();

struct TuningResult {
  double value = 0.0;
  double risk = 0.0;          // validation 0-1-c risk at `value`
  double default_risk = 0.0;  // validation 0-1-c risk at the untuned default
};

/// Candidate with the lowest validation 0-1-c risk; ties go to the smallest.
/// default_risk reports the risk at T = 1.
TuningResult tune_temperature(const Model& model, const Dataset& val, RejectionCost cost,
                              std::span<const double> candidates);

// --- DEFER -------------------------------------------------------------------

/// -log p_y - (1 - c) log p_{K+1}, p = softmax(g). With `printed_form` the
/// un-negated expression is returned instead (for comparison only; it is not
/// a sensible minimization objective).
double defer_loss_grad(std::span<const double> g, Label y, RejectionCost cost,
                       std::span<double> grad, bool printed_form = false);

/// Reject(Distance) if the rejection score strictly exceeds every class score.
Decision defer_decide(std::span<const double> g);

// --- ANGLE -------------------------------------------------------------------

/// K unit vectors in R^{K-1} forming a regular simplex centred at the origin.
std::vector<std::vector<double>> angle_vertices(int num_classes);

/// Bend slope choices for rejection cost c and K classes.
double angle_slope_a1(RejectionCost cost, int num_classes);
double angle_slope_a2(RejectionCost cost, int num_classes);

struct AngleConfig {
  AngleConfig(int num_classes, double bend_slope, double threshold = 0.0);
  /// a = a1 (default) or a2.
  static AngleConfig for_cost(RejectionCost cost, int num_classes, bool use_a2 = false);

  int num_classes;
  double bend_slope;
  double threshold;
  std::vector<std::vector<double>> vertices;
};

struct BentHinge {
  double value;
  double derivative;
};

/// 1 - a u for u < 0, 1 - u on [0, 1], 0 above. Kinks take the right-hand
/// piece's slope.
BentHinge bent_hinge(double u, double a);

/// sum_{y' != y} bent_hinge(-<vertex_{y'}, g>); gradient written to `grad`.
double angle_loss_grad(std::span<const double> g, Label y, const AngleConfig& config,
                       std::span<double> grad);

/// sign(v) * max(|v| - delta, 0).
double soft_threshold(double v, double delta);

/// Reject(Distance) if every soft-thresholded projection vanishes, else the
/// class with the largest projection.
Decision angle_decide(std::span<const double> g, const AngleConfig& config);

/// Threshold with the lowest validation 0-1-c risk; ties go to the smallest.
/// default_risk reports the risk at delta = 0.
TuningResult tune_delta(const Model& model, const Dataset& val, RejectionCost cost,
                        const AngleConfig& config, std::span<const double> candidates);

}  // namespace csreject

#endif  // CSREJECT_BASELINES_HPP_
