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

// Binary margin losses phi(z) with analytic derivatives.

#ifndef CSREJECT_LOSSES_HPP_
#define CSREJECT_LOSSES_HPP_

#include <array>
#include <functional>
#include <string_view>

namespace csreject {

enum class MarginLoss {
  kSquared,
  kSquaredHinge,
  kExponential,
  kLogistic,
  kHinge,
  kSavage,
  kTangent,
  kRamp,
  kSigmoid,
};

inline constexpr std::array<MarginLoss, 9> kAllMarginLosses = {
    MarginLoss::kSquared, MarginLoss::kSquaredHinge, MarginLoss::kExponential,
    MarginLoss::kLogistic, MarginLoss::kHinge,       MarginLoss::kSavage,
    MarginLoss::kTangent, MarginLoss::kRamp,         MarginLoss::kSigmoid,
};

struct MarginLossSpec {
  MarginLoss loss;
  std::string_view name;
  bool convex;
  bool symmetric;
  bool calibrated;
};

const MarginLossSpec& spec(MarginLoss loss) noexcept;
std::string_view to_string(MarginLoss loss) noexcept;
/// Throws std::invalid_argument on an unknown name.
MarginLoss parse_margin_loss(std::string_view name);

double phi_eval(MarginLoss loss, double z) noexcept;

/// Derivative of phi_eval. At kinks: hinge and squared hinge return 0 at
/// z = 1, ramp returns -0.5 at z = -1 and 0 at z = 1.
double phi_grad(MarginLoss loss, double z) noexcept;

/// Variants used inside training loops. Identical to phi_eval / phi_grad
/// except that the exponential loss saturates at exp(30) (zero slope there).
double phi_train_eval(MarginLoss loss, double z) noexcept;
double phi_train_grad(MarginLoss loss, double z) noexcept;

/// eta1 * phi(v) + (1 - eta1) * phi(-v).
double binary_conditional_risk(MarginLoss loss, double eta1, double v);

/// w_pos * phi(v) + w_neg * phi(-v).
double weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg, double v) noexcept;

struct MinimizerOptions {
  double bound = 20.0;
  double grid_step = 1e-3;
};

/// Minimizer of v -> w_pos * phi(v) + w_neg * phi(-v) over [-bound, bound]:
/// a dense grid scan followed by golden-section refinement around the best
/// grid point. Equal weights make the objective even, and 0 is returned.
/// Throws std::invalid_argument when both weights are zero or either is
/// negative.
double argmin_weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg,
                                        const MinimizerOptions& options = {});

/// Same search for an arbitrary margin loss.
double argmin_weighted_conditional_risk(const std::function<double(double)>& phi, double w_pos,
                                        double w_neg, const MinimizerOptions& options = {});

/// Minimum value of the weighted conditional risk. Closed forms for squared
/// and hinge, otherwise the objective at argmin_weighted_conditional_risk.
double min_weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg,
                                     const MinimizerOptions& options = {});

}  // namespace csreject

#endif  // CSREJECT_LOSSES_HPP_
