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

#include "csreject/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace csreject {
namespace {

constexpr std::array<MarginLossSpec, 9> kSpecs = {{
    {MarginLoss::kSquared, "squared", true, false, true},
    {MarginLoss::kSquaredHinge, "squared_hinge", true, false, true},
    {MarginLoss::kExponential, "exponential", true, false, true},
    {MarginLoss::kLogistic, "logistic", true, false, true},
    {MarginLoss::kHinge, "hinge", true, false, true},
    {MarginLoss::kSavage, "savage", false, false, true},
    {MarginLoss::kTangent, "tangent", false, false, true},
    {MarginLoss::kRamp, "ramp", false, true, true},
    {MarginLoss::kSigmoid, "sigmoid", false, true, true},
}};

constexpr double kExpClamp = 30.0;

// 1 / (1 + exp(-t)) without overflow.
double logistic_fn(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

const MarginLossSpec& spec(MarginLoss loss) noexcept {
  return kSpecs[static_cast<std::size_t>(loss)];
}

std::string_view to_string(MarginLoss loss) noexcept { return spec(loss).name; }

MarginLoss parse_margin_loss(std::string_view name) {
  for (const auto& s : kSpecs) {
    if (s.name == name) return s.loss;
  }
  throw std::invalid_argument("unknown margin loss '" + std::string(name) + "'");
}

double phi_eval(MarginLoss loss, double z) noexcept {
  switch (loss) {
    case MarginLoss::kSquared:
      return (1.0 - z) * (1.0 - z);
    case MarginLoss::kSquaredHinge: {
      const double m = std::max(0.0, 1.0 - z);
      return m * m;
    }
    case MarginLoss::kExponential:
      return std::exp(-z);
    case MarginLoss::kLogistic:
      return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case MarginLoss::kHinge:
      return std::max(0.0, 1.0 - z);
    case MarginLoss::kSavage: {
      const double s = logistic_fn(-2.0 * z);
      return s * s;
    }
    case MarginLoss::kTangent: {
      const double t = 2.0 * std::atan(z) - 1.0;
      return t * t;
    }
    case MarginLoss::kRamp:
      return std::max(0.0, std::min(1.0, 0.5 - 0.5 * z));
    case MarginLoss::kSigmoid:
      return logistic_fn(-z);
  }
  return 0.0;
}

double phi_grad(MarginLoss loss, double z) noexcept {
  switch (loss) {
    case MarginLoss::kSquared:
      return -2.0 * (1.0 - z);
    case MarginLoss::kSquaredHinge:
      return z < 1.0 ? -2.0 * (1.0 - z) : 0.0;
    case MarginLoss::kExponential:
      return -std::exp(-z);
    case MarginLoss::kLogistic:
      return -logistic_fn(-z);
    case MarginLoss::kHinge:
      return z < 1.0 ? -1.0 : 0.0;
    case MarginLoss::kSavage: {
      const double s = logistic_fn(-2.0 * z);
      return -4.0 * s * s * (1.0 - s);
    }
    case MarginLoss::kTangent: {
      const double t = 2.0 * std::atan(z) - 1.0;
      return 4.0 * t / (1.0 + z * z);
    }
    case MarginLoss::kRamp:
      return (z >= -1.0 && z < 1.0) ? -0.5 : 0.0;
    case MarginLoss::kSigmoid: {
      const double s = logistic_fn(z);
      return -s * (1.0 - s);
    }
  }
  return 0.0;
}

double phi_train_eval(MarginLoss loss, double z) noexcept {
  if (loss == MarginLoss::kExponential && -z > kExpClamp) return std::exp(kExpClamp);
  return phi_eval(loss, z);
}

double phi_train_grad(MarginLoss loss, double z) noexcept {
  if (loss == MarginLoss::kExponential && -z > kExpClamp) return 0.0;
  return phi_grad(loss, z);
}

double binary_conditional_risk(MarginLoss loss, double eta1, double v) {
  if (!(eta1 >= 0.0 && eta1 <= 1.0)) {
    throw std::invalid_argument("binary_conditional_risk: eta1 must lie in [0, 1]");
  }
  return eta1 * phi_eval(loss, v) + (1.0 - eta1) * phi_eval(loss, -v);
}

double weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg,
                                 double v) noexcept {
  return w_pos * phi_eval(loss, v) + w_neg * phi_eval(loss, -v);
}

namespace {

template <typename Phi>
double argmin_weighted(const Phi& phi, double w_pos, double w_neg,
                       const MinimizerOptions& options) {
  if (w_pos < 0.0 || w_neg < 0.0 || !(w_pos + w_neg > 0.0)) {
    throw std::invalid_argument(
        "argmin_weighted_conditional_risk: weights must be non-negative with positive sum");
  }
  if (w_pos == w_neg) return 0.0;

  const double bound = options.bound;
  const auto steps = static_cast<long>(std::llround(bound / options.grid_step));
  const double denom = static_cast<double>(steps) / bound;
  auto objective = [&](double v) { return w_pos * phi(v) + w_neg * phi(-v); };

  long best_i = -steps;
  double best = objective(-bound);
  for (long i = -steps + 1; i <= steps; ++i) {
    const double v = static_cast<double>(i) / denom;
    const double f = objective(v);
    if (f < best) {
      best = f;
      best_i = i;
    }
  }
  const double v0 = static_cast<double>(best_i) / denom;

  // Golden-section on the bracket around the best grid point.
  double lo = std::max(-bound, v0 - options.grid_step);
  double hi = std::min(bound, v0 + options.grid_step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    }
  }
  const double refined = 0.5 * (lo + hi);
  return objective(refined) < best ? refined : v0;
}

}  // namespace

double argmin_weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg,
                                        const MinimizerOptions& options) {
  return argmin_weighted([loss](double z) { return phi_eval(loss, z); }, w_pos, w_neg, options);
}

double argmin_weighted_conditional_risk(const std::function<double(double)>& phi, double w_pos,
                                        double w_neg, const MinimizerOptions& options) {
  return argmin_weighted(phi, w_pos, w_neg, options);
}

double min_weighted_conditional_risk(MarginLoss loss, double w_pos, double w_neg,
                                     const MinimizerOptions& options) {
  if (w_pos < 0.0 || w_neg < 0.0 || !(w_pos + w_neg > 0.0)) {
    throw std::invalid_argument(
        "min_weighted_conditional_risk: weights must be non-negative with positive sum");
  }
  switch (loss) {
    case MarginLoss::kSquared:
      return 4.0 * w_pos * w_neg / (w_pos + w_neg);
    case MarginLoss::kHinge:
      return 2.0 * std::min(w_pos, w_neg);
    default:
      break;
  }
  const double v = argmin_weighted_conditional_risk(loss, w_pos, w_neg, options);
  return weighted_conditional_risk(loss, w_pos, w_neg, v);
}

}  // namespace csreject
