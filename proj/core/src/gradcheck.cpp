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

#include "csreject/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>

#include "csreject/baselines.hpp"
#include "csreject/losses.hpp"
#include "csreject/models.hpp"
#include "csreject/surrogate.hpp"

namespace csreject {
namespace {

constexpr double kStep = 1e-5;
constexpr double kKinkMargin = 1e-2;

std::vector<double> kinks(MarginLoss loss) {
  switch (loss) {
    case MarginLoss::kHinge:
    case MarginLoss::kSquaredHinge:
      return {1.0};
    case MarginLoss::kRamp:
      return {-1.0, 1.0};
    default:
      return {};
  }
}

bool near_kink(MarginLoss loss, double z, double margin) {
  for (double k : kinks(loss)) {
    if (std::abs(z - k) < margin) return true;
  }
  return false;
}

/// Every margin argument the surrogate evaluates for scores g and label y.
bool surrogate_near_kink(MarginLoss loss, std::span<const double> g, Label y) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = i == y.index() ? g[i] : -g[i];
    if (near_kink(loss, z, kKinkMargin)) return true;
  }
  return false;
}

bool angle_near_kink(std::span<const double> g, Label y, const AngleConfig& config) {
  for (int j = 0; j < config.num_classes; ++j) {
    if (static_cast<std::size_t>(j) == y.index()) continue;
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += config.vertices[j][i] * g[i];
    for (double u : {dot, -dot}) {
      if (std::abs(u) < kKinkMargin || std::abs(u - 1.0) < kKinkMargin) return true;
    }
  }
  return false;
}

std::vector<double> uniform_vector(std::size_t n, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

using ScoreLoss = std::function<double(std::span<const double> g, std::span<double> grad)>;

/// Compares the analytic score gradient with central differences at g.
void check_scores(GradCheckResult& result, std::vector<double> g, const ScoreLoss& fn) {
  std::vector<double> grad(g.size()), scratch(g.size());
  fn(g, grad);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double saved = g[i];
    g[i] = saved + kStep;
    const double up = fn(g, scratch);
    g[i] = saved - kStep;
    const double down = fn(g, scratch);
    g[i] = saved;
    result.max_rel_error =
        std::max(result.max_rel_error, gradient_rel_error(grad[i], (up - down) / (2.0 * kStep)));
    ++result.checks;
  }
}

GradCheckResult check_margin_loss(MarginLoss loss, std::size_t samples, Rng& rng) {
  GradCheckResult result{"phi' " + std::string(to_string(loss))};
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const double z = u(rng);
    if (near_kink(loss, z, 1e-3)) {
      ++result.skipped;
      continue;
    }
    const double numeric =
        (phi_eval(loss, z + kStep) - phi_eval(loss, z - kStep)) / (2.0 * kStep);
    result.max_rel_error =
        std::max(result.max_rel_error, gradient_rel_error(phi_grad(loss, z), numeric));
    ++result.checks;
  }
  return result;
}

GradCheckResult check_surrogate_scores(MarginLoss loss, std::size_t samples, Rng& rng) {
  GradCheckResult result{"L_CS scores " + std::string(to_string(loss))};
  std::uniform_int_distribution<int> pick_k(2, 5);
  std::uniform_real_distribution<double> pick_c(0.05, 0.45);
  for (std::size_t s = 0; s < samples; ++s) {
    const int k = pick_k(rng);
    const Label y(std::uniform_int_distribution<int>(1, k)(rng), k);
    const RejectionCost cost(pick_c(rng));
    const auto g = uniform_vector(static_cast<std::size_t>(k), -3.0, 3.0, rng);
    if (surrogate_near_kink(loss, g, y)) {
      ++result.skipped;
      continue;
    }
    check_scores(result, g, [&](std::span<const double> v, std::span<double> grad) {
      return cs_surrogate_loss_grad(loss, cost, v, y, grad);
    });
  }
  return result;
}

/// Parameter gradient of L_CS(model(x), y) by backward() vs central differences.
GradCheckResult check_surrogate_model(MarginLoss loss, ModelKind kind, std::size_t samples,
                                      Rng& rng) {
  GradCheckResult result{"L_CS " + std::string(kind == ModelKind::kLinear ? "linear " : "mlp ") +
                         std::string(to_string(loss))};
  constexpr std::size_t kIn = 4;
  constexpr std::size_t kHidden = 6;
  constexpr int kClasses = 3;
  const std::size_t model_samples = std::max<std::size_t>(samples / 10, 5);
  for (std::size_t s = 0; s < model_samples; ++s) {
    Model model = kind == ModelKind::kLinear
                      ? Model(LinearModel::random(kIn, kClasses, rng))
                      : Model(MlpModel::random(kIn, kClasses, rng, kHidden));
    const auto x = uniform_vector(kIn, -1.5, 1.5, rng);
    const Label y(std::uniform_int_distribution<int>(1, kClasses)(rng), kClasses);
    const RejectionCost cost(std::uniform_real_distribution<double>(0.05, 0.45)(rng));

    if (kind == ModelKind::kMlp) {
      const auto p = parameters(model);
      bool close = false;
      for (std::size_t h = 0; h < kHidden && !close; ++h) {
        double pre = p[kHidden * kIn + h];
        for (std::size_t i = 0; i < kIn; ++i) pre += p[h * kIn + i] * x[i];
        close = std::abs(pre) < kKinkMargin;
      }
      if (close) {
        ++result.skipped;
        continue;
      }
    }
    const ScoreVector g = forward(model, x);
    if (surrogate_near_kink(loss, g, y)) {
      ++result.skipped;
      continue;
    }
    std::vector<double> upstream(g.size());
    cs_surrogate_loss_grad(loss, cost, g, y, upstream);
    std::vector<double> grad(parameters(model).size(), 0.0);
    backward(model, x, upstream, grad);

    auto params = parameters(model);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + kStep;
      const double up = cs_surrogate_loss(loss, cost, forward(model, x), y);
      params[i] = saved - kStep;
      const double down = cs_surrogate_loss(loss, cost, forward(model, x), y);
      params[i] = saved;
      result.max_rel_error =
          std::max(result.max_rel_error, gradient_rel_error(grad[i], (up - down) / (2.0 * kStep)));
      ++result.checks;
    }
  }
  return result;
}

}  // namespace

double gradient_rel_error(double analytic, double numeric) noexcept {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, std::size_t samples) {
  std::vector<GradCheckResult> out;
  Rng rng(seed);
  for (MarginLoss loss : kAllMarginLosses) out.push_back(check_margin_loss(loss, samples, rng));
  for (MarginLoss loss : kAllMarginLosses) out.push_back(check_surrogate_scores(loss, samples, rng));
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kMlp}) {
    for (MarginLoss loss : kAllMarginLosses) {
      out.push_back(check_surrogate_model(loss, kind, samples, rng));
    }
  }

  std::uniform_int_distribution<int> pick_k(2, 5);
  std::uniform_real_distribution<double> pick_c(0.05, 0.45);

  GradCheckResult sce{"SCE"};
  GradCheckResult defer{"DEFER"};
  GradCheckResult angle{"ANGLE"};
  for (std::size_t s = 0; s < samples; ++s) {
    const int k = pick_k(rng);
    const Label y(std::uniform_int_distribution<int>(1, k)(rng), k);
    const RejectionCost cost(pick_c(rng));

    check_scores(sce, uniform_vector(static_cast<std::size_t>(k), -3.0, 3.0, rng),
                 [&](std::span<const double> g, std::span<double> grad) {
                   return sce_loss_grad(g, y, grad);
                 });
    check_scores(defer, uniform_vector(static_cast<std::size_t>(k) + 1, -3.0, 3.0, rng),
                 [&](std::span<const double> g, std::span<double> grad) {
                   return defer_loss_grad(g, y, cost, grad);
                 });

    const AngleConfig config = AngleConfig::for_cost(cost, k, s % 2 == 1);
    const auto g = uniform_vector(static_cast<std::size_t>(k) - 1, -2.0, 2.0, rng);
    if (angle_near_kink(g, y, config)) {
      ++angle.skipped;
      continue;
    }
    check_scores(angle, g, [&](std::span<const double> v, std::span<double> grad) {
      return angle_loss_grad(v, y, config, grad);
    });
  }
  out.push_back(sce);
  out.push_back(defer);
  out.push_back(angle);
  return out;
}

}  // namespace csreject
