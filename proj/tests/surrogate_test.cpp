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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "csreject/models.hpp"
#include "csreject/surrogate.hpp"
#include "csreject/theory.hpp"

namespace csreject {
namespace {

TEST(SurrogateLoss, Examples) {
  const RejectionCost c(0.25);
  const double g[] = {0.5, -0.5};
  EXPECT_DOUBLE_EQ(cs_surrogate_loss(MarginLoss::kHinge, c, g, Label(1, 2)), 0.5);
  const double zero[] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(cs_surrogate_loss(MarginLoss::kSigmoid, c, zero, Label(1, 2)), 0.5);
}

TEST(SurrogateLoss, SigmoidVanishesAtConfidentScores) {
  const double g[] = {-60.0, 60.0, -60.0};
  EXPECT_LT(cs_surrogate_loss(MarginLoss::kSigmoid, RejectionCost(0.3), g, Label(2, 3)), 1e-20);
}

TEST(SurrogateGrad, Examples) {
  const double zero[] = {0.0, 0.0};
  const auto grad = cs_surrogate_grad(MarginLoss::kSigmoid, RejectionCost(0.25), zero, Label(1, 2));
  EXPECT_DOUBLE_EQ(grad[0], -0.0625);
  EXPECT_DOUBLE_EQ(grad[1], 0.1875);
  const double g[] = {2.0, 0.3};
  EXPECT_EQ(cs_surrogate_grad(MarginLoss::kHinge, RejectionCost(0.25), g, Label(1, 2))[0], 0.0);
}

TEST(SurrogateGrad, FiniteDifference) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-6;
  for (MarginLoss loss : {MarginLoss::kSigmoid, MarginLoss::kLogistic, MarginLoss::kSquared,
                          MarginLoss::kSavage, MarginLoss::kTangent, MarginLoss::kExponential}) {
    for (int rep = 0; rep < 50; ++rep) {
      const int k = 2 + rep % 4;
      std::vector<double> g(static_cast<std::size_t>(k));
      for (auto& v : g) v = u(rng);
      const Label y(1 + rep % k, k);
      const RejectionCost c(0.05 + 0.4 * (rep % 7) / 7.0);
      std::vector<double> grad(g.size());
      const double value = cs_surrogate_loss_grad(loss, c, g, y, grad);
      EXPECT_DOUBLE_EQ(value, cs_surrogate_loss(loss, c, g, y));
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto gp = g;
        auto gm = g;
        gp[i] += h;
        gm[i] -= h;
        const double fd = (cs_surrogate_loss(loss, c, gp, y) - cs_surrogate_loss(loss, c, gm, y)) / (2 * h);
        EXPECT_LT(std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i])), 1e-5);
      }
    }
  }
}

TEST(SurrogateProperty, PermutationEquivariance) {
  Rng rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> g(4);
    for (auto& v : g) v = u(rng);
    std::vector<std::size_t> perm(4);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const int y = 1 + rep % 4;
    std::vector<double> gp(4);
    for (std::size_t i = 0; i < 4; ++i) gp[perm[i]] = g[i];
    const Label yl(y, 4);
    const Label yp(static_cast<int>(perm[static_cast<std::size_t>(y - 1)]) + 1, 4);
    const RejectionCost c(0.2);
    EXPECT_NEAR(cs_surrogate_loss(MarginLoss::kLogistic, c, g, yl),
                cs_surrogate_loss(MarginLoss::kLogistic, c, gp, yp), 1e-12);
    const auto d = cs_surrogate_grad(MarginLoss::kLogistic, c, g, yl);
    const auto dp = cs_surrogate_grad(MarginLoss::kLogistic, c, gp, yp);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(dp[perm[i]], d[i], 1e-12);
  }
}

TEST(EmpiricalRisk, MeanOfLosses) {
  Dataset data(1, 2);
  const double x0[] = {0.0};
  data.add(x0, 1);
  const ScoreFn zero = [](std::span<const double>) { return ScoreVector{0.0, 0.0}; };
  const RejectionCost c(0.25);
  EXPECT_DOUBLE_EQ(empirical_risk(MarginLoss::kSigmoid, c, zero, data), 0.5);

  // Hand-computed per-sample losses 0.5 and 0.3 with the hinge surrogate.
  const ScoreFn table = [](std::span<const double> x) {
    return x[0] == 0.0 ? ScoreVector{0.5, -0.5} : ScoreVector{0.7, -0.7};
  };
  Dataset two(1, 2);
  const double x1[] = {1.0};
  two.add(x0, 1);
  two.add(x1, 1);
  EXPECT_NEAR(empirical_risk(MarginLoss::kHinge, c, table, two), 0.4, 1e-15);

  Dataset doubled = two;
  doubled.add(x0, 1);
  doubled.add(x1, 1);
  EXPECT_DOUBLE_EQ(empirical_risk(MarginLoss::kHinge, c, table, doubled),
                   empirical_risk(MarginLoss::kHinge, c, table, two));
  EXPECT_THROW(empirical_risk(MarginLoss::kHinge, c, table, Dataset(1, 2)), std::invalid_argument);
}

TEST(EmpiricalRisk, LinearModelParameterGradient) {
  Rng rng(21);
  Dataset data(3, 3);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 40; ++i) {
    const double x[] = {n01(rng), n01(rng), n01(rng)};
    data.add(x, 1 + i % 3);
  }
  for (MarginLoss loss : {MarginLoss::kSigmoid, MarginLoss::kLogistic, MarginLoss::kSquared}) {
    Model model = LinearModel::random(3, 3, rng);
    const RejectionCost c(0.3);
    auto params = parameters(model);
    std::vector<double> grad(params.size(), 0.0);
    std::vector<double> up(3);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto g = forward(model, data.features(i));
      cs_surrogate_loss_grad(loss, c, g, data.label(i), up);
      for (auto& v : up) v /= static_cast<double>(data.size());
      backward(model, data.features(i), up, grad);
    }
    const double h = 1e-6;
    for (std::size_t p = 0; p < params.size(); ++p) {
      const double saved = params[p];
      params[p] = saved + h;
      const double rp = empirical_risk(loss, c, score_fn(model), data);
      params[p] = saved - h;
      const double rm = empirical_risk(loss, c, score_fn(model), data);
      params[p] = saved;
      const double fd = (rp - rm) / (2 * h);
      EXPECT_LT(std::abs(fd - grad[p]) / std::max(std::abs(grad[p]), 1e-3), 1e-4);
    }
  }
}

TEST(Decide, Examples) {
  const double a[] = {-0.1, -0.2, -3.0};
  EXPECT_EQ(decide(a), Decision::reject(RejectReason::kDistance));
  const double b[] = {0.4, 0.2, -1.0};
  EXPECT_EQ(decide(b), Decision::reject(RejectReason::kAmbiguity));
  const double c[] = {0.4, -0.2, -1.0};
  EXPECT_EQ(decide(c), Decision::predict(Label(1, 3)));
  const double zero[] = {0.0, -1.0};
  EXPECT_EQ(decide(zero), Decision::reject(RejectReason::kDistance));
}

TEST(Decide, PredictsIffExactlyOnePositive) {
  Rng rng(2);
  std::uniform_int_distribution<int> pick(-2, 2);
  for (int rep = 0; rep < 5000; ++rep) {
    const int k = 2 + rep % 5;
    std::vector<double> g(static_cast<std::size_t>(k));
    for (auto& v : g) v = 0.5 * pick(rng);
    const auto positives = std::count_if(g.begin(), g.end(), [](double v) { return v > 0; });
    const Decision d = decide(g);
    EXPECT_EQ(d.is_predict(), positives == 1);
    if (positives == 0) EXPECT_EQ(d.reason(), RejectReason::kDistance);
    if (positives >= 2) EXPECT_EQ(d.reason(), RejectReason::kAmbiguity);
    if (d.is_predict()) EXPECT_GT(g[d.label().index()], 0.0);
  }
}

TEST(PointwiseRisk, OneHotAndHandValue) {
  const double g[] = {0.3, -1.2, 0.8};
  const PosteriorSimplex onehot({0.0, 1.0, 0.0});
  const RejectionCost c(0.2);
  EXPECT_NEAR(pointwise_conditional_risk(MarginLoss::kLogistic, c, g, onehot),
              cs_surrogate_loss(MarginLoss::kLogistic, c, g, Label(2, 3)), 1e-14);
  const double zero[] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(pointwise_conditional_risk(MarginLoss::kSigmoid, RejectionCost(0.25), zero,
                                              PosteriorSimplex({0.5, 0.5})),
                   0.5);
}

TEST(PointwiseRisk, DecompositionIdentity) {
  Rng rng(13);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t k = 2 + static_cast<std::size_t>(rep % 5);
    const PosteriorSimplex eta = random_simplex(k, rng);
    std::vector<double> g(k);
    for (auto& v : g) v = u(rng);
    const RejectionCost c(0.05 + 0.44 * std::uniform_real_distribution<double>()(rng));
    for (MarginLoss loss : kAllMarginLosses) {
      EXPECT_NEAR(pointwise_conditional_risk(loss, c, g, eta),
                  pointwise_conditional_risk_decomposed(loss, c, g, eta), 1e-12);
    }
  }
}

TEST(PairwiseSum, MatchesNaiveSum) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_DOUBLE_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

}  // namespace
}  // namespace csreject
