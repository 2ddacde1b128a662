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

#include <cmath>
#include <random>

#include "csreject/losses.hpp"
#include "csreject/surrogate.hpp"
#include "csreject/theory.hpp"

namespace csreject {
namespace {

TEST(ChowRule, Examples) {
  const RejectionCost c(0.2);
  EXPECT_EQ(chow_rule(PosteriorSimplex({0.85, 0.10, 0.05}), c), Decision::predict(Label(1, 3)));
  EXPECT_TRUE(chow_rule(PosteriorSimplex({0.6, 0.3, 0.1}), c).is_reject());
  EXPECT_TRUE(chow_rule(PosteriorSimplex({0.80, 0.15, 0.05}), c).is_reject());
  EXPECT_EQ(chow_rule(PosteriorSimplex({0.1, 0.9}), c).reason(), RejectReason::kOracle);
}

TEST(ChowRule, NearHalfCost) {
  const RejectionCost c(0.499);
  EXPECT_TRUE(chow_rule(PosteriorSimplex({0.501, 0.499}), c).is_reject());
  EXPECT_TRUE(chow_rule(PosteriorSimplex({0.5015, 0.4985}), c).is_predict());
}

TEST(BayesCostSensitive, Examples) {
  EXPECT_EQ(bayes_cs_binary(0.85, 0.8), 1);
  EXPECT_EQ(bayes_cs_binary(0.80, 0.8), -1);
  EXPECT_EQ(bayes_cs_binary(0.7, 0.5), 1);
  EXPECT_THROW(bayes_cs_binary(1.5, 0.5), std::invalid_argument);
  EXPECT_THROW(bayes_cs_binary(0.5, 1.0), std::invalid_argument);
}

TEST(BinaryThreeWay, Examples) {
  const RejectionCost c(0.2);
  EXPECT_EQ(binary_three_way(0.9, c), Decision::predict(Label::positive()));
  EXPECT_EQ(binary_three_way(0.1, c), Decision::predict(Label::negative()));
  EXPECT_TRUE(binary_three_way(0.5, c).is_reject());
}

TEST(EnsembleChow, Examples) {
  const RejectionCost c(0.2);
  const PosteriorSimplex tie({0.5, 0.5, 0.0});
  EXPECT_TRUE(ensemble_chow(tie, c).is_reject());
  EXPECT_TRUE(chow_rule(tie, c).is_reject());
  EXPECT_EQ(ensemble_chow(PosteriorSimplex({0.85, 0.10, 0.05}), c), Decision::predict(Label(1, 3)));
}

TEST(OracleEquivalence, RandomDraws) {
  Rng rng(1234);
  std::uniform_real_distribution<double> uc(1e-6, 0.5 - 1e-6);
  std::size_t checked = 0;
  for (int rep = 0; rep < 20000; ++rep) {
    const std::size_t k = 2 + static_cast<std::size_t>(rep % 5);
    const PosteriorSimplex eta = random_simplex(k, rng, 1.0 + rep % 3);
    const RejectionCost c(uc(rng));
    if (std::abs(eta.max() - (1.0 - c.value())) < 1e-12) continue;
    ++checked;
    const Decision chow = chow_rule(eta, c);
    EXPECT_TRUE(same_outcome(ensemble_chow(eta, c), chow));
    if (k == 2) EXPECT_TRUE(same_outcome(binary_three_way(eta[0], c), chow));
  }
  EXPECT_GT(checked, 19000u);
}

TEST(RandomSimplex, IsValid) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const auto eta = random_simplex(4, rng, 3.0);
    double sum = 0.0;
    for (double v : eta.values()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(PsiInverse, Examples) {
  EXPECT_EQ(psi_inverse(MarginLoss::kSquared, RejectionCost(0.3), 0.0), 0.0);
  EXPECT_NEAR(psi_inverse(MarginLoss::kSquared, RejectionCost(0.25), 0.1), 0.0307692, 1e-7);
  EXPECT_DOUBLE_EQ(psi_inverse(MarginLoss::kHinge, RejectionCost(0.25), 0.37), 0.37);
  // 2c(1-c) - eps(1-2c) <= 0 at c = 0.25 once eps >= 0.75.
  EXPECT_THROW(psi_inverse(MarginLoss::kSquared, RejectionCost(0.25), 0.75), std::invalid_argument);
  EXPECT_THROW(psi_inverse(MarginLoss::kSigmoid, RejectionCost(0.25), 0.1), std::invalid_argument);
  EXPECT_THROW(psi_inverse(MarginLoss::kHinge, RejectionCost(0.25), -0.1), std::invalid_argument);
}

TEST(PsiInverse, MonotoneFromZero) {
  for (double c : {0.05, 0.2, 0.45}) {
    const RejectionCost cost(c);
    double prev = 0.0;
    for (double eps = 0.0; eps < 0.5; eps += 0.001) {
      for (MarginLoss l : {MarginLoss::kSquared, MarginLoss::kHinge}) {
        if (l == MarginLoss::kSquared && 2 * c * (1 - c) - eps * (1 - 2 * c) <= 0) continue;
        const double v = psi_inverse(l, cost, eps);
        EXPECT_GE(v, 0.0);
        if (l == MarginLoss::kSquared) {
          EXPECT_GE(v, prev - 1e-15);
          prev = v;
        }
      }
    }
  }
}

// Smallest surrogate regret among wrong-signed scores, by numeric
// minimization, for per-class weights (eta c, (1 - eta)(1 - c)).
double wrong_sign_regret(MarginLoss loss, double eta, double c) {
  const double a = eta * c;
  const double b = (1 - eta) * (1 - c);
  const double best = weighted_conditional_risk(loss, a, b, argmin_weighted_conditional_risk(loss, a, b));
  double wrong = std::numeric_limits<double>::infinity();
  const bool positive = a > b;
  for (double v = 0.0; v <= 20.0; v += 1e-3) {
    wrong = std::min(wrong, weighted_conditional_risk(loss, a, b, positive ? -v : v));
  }
  return wrong - best;
}

TEST(CalibrationPsi, MatchesNumericRegretOracle) {
  for (double c : {0.1, 0.25, 0.4}) {
    const RejectionCost cost(c);
    for (double theta : {0.02, 0.1, 0.3, 0.5}) {
      for (MarginLoss l : {MarginLoss::kSquared, MarginLoss::kHinge}) {
        double smallest = std::numeric_limits<double>::infinity();
        for (double eta : {1 - c + theta, 1 - c - theta}) {
          if (eta < 0 || eta > 1) continue;
          smallest = std::min(smallest, wrong_sign_regret(l, eta, c));
        }
        const double psi = calibration_psi(l, cost, theta);
        EXPECT_LE(psi, smallest + 1e-6) << c << ' ' << theta;
        if (l == MarginLoss::kSquared && 1 - c - theta >= 0) EXPECT_NEAR(psi, smallest, 1e-6);
      }
    }
  }
}

TEST(CalibrationPsi, InverseRoundTrip) {
  for (double c : {0.05, 0.3, 0.49}) {
    for (double theta = 0.0; theta < 1.0; theta += 0.05) {
      for (MarginLoss l : {MarginLoss::kSquared, MarginLoss::kHinge}) {
        const RejectionCost cost(c);
        EXPECT_NEAR(calibration_psi_inverse(l, cost, calibration_psi(l, cost, theta)), theta, 1e-12);
      }
    }
  }
}

TEST(CalibrationPsi, TabulatedSquaredFormIsTheUpperBranch) {
  // The tabulated expression is the regret for eta above 1 - c, which
  // exceeds the two-sided calibration function.
  const RejectionCost cost(0.25);
  const double theta = 0.1;
  const double upper = psi_inverse(MarginLoss::kSquared, cost, theta);
  EXPECT_NEAR(upper, wrong_sign_regret(MarginLoss::kSquared, 0.75 + theta, 0.25), 1e-6);
  EXPECT_GT(upper, calibration_psi(MarginLoss::kSquared, cost, theta));
}

TEST(CsZeroOne, VerdictConvention) {
  const RejectionCost c(0.2);
  const double g[] = {0.0, 0.5, -1.0};
  EXPECT_DOUBLE_EQ(cs_zero_one_loss(c, g, Label(1, 3)), 0.2 + 0.8);
  EXPECT_DOUBLE_EQ(cs_zero_one_loss(c, g, Label(2, 3)), 0.0);
}

// Expected 0-1-c risk of decide(g) computed directly.
double direct_risk(const FiniteDistribution& dist, const std::vector<ScoreVector>& scores,
                   RejectionCost cost) {
  double r = 0.0;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    const Decision d = decide(scores[i]);
    const auto& eta = dist.support[i].eta;
    double loss = 0.0;
    for (std::size_t y = 0; y < eta.num_classes(); ++y) {
      loss += eta[y] * zero_one_c_loss(d, Label(static_cast<int>(y) + 1,
                                                static_cast<int>(eta.num_classes())), cost);
    }
    r += dist.support[i].weight * loss;
  }
  return r;
}

TEST(ExcessChain, OptimalScoresHaveNoRegret) {
  const RejectionCost c(0.2);
  FiniteDistribution dist;
  dist.support.push_back({0, PosteriorSimplex({0.9, 0.05, 0.05}), 0.5});
  dist.support.push_back({1, PosteriorSimplex({0.4, 0.4, 0.2}), 0.3});
  dist.support.push_back({2, PosteriorSimplex({0.1, 0.85, 0.05}), 0.2});
  std::vector<ScoreVector> g;
  for (const auto& atom : dist.support) {
    ScoreVector s;
    for (double e : atom.eta.values()) s.push_back(e > 1 - c.value() ? 1.0 : -1.0);
    g.push_back(s);
  }
  const auto report = audit_excess_chain(dist, g, c);
  EXPECT_NEAR(report.lhs, 0.0, 1e-15);
  EXPECT_NEAR(report.rhs, 0.0, 1e-15);
  EXPECT_FALSE(report.violated);
  EXPECT_NEAR(report.risk01c, direct_risk(dist, g, c), 1e-15);
}

TEST(ExcessChain, AlwaysRejectHasPositiveRegret) {
  const RejectionCost c(0.2);
  FiniteDistribution dist;
  dist.support.push_back({0, PosteriorSimplex({0.95, 0.05}), 0.6});
  dist.support.push_back({1, PosteriorSimplex({0.5, 0.5}), 0.4});
  const std::vector<ScoreVector> g{{-1.0, -1.0}, {-1.0, -1.0}};
  const auto report = audit_excess_chain(dist, g, c);
  // Bayes: predict at atom 0 (risk 0.05), reject at atom 1 (risk 0.2).
  EXPECT_NEAR(report.bayes_risk01c, 0.6 * 0.05 + 0.4 * 0.2, 1e-15);
  EXPECT_NEAR(report.risk01c, 0.2, 1e-15);
  EXPECT_GT(report.lhs, 0.0);
  EXPECT_LE(report.lhs, report.rhs);
  EXPECT_FALSE(report.violated);
}

TEST(ExcessChain, RandomInstancesHoldIncludingPsiForms) {
  const auto audit = audit_excess_chain_random(2000, 77);
  EXPECT_EQ(audit.chain.cases, 2000u);
  EXPECT_EQ(audit.chain.failures, 0u);
  EXPECT_EQ(audit.psi_squared.failures, 0u);
  EXPECT_EQ(audit.psi_hinge.failures, 0u);
}

TEST(ExcessChain, RejectsMalformedDistribution) {
  FiniteDistribution dist;
  dist.support.push_back({0, PosteriorSimplex({0.5, 0.5}), 0.7});
  EXPECT_THROW(dist.validate(), std::invalid_argument);
}

TEST(Audits, CalibrationForCalibratedLosses) {
  for (MarginLoss l : {MarginLoss::kSigmoid, MarginLoss::kHinge, MarginLoss::kSquared,
                       MarginLoss::kLogistic, MarginLoss::kSavage, MarginLoss::kRamp}) {
    const auto r = audit_calibration(l, 150, 5);
    EXPECT_EQ(r.cases, 150u);
    EXPECT_EQ(r.failures, 0u) << to_string(l);
  }
}

TEST(Audits, UncalibratedWitnessExists) {
  EXPECT_TRUE(audit_uncalibrated_witness(3).passed());
}

TEST(Audits, QuickSuitePasses) {
  for (const auto& r : run_all_audits(99, true)) EXPECT_TRUE(r.passed()) << r.name;
}

}  // namespace
}  // namespace csreject
