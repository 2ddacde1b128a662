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

#include <random>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/random.hpp"

namespace csreject {
namespace {

TEST(LabelTest, RangeIsEnforced) {
  EXPECT_NO_THROW(Label(1, 2));
  EXPECT_NO_THROW(Label(5, 5));
  EXPECT_THROW(Label(0, 3), std::invalid_argument);
  EXPECT_THROW(Label(4, 3), std::invalid_argument);
  EXPECT_THROW(Label(1, 1), std::invalid_argument);
}

TEST(LabelTest, BinaryMapping) {
  EXPECT_EQ(Label::positive().value(), 1);
  EXPECT_EQ(Label::negative().value(), 2);
  EXPECT_EQ(Label::negative().index(), 1u);
}

TEST(RejectionCostTest, OpenInterval) {
  EXPECT_NO_THROW(RejectionCost(0.01));
  EXPECT_NO_THROW(RejectionCost(0.499));
  EXPECT_THROW(RejectionCost(0.0), std::invalid_argument);
  EXPECT_THROW(RejectionCost(0.5), std::invalid_argument);
  EXPECT_THROW(RejectionCost(-0.1), std::invalid_argument);
}

TEST(DecisionTest, SameOutcomeIgnoresReason) {
  const auto a = Decision::reject(RejectReason::kDistance);
  const auto b = Decision::reject(RejectReason::kAmbiguity);
  EXPECT_FALSE(a == b);
  EXPECT_TRUE(same_outcome(a, b));
  EXPECT_FALSE(same_outcome(a, Decision::predict(Label(1, 2))));
  EXPECT_TRUE(Decision::predict(Label(2, 3)) == Decision::predict(Label(2, 3)));
}

TEST(ZeroOneCLossTest, Examples) {
  const RejectionCost c(0.3);
  const Label y(2, 2);
  EXPECT_DOUBLE_EQ(zero_one_c_loss(Decision::reject(RejectReason::kDistance), y, c), 0.3);
  EXPECT_DOUBLE_EQ(zero_one_c_loss(Decision::predict(Label(2, 2)), y, c), 0.0);
  EXPECT_DOUBLE_EQ(zero_one_c_loss(Decision::predict(Label(1, 2)), y, c), 1.0);
}

TEST(MetricsTest, AlwaysReject) {
  std::vector<Decision> d(10, Decision::reject(RejectReason::kOracle));
  std::vector<Label> y(10, Label(1, 2));
  const auto m = compute_metrics(d, y, RejectionCost(0.2));
  EXPECT_DOUBLE_EQ(m.risk01c, 0.2);
  EXPECT_DOUBLE_EQ(m.rejection_ratio, 1.0);
  EXPECT_DOUBLE_EQ(m.accepted_error, 0.0);
  EXPECT_TRUE(m.nothing_accepted);
}

TEST(MetricsTest, AllCorrect) {
  std::vector<Label> y{Label(1, 3), Label(2, 3), Label(3, 3)};
  std::vector<Decision> d;
  for (const auto& l : y) d.push_back(Decision::predict(l));
  const auto m = compute_metrics(d, y, RejectionCost(0.1));
  EXPECT_EQ(m.risk01c, 0.0);
  EXPECT_EQ(m.rejection_ratio, 0.0);
  EXPECT_FALSE(m.nothing_accepted);
}

TEST(MetricsTest, MixedHandComputed) {
  std::vector<Decision> d{Decision::reject(RejectReason::kDistance),
                          Decision::reject(RejectReason::kAmbiguity),
                          Decision::predict(Label(1, 2)), Decision::predict(Label(2, 2))};
  std::vector<Label> y(4, Label(2, 2));
  const auto m = compute_metrics(d, y, RejectionCost(0.25));
  EXPECT_DOUBLE_EQ(m.risk01c, 0.375);
  EXPECT_DOUBLE_EQ(m.rejection_ratio, 0.5);
  EXPECT_DOUBLE_EQ(m.accepted_error, 0.5);
  EXPECT_EQ(m.n_reject_distance, 1u);
  EXPECT_EQ(m.n_reject_ambiguity, 1u);
  EXPECT_EQ(m.n_wrong_accepted, 1u);
}

TEST(MetricsTest, Errors) {
  std::vector<Decision> d;
  std::vector<Label> y;
  EXPECT_THROW(compute_metrics(d, y, RejectionCost(0.2)), std::invalid_argument);
  d.push_back(Decision::predict(Label(1, 2)));
  EXPECT_THROW(compute_metrics(d, y, RejectionCost(0.2)), std::invalid_argument);
}

TEST(MetricsProperty, IdentityAndMeanLoss) {
  Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const int k = std::uniform_int_distribution<int>(2, 5)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    const RejectionCost c(std::uniform_real_distribution<double>(0.01, 0.49)(rng));
    std::vector<Decision> d;
    std::vector<Label> y;
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y.emplace_back(std::uniform_int_distribution<int>(1, k)(rng), k);
      const int pick = std::uniform_int_distribution<int>(0, k + 2)(rng);
      if (pick == 0) {
        d.push_back(Decision::reject(RejectReason::kDistance));
      } else if (pick == 1) {
        d.push_back(Decision::reject(RejectReason::kAmbiguity));
      } else {
        d.push_back(Decision::predict(Label(std::uniform_int_distribution<int>(1, k)(rng), k)));
      }
      const double l = zero_one_c_loss(d.back(), y.back(), c);
      EXPECT_TRUE(l == 0.0 || l == 1.0 || l == c.value());
      loss_sum += l;
    }
    const auto m = compute_metrics(d, y, c);
    EXPECT_NEAR(m.risk01c, loss_sum / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(m.risk01c,
                c.value() * m.rejection_ratio + (1.0 - m.rejection_ratio) * m.accepted_error,
                1e-12);
    EXPECT_GE(m.rejection_ratio, 0.0);
    EXPECT_LE(m.rejection_ratio, 1.0);
    EXPECT_GE(m.accepted_error, 0.0);
    EXPECT_LE(m.accepted_error, 1.0);
    EXPECT_EQ(m.n_rejected() + (n - m.n_rejected()), n);
  }
}

TEST(DatasetTest, AddSelectValidate) {
  Dataset data(2, 3);
  const double a[] = {1.0, 2.0};
  const double b[] = {3.0, 4.0};
  data.add(a, 1);
  data.add(b, 3);
  EXPECT_EQ(data.size(), 2u);
  EXPECT_EQ(data.label(1).value(), 3);
  EXPECT_THROW(data.add(a, 4), std::invalid_argument);
  const std::size_t idx[] = {1};
  const Dataset sub = data.select(idx);
  ASSERT_EQ(sub.size(), 1u);
  EXPECT_EQ(sub.features(0)[1], 4.0);
  EXPECT_NO_THROW(validate(data));
  EXPECT_THROW(validate(Dataset(2, 2)), std::invalid_argument);
  data.mutable_features(0)[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(data), std::invalid_argument);
}

TEST(SeedTest, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}

}  // namespace
}  // namespace csreject
