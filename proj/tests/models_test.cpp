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
#include <sstream>

#include "csreject/models.hpp"
#include "csreject/surrogate.hpp"

namespace csreject {
namespace {

Dataset gaussian_blobs(std::size_t n, double shift, Rng& rng, std::size_t dim = 2) {
  Dataset data(dim, 2);
  std::normal_distribution<double> n01;
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = 1 + static_cast<int>(i % 2);
    for (auto& v : x) v = n01(rng) + (y == 1 ? shift : -shift);
    data.add(x, y);
  }
  return data;
}

LossGradFn cs_objective(MarginLoss loss, double c) {
  return [loss, cost = RejectionCost(c)](std::span<const double> g, Label y, std::span<double> grad) {
    return cs_surrogate_loss_grad(loss, cost, g, y, grad, true);
  };
}

TEST(LinearModel, ForwardIdentity) {
  LinearModel m(2, 2);
  m.weight(0, 0) = 1.0;
  m.weight(1, 1) = 1.0;
  const double x[] = {3.0, -1.0};
  const auto g = forward(Model(m), x);
  EXPECT_EQ(g, (ScoreVector{3.0, -1.0}));
  const double bad[] = {1.0};
  EXPECT_THROW(forward(Model(m), bad), std::invalid_argument);
}

TEST(LinearModel, BackwardIsOuterProduct) {
  Rng rng(1);
  const Model m = LinearModel::random(3, 2, rng);
  const double x[] = {0.5, -2.0, 1.5};
  const double up[] = {0.7, -0.3};
  std::vector<double> grad(parameters(m).size(), 0.0);
  backward(m, x, up, grad);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(grad[i * 3 + j], up[i] * x[j]);
    EXPECT_DOUBLE_EQ(grad[6 + i], up[i]);
  }
  const double zero[] = {0.0, 0.0};
  std::vector<double> g0(grad.size(), 0.0);
  backward(m, x, zero, g0);
  for (double v : g0) EXPECT_EQ(v, 0.0);
  const double short_up[] = {1.0};
  EXPECT_THROW(backward(m, x, short_up, g0), std::invalid_argument);
}

TEST(MlpModel, ZeroWeightsGiveOutputBias) {
  MlpModel m(3, 2, 5);
  auto p = m.parameters();
  p[p.size() - 2] = 0.25;
  p[p.size() - 1] = -1.5;
  const double x[] = {1.0, 2.0, 3.0};
  EXPECT_EQ(forward(Model(m), x), (ScoreVector{0.25, -1.5}));
}

TEST(MlpModel, JacobianMatchesFiniteDifference) {
  Rng rng(17);
  Model m = MlpModel::random(4, 3, rng, 16);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-6;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(4);
    for (auto& v : x) v = u(rng);
    for (std::size_t out = 0; out < 3; ++out) {
      std::vector<double> up(3, 0.0);
      up[out] = 1.0;
      std::vector<double> grad(parameters(m).size(), 0.0);
      backward(m, x, up, grad);
      auto p = parameters(m);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + h;
        const double a = forward(m, x)[out];
        p[i] = saved - h;
        const double b = forward(m, x)[out];
        p[i] = saved;
        const double fd = (a - b) / (2 * h);
        EXPECT_LT(std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-3}), 1e-4);
      }
    }
  }
}

TEST(Adam, FirstStepHasMagnitudeLr) {
  AdamState state(3);
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -5.0, 1e-3};
  adam_step(state, p, g, 0.01);
  EXPECT_NEAR(p[0], 1.0 - 0.01, 1e-6);
  EXPECT_NEAR(p[1], -2.0 + 0.01, 1e-6);
  EXPECT_NEAR(p[2], 0.5 - 0.01, 1e-4);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientsLeaveParameters) {
  AdamState state(2);
  std::vector<double> p{1.0, 2.0};
  const std::vector<double> g{0.0, 0.0};
  for (int i = 0; i < 100; ++i) adam_step(state, p, g, 0.1);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
}

TEST(Train, DeterministicReplay) {
  Rng rng(3);
  const Dataset data = gaussian_blobs(300, 1.0, rng);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  cfg.seed = 99;
  Rng r1(5), r2(5);
  Model a = MlpModel::random(2, 2, r1, 8);
  Model b = MlpModel::random(2, 2, r2, 8);
  train(a, data, cs_objective(MarginLoss::kSigmoid, 0.2), cfg);
  train(b, data, cs_objective(MarginLoss::kSigmoid, 0.2), cfg);
  const auto pa = parameters(a);
  const auto pb = parameters(b);
  EXPECT_TRUE(std::equal(pa.begin(), pa.end(), pb.begin(), pb.end()));
}

TEST(Train, ZeroEpochsLeavesModel) {
  Rng rng(3);
  const Dataset data = gaussian_blobs(50, 1.0, rng);
  Model m = LinearModel::random(2, 2, rng);
  const std::vector<double> before(parameters(m).begin(), parameters(m).end());
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto result = train(m, data, cs_objective(MarginLoss::kLogistic, 0.2), cfg);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), parameters(m).begin()));
  EXPECT_EQ(result.risk_trace.size(), 1u);
}

TEST(Train, RiskDecreases) {
  Rng rng(8);
  const Dataset data = gaussian_blobs(400, 0.8, rng, 3);
  for (MarginLoss loss : {MarginLoss::kSigmoid, MarginLoss::kHinge, MarginLoss::kLogistic}) {
    for (ModelKind kind : {ModelKind::kLinear, ModelKind::kMlp}) {
      Model m = make_model(kind, 3, 2, rng);
      TrainConfig cfg;
      cfg.epochs = 20;
      cfg.batch_size = 32;
      const auto result = train(m, data, cs_objective(loss, 0.25), cfg);
      ASSERT_EQ(result.risk_trace.size(), 21u);
      EXPECT_LE(result.risk_trace.back(), result.risk_trace.front());
      EXPECT_FALSE(result.non_finite);
    }
  }
}

// Full-batch gradient descent on the logistic cost-sensitive surrogate of a
// linear model, written without the library's backward pass.
double gradient_descent_minimum(const Dataset& data, double c) {
  const std::size_t d = data.dim();
  std::vector<double> w(2 * d + 2, 0.0);
  auto sp = [](double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); };
  auto sig = [](double z) { return 1 / (1 + std::exp(-z)); };
  double risk = 0.0;
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> grad(w.size(), 0.0);
    risk = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto x = data.features(i);
      const std::size_t y = data.label(i).index();
      for (std::size_t k = 0; k < 2; ++k) {
        double g = w[2 * d + k];
        for (std::size_t j = 0; j < d; ++j) g += w[k * d + j] * x[j];
        // c * log(1 + e^{-g}) for the true class, (1 - c) * log(1 + e^{g}) otherwise.
        double dg;
        if (k == y) {
          risk += c * sp(-g);
          dg = -c * sig(-g);
        } else {
          risk += (1 - c) * sp(g);
          dg = (1 - c) * sig(g);
        }
        for (std::size_t j = 0; j < d; ++j) grad[k * d + j] += dg * x[j];
        grad[2 * d + k] += dg;
      }
    }
    risk /= static_cast<double>(data.size());
    for (std::size_t p = 0; p < w.size(); ++p) w[p] -= 0.5 * grad[p] / static_cast<double>(data.size());
  }
  return risk;
}

TEST(Train, ConvexCaseReachesGradientDescentMinimum) {
  Rng rng(12);
  const Dataset data = gaussian_blobs(200, 0.7, rng);
  const double c = 0.3;
  const double oracle = gradient_descent_minimum(data, c);
  Model m = LinearModel(2, 2);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 20;
  cfg.epochs = 400;
  const auto result = train(m, data, cs_objective(MarginLoss::kLogistic, c), cfg);
  EXPECT_NEAR(result.risk_trace.back(), oracle, 1e-3);
  EXPECT_GE(result.risk_trace.back(), oracle - 1e-6);
}

TEST(Train, SeparableHingeHasNoAcceptedErrors) {
  Rng rng(4);
  Dataset data(2, 2);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const int y = 1 + i % 2;
    const double x[] = {y == 1 ? u(rng) : -u(rng), v(rng)};
    data.add(x, y);
  }
  Model m = LinearModel::random(2, 2, rng);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 16;
  cfg.epochs = 200;
  train(m, data, cs_objective(MarginLoss::kHinge, 0.2), cfg);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Decision d = decide(forward(m, data.features(i)));
    if (d.is_predict()) EXPECT_EQ(d.label().value(), data.raw_label(i));
  }
}

TEST(Serialization, RoundTrip) {
  Rng rng(6);
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kMlp}) {
    const Model m = make_model(kind, 3, 4, rng);
    std::stringstream ss;
    save_model(m, ss);
    const Model back = load_model(ss);
    EXPECT_EQ(back.index(), m.index());
    const auto a = parameters(m);
    const auto b = parameters(back);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  }
  std::stringstream bad("not a model\n");
  EXPECT_THROW(load_model(bad), std::runtime_error);
}

}  // namespace
}  // namespace csreject
