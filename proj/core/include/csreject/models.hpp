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

// Trainable score functions, analytic backpropagation, Adam and the
// mini-batch training loop.

#ifndef CSREJECT_MODELS_HPP_
#define CSREJECT_MODELS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/random.hpp"
#include "csreject/surrogate.hpp"

namespace csreject {

/// g(x) = W x + b with W stored row-major (outputs x inputs), followed by b.
class LinearModel {
 public:
  LinearModel(std::size_t input_dim, std::size_t output_dim);
  /// Uniform(-1/sqrt(d), 1/sqrt(d)) initialization.
  static LinearModel random(std::size_t input_dim, std::size_t output_dim, Rng& rng);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  double& weight(std::size_t out, std::size_t in) { return params_[out * input_dim_ + in]; }
  double& bias(std::size_t out) { return params_[output_dim_ * input_dim_ + out]; }

  void forward(std::span<const double> x, std::span<double> out) const;
  void backward(std::span<const double> x, std::span<const double> upstream,
                std::span<double> grad) const;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::vector<double> params_;
};

/// One hidden rectifier layer. Parameter layout: hidden weights
/// (hidden x inputs), hidden bias, output weights (outputs x hidden),
/// output bias.
class MlpModel {
 public:
  static constexpr std::size_t kDefaultHidden = 64;

  MlpModel(std::size_t input_dim, std::size_t output_dim, std::size_t hidden = kDefaultHidden);
  static MlpModel random(std::size_t input_dim, std::size_t output_dim, Rng& rng,
                         std::size_t hidden = kDefaultHidden);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  void forward(std::span<const double> x, std::span<double> out) const;
  void backward(std::span<const double> x, std::span<const double> upstream,
                std::span<double> grad) const;

 private:
  std::size_t w1() const noexcept { return 0; }
  std::size_t b1() const noexcept { return hidden_ * input_dim_; }
  std::size_t w2() const noexcept { return b1() + hidden_; }
  std::size_t b2() const noexcept { return w2() + output_dim_ * hidden_; }
  void hidden_activations(std::span<const double> x, std::span<double> pre) const;

  std::size_t input_dim_;
  std::size_t output_dim_;
  std::size_t hidden_;
  std::vector<double> params_;
};

using Model = std::variant<LinearModel, MlpModel>;

enum class ModelKind { kLinear, kMlp };

Model make_model(ModelKind kind, std::size_t input_dim, std::size_t output_dim, Rng& rng);

std::size_t input_dim(const Model& model);
std::size_t output_dim(const Model& model);
std::span<double> parameters(Model& model);
std::span<const double> parameters(const Model& model);

/// Throws std::invalid_argument when x has the wrong length.
ScoreVector forward(const Model& model, std::span<const double> x);
void forward(const Model& model, std::span<const double> x, std::span<double> out);

/// Accumulates d(upstream . g(x)) / d(params) into `grad` (not zeroed).
/// The rectifier's subgradient at exactly 0 is 0.
void backward(const Model& model, std::span<const double> x, std::span<const double> upstream,
              std::span<double> grad);

/// The returned function refers to `model`, which must outlive it.
ScoreFn score_fn(const Model& model);

struct AdamState {
  explicit AdamState(std::size_t n_params);

  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double learning_rate);

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t batch_size = 256;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  double weight_decay = 0.0;
  /// Evaluate the full-data risk after every epoch.
  bool track_risk = true;
};

/// Per-sample objective: returns the loss and writes d loss / d scores.
using LossGradFn =
    std::function<double(std::span<const double> scores, Label y, std::span<double> grad)>;

struct TrainResult {
  /// Full-data empirical risk before training and after each epoch.
  std::vector<double> risk_trace;
  bool non_finite = false;
};

/// Mean loss of `objective` over `data`.
double mean_objective(const Model& model, const Dataset& data, const LossGradFn& objective);

/// Epochs of shuffled mini-batches (last partial batch kept), averaging the
/// per-sample gradients within each batch. The shuffle depends only on
/// config.seed.
TrainResult train(Model& model, const Dataset& data, const LossGradFn& objective,
                  const TrainConfig& config);

/// Text snapshot: magic line, kind, dimensions, then row-major parameters.
void save_model(const Model& model, std::ostream& os);
Model load_model(std::istream& is);

}  // namespace csreject

#endif  // CSREJECT_MODELS_HPP_
