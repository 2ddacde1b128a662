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

#include "csreject/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace csreject {
namespace {

constexpr const char* kMagic = "csreject-model v1";

void check_input(std::span<const double> x, std::size_t expected) {
  if (x.size() != expected) {
    throw std::invalid_argument("model expects " + std::to_string(expected) +
                                " features, got " + std::to_string(x.size()));
  }
}

void fill_uniform(std::span<double> values, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& v : values) v = dist(rng);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

LinearModel::LinearModel(std::size_t input_dim, std::size_t output_dim)
    : input_dim_(input_dim),
      output_dim_(output_dim),
      params_(output_dim * input_dim + output_dim, 0.0) {
  if (input_dim == 0 || output_dim == 0) {
    throw std::invalid_argument("LinearModel: dimensions must be positive");
  }
}

LinearModel LinearModel::random(std::size_t input_dim, std::size_t output_dim, Rng& rng) {
  LinearModel m(input_dim, output_dim);
  fill_uniform(m.params_, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
  return m;
}

void LinearModel::forward(std::span<const double> x, std::span<double> out) const {
  check_input(x, input_dim_);
  const double* w = params_.data();
  const double* b = params_.data() + output_dim_ * input_dim_;
  for (std::size_t k = 0; k < output_dim_; ++k) {
    double s = b[k];
    const double* row = w + k * input_dim_;
    for (std::size_t j = 0; j < input_dim_; ++j) s += row[j] * x[j];
    out[k] = s;
  }
}

void LinearModel::backward(std::span<const double> x, std::span<const double> upstream,
                           std::span<double> grad) const {
  check_input(x, input_dim_);
  double* gb = grad.data() + output_dim_ * input_dim_;
  for (std::size_t k = 0; k < output_dim_; ++k) {
    const double u = upstream[k];
    if (u == 0.0) continue;
    double* row = grad.data() + k * input_dim_;
    for (std::size_t j = 0; j < input_dim_; ++j) row[j] += u * x[j];
    gb[k] += u;
  }
}

MlpModel::MlpModel(std::size_t input_dim, std::size_t output_dim, std::size_t hidden)
    : input_dim_(input_dim), output_dim_(output_dim), hidden_(hidden) {
  if (input_dim == 0 || output_dim == 0 || hidden == 0) {
    throw std::invalid_argument("MlpModel: dimensions must be positive");
  }
  params_.assign(b2() + output_dim_, 0.0);
}

MlpModel MlpModel::random(std::size_t input_dim, std::size_t output_dim, Rng& rng,
                          std::size_t hidden) {
  MlpModel m(input_dim, output_dim, hidden);
  std::span<double> p(m.params_);
  const double l1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double l2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  fill_uniform(p.subspan(m.w1(), m.w2() - m.w1()), l1, rng);
  fill_uniform(p.subspan(m.w2()), l2, rng);
  return m;
}

void MlpModel::hidden_activations(std::span<const double> x, std::span<double> pre) const {
  const double* w = params_.data() + w1();
  const double* b = params_.data() + b1();
  for (std::size_t h = 0; h < hidden_; ++h) {
    double s = b[h];
    const double* row = w + h * input_dim_;
    for (std::size_t j = 0; j < input_dim_; ++j) s += row[j] * x[j];
    pre[h] = s;
  }
}

void MlpModel::forward(std::span<const double> x, std::span<double> out) const {
  check_input(x, input_dim_);
  std::vector<double> hidden(hidden_);
  hidden_activations(x, hidden);
  const double* w = params_.data() + w2();
  const double* b = params_.data() + b2();
  for (std::size_t k = 0; k < output_dim_; ++k) {
    double s = b[k];
    const double* row = w + k * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) s += row[h] * std::max(0.0, hidden[h]);
    out[k] = s;
  }
}

void MlpModel::backward(std::span<const double> x, std::span<const double> upstream,
                        std::span<double> grad) const {
  check_input(x, input_dim_);
  std::vector<double> pre(hidden_);
  hidden_activations(x, pre);
  std::vector<double> delta(hidden_, 0.0);
  const double* w_out = params_.data() + w2();
  for (std::size_t k = 0; k < output_dim_; ++k) {
    const double u = upstream[k];
    if (u == 0.0) continue;
    double* g_row = grad.data() + w2() + k * hidden_;
    const double* w_row = w_out + k * hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) {
      g_row[h] += u * std::max(0.0, pre[h]);
      delta[h] += u * w_row[h];
    }
    grad[b2() + k] += u;
  }
  for (std::size_t h = 0; h < hidden_; ++h) {
    if (!(pre[h] > 0.0)) continue;
    const double d = delta[h];
    double* g_row = grad.data() + w1() + h * input_dim_;
    for (std::size_t j = 0; j < input_dim_; ++j) g_row[j] += d * x[j];
    grad[b1() + h] += d;
  }
}

Model make_model(ModelKind kind, std::size_t input_dim, std::size_t output_dim, Rng& rng) {
  if (kind == ModelKind::kLinear) return LinearModel::random(input_dim, output_dim, rng);
  return MlpModel::random(input_dim, output_dim, rng);
}

std::size_t input_dim(const Model& model) {
  return std::visit([](const auto& m) { return m.input_dim(); }, model);
}

std::size_t output_dim(const Model& model) {
  return std::visit([](const auto& m) { return m.output_dim(); }, model);
}

std::span<double> parameters(Model& model) {
  return std::visit([](auto& m) { return m.parameters(); }, model);
}

std::span<const double> parameters(const Model& model) {
  return std::visit([](const auto& m) { return m.parameters(); }, model);
}

void forward(const Model& model, std::span<const double> x, std::span<double> out) {
  std::visit([&](const auto& m) { m.forward(x, out); }, model);
}

ScoreVector forward(const Model& model, std::span<const double> x) {
  ScoreVector out(output_dim(model));
  forward(model, x, out);
  return out;
}

void backward(const Model& model, std::span<const double> x, std::span<const double> upstream,
              std::span<double> grad) {
  if (upstream.size() != output_dim(model) || grad.size() != parameters(model).size()) {
    throw std::invalid_argument("backward: shape mismatch");
  }
  std::visit([&](const auto& m) { m.backward(x, upstream, grad); }, model);
}

ScoreFn score_fn(const Model& model) {
  return [&model](std::span<const double> x) { return forward(model, x); };
}

AdamState::AdamState(std::size_t n_params)
    : first_moment(n_params, 0.0), second_moment(n_params, 0.0) {}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double learning_rate) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g * g;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

double mean_objective(const Model& model, const Dataset& data, const LossGradFn& objective) {
  if (data.empty()) throw std::invalid_argument("mean_objective: empty dataset");
  const std::size_t k = output_dim(model);
  ScoreVector scores(k);
  std::vector<double> scratch(k);
  std::vector<double> losses(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    forward(model, data.features(i), scores);
    losses[i] = objective(scores, data.label(i), scratch);
  }
  return pairwise_sum(losses) / static_cast<double>(data.size());
}

TrainResult train(Model& model, const Dataset& data, const LossGradFn& objective,
                  const TrainConfig& config) {
  if (config.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("train: learning_rate must be positive");
  }
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (data.dim() != input_dim(model)) throw std::invalid_argument("train: dimension mismatch");

  TrainResult result;
  if (config.track_risk) result.risk_trace.push_back(mean_objective(model, data, objective));

  std::span<double> params = parameters(model);
  AdamState adam(params.size());
  std::vector<double> grad(params.size());
  const std::size_t k = output_dim(model);
  ScoreVector scores(k);
  std::vector<double> upstream(k);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t p = start; p < stop; ++p) {
        const std::size_t i = order[p];
        const auto x = data.features(i);
        forward(model, x, scores);
        objective(scores, data.label(i), upstream);
        for (auto& u : upstream) u *= scale;
        backward(model, x, upstream, grad);
      }
      if (config.weight_decay > 0.0) {
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += config.weight_decay * params[j];
      }
      adam_step(adam, params, grad, config.learning_rate);
    }
    if (config.track_risk) {
      const double risk = mean_objective(model, data, objective);
      result.risk_trace.push_back(risk);
      if (!std::isfinite(risk)) {
        result.non_finite = true;
        break;
      }
    }
  }
  for (double p : params) {
    if (!std::isfinite(p)) {
      result.non_finite = true;
      break;
    }
  }
  return result;
}

void save_model(const Model& model, std::ostream& os) {
  os << kMagic << '\n';
  std::visit(Overloaded{
                 [&](const LinearModel& m) {
                   os << "kind linear\n"
                      << "input_dim " << m.input_dim() << '\n'
                      << "output_dim " << m.output_dim() << '\n';
                 },
                 [&](const MlpModel& m) {
                   os << "kind mlp\n"
                      << "input_dim " << m.input_dim() << '\n'
                      << "output_dim " << m.output_dim() << '\n'
                      << "hidden " << m.hidden_dim() << '\n';
                 },
             },
             model);
  const auto params = parameters(model);
  os << "params " << params.size() << '\n' << std::setprecision(17);
  for (double p : params) os << p << '\n';
  if (!os) throw std::runtime_error("save_model: write failed");
}

Model load_model(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic) {
    throw std::runtime_error("load_model: bad magic line");
  }
  auto expect = [&](const std::string& key) {
    std::string got;
    std::size_t value = 0;
    if (!(is >> got >> value) || got != key) {
      throw std::runtime_error("load_model: expected field '" + key + "'");
    }
    return value;
  };
  std::string key, kind;
  if (!(is >> key >> kind) || key != "kind") throw std::runtime_error("load_model: missing kind");
  const std::size_t in = expect("input_dim");
  const std::size_t out = expect("output_dim");
  Model model = kind == "linear" ? Model(LinearModel(in, out))
                : kind == "mlp"  ? Model(MlpModel(in, out, expect("hidden")))
                                 : throw std::runtime_error("load_model: unknown kind " + kind);
  const std::size_t n = expect("params");
  auto params = parameters(model);
  if (n != params.size()) throw std::runtime_error("load_model: parameter count mismatch");
  for (auto& p : params) {
    if (!(is >> p)) throw std::runtime_error("load_model: truncated parameters");
  }
  return model;
}

}  // namespace csreject
