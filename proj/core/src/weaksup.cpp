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

#include "csreject/weaksup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace csreject {

Dataset inject_uniform_noise(const Dataset& data, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("inject_uniform_noise: rate must lie in [0, 1)");
  }
  Dataset out = data;
  const int k = data.num_classes();
  const auto n_flip = static_cast<std::size_t>(std::floor(rate * static_cast<double>(data.size())));
  if (n_flip == 0) return out;
  if (k < 2) throw std::invalid_argument("inject_uniform_noise: need at least two classes");

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n_flip entries form a uniform sample.
  for (std::size_t i = 0; i < n_flip; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::uniform_int_distribution<int> other(1, k - 1);
  for (std::size_t i = 0; i < n_flip; ++i) {
    const std::size_t idx = order[i];
    const int original = data.raw_label(idx);
    int flipped = other(rng);
    if (flipped >= original) ++flipped;
    out.set_label(idx, flipped);
  }
  return out;
}

void FeatureMatrix::add(std::span<const double> x) {
  if (x.size() != dim_) throw std::invalid_argument("FeatureMatrix::add: wrong row length");
  values_.insert(values_.end(), x.begin(), x.end());
}

double PURiskParts::non_negative() const noexcept {
  return clamp_active() ? positive : unbiased();
}

PUConfig PUConfig::for_source(std::size_t n_train, std::size_t n_pos, std::size_t n_neg,
                              double prior) {
  if (!(prior > 0.0 && prior < 1.0)) throw std::invalid_argument("PUConfig: prior must be in (0,1)");
  for (std::size_t n_u = (n_train / 200) * 200; n_u >= 200; n_u -= 200) {
    const std::size_t n_p = n_u / 5;
    const auto u_pos = static_cast<std::size_t>(std::floor(prior * static_cast<double>(n_u)));
    if (n_p + u_pos <= n_pos && n_u - u_pos <= n_neg) return {prior, n_u, n_p};
  }
  throw std::invalid_argument("PUConfig: source too small for a PU sample of 200 unlabeled rows");
}

PUDataset make_pu_dataset(const Dataset& data, const PUConfig& config, Rng& rng) {
  if (data.num_classes() != 2) throw std::invalid_argument("make_pu_dataset: requires K = 2");
  if (!(config.prior >= 0.0 && config.prior <= 1.0)) {
    throw std::invalid_argument("make_pu_dataset: prior must lie in [0, 1]");
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i) (data.raw_label(i) == 1 ? pos : neg).push_back(i);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);

  const auto u_pos =
      static_cast<std::size_t>(std::floor(config.prior * static_cast<double>(config.n_unlabeled)));
  const std::size_t u_neg = config.n_unlabeled - u_pos;
  if (config.n_positive + u_pos > pos.size() || u_neg > neg.size()) {
    throw std::invalid_argument("make_pu_dataset: insufficient source data (need " +
                                std::to_string(config.n_positive + u_pos) + " positives and " +
                                std::to_string(u_neg) + " negatives)");
  }

  PUDataset out{FeatureMatrix(data.dim()), FeatureMatrix(data.dim()), {}, {}, {}};
  for (std::size_t i = 0; i < config.n_positive; ++i) {
    out.positives.add(data.features(pos[i]));
    out.positive_source.push_back(pos[i]);
  }
  std::vector<std::size_t> unl(pos.begin() + static_cast<std::ptrdiff_t>(config.n_positive),
                               pos.begin() + static_cast<std::ptrdiff_t>(config.n_positive + u_pos));
  unl.insert(unl.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(u_neg));
  std::shuffle(unl.begin(), unl.end(), rng);
  for (std::size_t idx : unl) {
    out.unlabeled.add(data.features(idx));
    out.unlabeled_truth.push_back(data.raw_label(idx));
    out.unlabeled_source.push_back(idx);
  }
  return out;
}

PURiskParts pu_risk_parts(const LossTermFn& loss_term, double prior,
                          const FeatureMatrix& positives, const FeatureMatrix& unlabeled,
                          const ScoreFn& score_fn) {
  if (positives.empty() || unlabeled.empty()) {
    throw std::invalid_argument("PU risk: positive and unlabeled sets must be non-empty");
  }
  std::vector<double> lp(positives.size()), lpn(positives.size()), lun(unlabeled.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const ScoreVector g = score_fn(positives.row(i));
    lp[i] = loss_term(g, Label::positive());
    lpn[i] = loss_term(g, Label::negative());
  }
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    lun[i] = loss_term(score_fn(unlabeled.row(i)), Label::negative());
  }
  const auto np = static_cast<double>(positives.size());
  PURiskParts parts;
  parts.positive = prior * pairwise_sum(lp) / np;
  parts.positive_negative = prior * pairwise_sum(lpn) / np;
  parts.unlabeled_negative = pairwise_sum(lun) / static_cast<double>(unlabeled.size());
  return parts;
}

double pu_risk_unbiased(const LossTermFn& loss_term, double prior, const FeatureMatrix& positives,
                        const FeatureMatrix& unlabeled, const ScoreFn& score_fn) {
  return pu_risk_parts(loss_term, prior, positives, unlabeled, score_fn).unbiased();
}

double pu_risk_nn(const LossTermFn& loss_term, double prior, const FeatureMatrix& positives,
                  const FeatureMatrix& unlabeled, const ScoreFn& score_fn) {
  return pu_risk_parts(loss_term, prior, positives, unlabeled, score_fn).non_negative();
}

PUTrainResult train_pu(Model& model, const PUDataset& data, double prior,
                       const LossGradFn& objective, const TrainConfig& config) {
  if (data.positives.empty() || data.unlabeled.empty()) {
    throw std::invalid_argument("train_pu: positive and unlabeled sets must be non-empty");
  }
  if (config.batch_size < 2) throw std::invalid_argument("train_pu: batch_size must be >= 2");
  if (data.positives.dim() != input_dim(model)) {
    throw std::invalid_argument("train_pu: dimension mismatch");
  }

  const std::size_t k = output_dim(model);
  ScoreVector scores(k);
  std::vector<double> upstream(k);
  auto loss_term = [&](std::span<const double> g, Label y) {
    return objective(g, y, upstream);
  };
  const ScoreFn scorer = score_fn(model);

  PUTrainResult result;
  if (config.track_risk) {
    result.risk_trace.push_back(pu_risk_nn(loss_term, prior, data.positives, data.unlabeled, scorer));
  }

  const std::size_t n_p = data.positives.size();
  const std::size_t n_u = data.unlabeled.size();
  const std::size_t per_batch_pos = std::clamp<std::size_t>(
      (config.batch_size * n_p + (n_p + n_u) - 1) / (n_p + n_u), 1, config.batch_size - 1);
  const std::size_t per_batch_unl = config.batch_size - per_batch_pos;

  std::span<double> params = parameters(model);
  AdamState adam(params.size());
  std::vector<double> grad_pos(params.size()), grad_pos_neg(params.size()),
      grad_unl(params.size()), grad(params.size());
  std::vector<std::size_t> pos_order(n_p), unl_order(n_u);
  std::iota(pos_order.begin(), pos_order.end(), std::size_t{0});
  std::iota(unl_order.begin(), unl_order.end(), std::size_t{0});
  Rng rng(config.seed);
  std::size_t pos_cursor = n_p;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(unl_order.begin(), unl_order.end(), rng);
    for (std::size_t start = 0; start < n_u; start += per_batch_unl) {
      const std::size_t stop = std::min(n_u, start + per_batch_unl);
      std::fill(grad_pos.begin(), grad_pos.end(), 0.0);
      std::fill(grad_pos_neg.begin(), grad_pos_neg.end(), 0.0);
      std::fill(grad_unl.begin(), grad_unl.end(), 0.0);
      double pos_neg = 0.0;
      double unl_neg = 0.0;

      const double pos_scale = prior / static_cast<double>(per_batch_pos);
      for (std::size_t j = 0; j < per_batch_pos; ++j) {
        if (pos_cursor == n_p) {
          std::shuffle(pos_order.begin(), pos_order.end(), rng);
          pos_cursor = 0;
        }
        const auto x = data.positives.row(pos_order[pos_cursor++]);
        forward(model, x, scores);
        objective(scores, Label::positive(), upstream);
        for (auto& u : upstream) u *= pos_scale;
        backward(model, x, upstream, grad_pos);
        pos_neg += pos_scale * objective(scores, Label::negative(), upstream);
        for (auto& u : upstream) u *= pos_scale;
        backward(model, x, upstream, grad_pos_neg);
      }
      const double unl_scale = 1.0 / static_cast<double>(stop - start);
      for (std::size_t j = start; j < stop; ++j) {
        const auto x = data.unlabeled.row(unl_order[j]);
        forward(model, x, scores);
        unl_neg += unl_scale * objective(scores, Label::negative(), upstream);
        for (auto& u : upstream) u *= unl_scale;
        backward(model, x, upstream, grad_unl);
      }

      const bool clamp = unl_neg - pos_neg < 0.0;
      if (clamp) ++result.clamp_activations;
      for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] = grad_pos[i] + (clamp ? 0.0 : grad_unl[i] - grad_pos_neg[i]);
        if (config.weight_decay > 0.0) grad[i] += config.weight_decay * params[i];
      }
      adam_step(adam, params, grad, config.learning_rate);
      ++result.batches;
    }
    if (config.track_risk) {
      const double risk = pu_risk_nn(loss_term, prior, data.positives, data.unlabeled, scorer);
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

}  // namespace csreject
