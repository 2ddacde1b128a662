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

// Weak-supervision protocols: uniform label noise, positive-unlabeled (PU)
// dataset construction, and the unbiased / non-negative PU risk estimators.

#ifndef CSREJECT_WEAKSUP_HPP_
#define CSREJECT_WEAKSUP_HPP_

#include <functional>
#include <span>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/models.hpp"
#include "csreject/random.hpp"

namespace csreject {

/// Flips exactly floor(rate * n) labels, chosen without replacement, to a
/// uniformly drawn different class. Requires 0 <= rate < 1.
Dataset inject_uniform_noise(const Dataset& data, double rate, Rng& rng);

/// Unlabeled feature rows.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> x);
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

 private:
  std::size_t dim_;
  std::vector<double> values_;
};

struct PUConfig {
  double prior = 0.7;
  std::size_t n_unlabeled = 0;
  std::size_t n_positive = 0;

  /// The largest n_u that is a multiple of 200, at most n_train, and
  /// satisfiable from the available positives and negatives without
  /// replacement; n_p = n_u / 5. Throws if not even 200 is feasible.
  static PUConfig for_source(std::size_t n_train, std::size_t n_pos, std::size_t n_neg,
                             double prior = 0.7);
};

struct PUDataset {
  FeatureMatrix positives;
  FeatureMatrix unlabeled;
  /// Hidden ground truth of the unlabeled rows (1 = positive); for
  /// evaluation and tests only.
  std::vector<int> unlabeled_truth;
  std::vector<std::size_t> positive_source;
  std::vector<std::size_t> unlabeled_source;
};

/// Positives are drawn from class 1; unlabeled holds floor(prior * n_u) of the
/// remaining class-1 rows and class-2 rows for the rest, shuffled. Each source
/// row is used at most once. Requires K = 2.
PUDataset make_pu_dataset(const Dataset& data, const PUConfig& config, Rng& rng);

/// Loss of scores g under label +1 (Label::positive()) or -1 (Label::negative()).
using LossTermFn = std::function<double(std::span<const double> g, Label y)>;

struct PURiskParts {
  double positive = 0.0;           // pi / n_p * sum_P L(+1)
  double positive_negative = 0.0;  // pi / n_p * sum_P L(-1)
  double unlabeled_negative = 0.0; // 1 / n_u * sum_U L(-1)

  double unbiased() const noexcept { return positive - positive_negative + unlabeled_negative; }
  double non_negative() const noexcept;
  bool clamp_active() const noexcept { return unlabeled_negative - positive_negative < 0.0; }
};

PURiskParts pu_risk_parts(const LossTermFn& loss_term, double prior,
                          const FeatureMatrix& positives, const FeatureMatrix& unlabeled,
                          const ScoreFn& score_fn);

/// Unbiased PU risk estimate. Throws on empty sets.
double pu_risk_unbiased(const LossTermFn& loss_term, double prior, const FeatureMatrix& positives,
                        const FeatureMatrix& unlabeled, const ScoreFn& score_fn);

/// Non-negative PU risk estimate: the implied negative-class term is clamped
/// at zero. Throws on empty sets.
double pu_risk_nn(const LossTermFn& loss_term, double prior, const FeatureMatrix& positives,
                  const FeatureMatrix& unlabeled, const ScoreFn& score_fn);

struct PUTrainResult {
  /// Non-negative risk on the full PU sample before training and after each
  /// epoch.
  std::vector<double> risk_trace;
  std::size_t batches = 0;
  /// Mini-batches whose negative-class bracket was negative (gradient zeroed).
  std::size_t clamp_activations = 0;
  bool non_finite = false;
};

/// Mini-batch minimization of the non-negative PU risk. Each batch holds
/// ceil(batch * n_p / (n_p + n_u)) positives (cycled) and the rest unlabeled;
/// an epoch ends when the unlabeled rows are exhausted. When a batch's bracket
/// is negative its gradient is dropped for that step. The model must have
/// the output dimension the objective expects for K = 2.
PUTrainResult train_pu(Model& model, const PUDataset& data, double prior,
                       const LossGradFn& objective, const TrainConfig& config);

}  // namespace csreject

#endif  // CSREJECT_WEAKSUP_HPP_
