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

// Domain primitives: labels, decisions, the rejection cost, datasets and the
// zero-one-c evaluation metric.

#ifndef CSREJECT_CORE_HPP_
#define CSREJECT_CORE_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace csreject {

/// Class label in {1, ..., K}. Binary problems use K = 2 with +1 <-> 1 and
/// -1 <-> 2.
class Label {
 public:
  Label(int value, int num_classes);

  int value() const noexcept { return value_; }
  int num_classes() const noexcept { return num_classes_; }
  /// Zero-based position, for indexing score vectors.
  std::size_t index() const noexcept { return static_cast<std::size_t>(value_ - 1); }

  static Label positive() { return Label(1, 2); }
  static Label negative() { return Label(2, 2); }

  friend bool operator==(const Label& a, const Label& b) noexcept {
    return a.value_ == b.value_ && a.num_classes_ == b.num_classes_;
  }

 private:
  int value_;
  int num_classes_;
};

enum class RejectReason { kDistance, kAmbiguity, kOracle };

std::string_view to_string(RejectReason reason) noexcept;

/// Either a predicted label or a rejection tagged with its reason.
class Decision {
 public:
  static Decision predict(Label label) { return Decision(label); }
  static Decision reject(RejectReason reason) { return Decision(reason); }

  bool is_reject() const noexcept { return rejected_; }
  bool is_predict() const noexcept { return !rejected_; }
  /// Only meaningful when is_predict().
  Label label() const noexcept { return label_; }
  /// Only meaningful when is_reject().
  RejectReason reason() const noexcept { return reason_; }

  friend bool operator==(const Decision& a, const Decision& b) noexcept;

 private:
  explicit Decision(Label label) : label_(label) {}
  explicit Decision(RejectReason reason)
      : label_(1, 2), rejected_(true), reason_(reason) {}

  Label label_;
  bool rejected_ = false;
  RejectReason reason_ = RejectReason::kOracle;
};

/// Same outcome, ignoring the rejection reason.
bool same_outcome(const Decision& a, const Decision& b) noexcept;

/// Abstention cost, restricted to the open interval (0, 0.5).
class RejectionCost {
 public:
  explicit RejectionCost(double c);
  double value() const noexcept { return c_; }

 private:
  double c_;
};

/// Row-major feature matrix with labels stored as 1-based class values.
class Dataset {
 public:
  Dataset(std::size_t dim, int num_classes);
  Dataset(std::vector<double> features, std::vector<int> labels,
          std::size_t dim, int num_classes);

  void add(std::span<const double> x, int label);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  int num_classes() const noexcept { return num_classes_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::span<double> mutable_features(std::size_t i) {
    return {features_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const { return Label(labels_[i], num_classes_); }
  int raw_label(std::size_t i) const noexcept { return labels_[i]; }
  void set_label(std::size_t i, int label);

  const std::vector<double>& feature_data() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Subset in the given order.
  Dataset select(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  std::size_t dim_;
  int num_classes_;
};

/// Throws std::invalid_argument unless the dataset is non-empty and every
/// feature is finite.
void validate(const Dataset& data);

struct MetricsRecord {
  std::size_t n = 0;
  double risk01c = 0.0;
  double rejection_ratio = 0.0;
  double accepted_error = 0.0;
  std::size_t n_reject_distance = 0;
  std::size_t n_reject_ambiguity = 0;
  std::size_t n_reject_oracle = 0;
  std::size_t n_wrong_accepted = 0;
  /// Set when no sample was accepted; accepted_error is then 0 by convention.
  bool nothing_accepted = false;

  std::size_t n_rejected() const noexcept {
    return n_reject_distance + n_reject_ambiguity + n_reject_oracle;
  }
};

double zero_one_c_loss(const Decision& decision, Label label, RejectionCost cost);

MetricsRecord compute_metrics(std::span<const Decision> decisions,
                              std::span<const Label> labels, RejectionCost cost);

}  // namespace csreject

#endif  // CSREJECT_CORE_HPP_
