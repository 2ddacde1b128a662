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

#include "csreject/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csreject {

Label::Label(int value, int num_classes) : value_(value), num_classes_(num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument("Label: number of classes must be at least 2, got " +
                                std::to_string(num_classes));
  }
  if (value < 1 || value > num_classes) {
    throw std::invalid_argument("Label: value " + std::to_string(value) +
                                " outside {1.." + std::to_string(num_classes) + "}");
  }
}

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::kDistance:
      return "distance";
    case RejectReason::kAmbiguity:
      return "ambiguity";
    case RejectReason::kOracle:
      return "oracle";
  }
  return "unknown";
}

bool operator==(const Decision& a, const Decision& b) noexcept {
  if (a.rejected_ != b.rejected_) return false;
  if (a.rejected_) return a.reason_ == b.reason_;
  return a.label_ == b.label_;
}

bool same_outcome(const Decision& a, const Decision& b) noexcept {
  if (a.is_reject() != b.is_reject()) return false;
  return a.is_reject() || a.label().value() == b.label().value();
}

RejectionCost::RejectionCost(double c) : c_(c) {
  if (!(c > 0.0 && c < 0.5)) {
    throw std::invalid_argument("RejectionCost: c must lie in (0, 0.5), got " +
                                std::to_string(c));
  }
}

Dataset::Dataset(std::size_t dim, int num_classes) : dim_(dim), num_classes_(num_classes) {
  if (num_classes < 1) throw std::invalid_argument("Dataset: num_classes must be >= 1");
}

Dataset::Dataset(std::vector<double> features, std::vector<int> labels, std::size_t dim,
                 int num_classes)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      dim_(dim),
      num_classes_(num_classes) {
  if (num_classes < 1) throw std::invalid_argument("Dataset: num_classes must be >= 1");
  if (features_.size() != labels_.size() * dim_) {
    throw std::invalid_argument("Dataset: feature buffer does not match labels x dim");
  }
  for (int y : labels_) {
    if (y < 1 || y > num_classes_) {
      throw std::invalid_argument("Dataset: label " + std::to_string(y) + " out of range");
    }
  }
}

void Dataset::add(std::span<const double> x, int label) {
  if (x.size() != dim_) {
    throw std::invalid_argument("Dataset::add: expected " + std::to_string(dim_) +
                                " features, got " + std::to_string(x.size()));
  }
  if (label < 1 || label > num_classes_) {
    throw std::invalid_argument("Dataset::add: label " + std::to_string(label) +
                                " out of range");
  }
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

void Dataset::set_label(std::size_t i, int label) {
  if (label < 1 || label > num_classes_) {
    throw std::invalid_argument("Dataset::set_label: label out of range");
  }
  labels_.at(i) = label;
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out(dim_, num_classes_);
  out.features_.reserve(indices.size() * dim_);
  out.labels_.reserve(indices.size());
  for (std::size_t i : indices) {
    auto row = features(i);
    out.features_.insert(out.features_.end(), row.begin(), row.end());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

void validate(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("dataset is empty");
  for (double v : data.feature_data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset contains non-finite feature");
  }
}

double zero_one_c_loss(const Decision& decision, Label label, RejectionCost cost) {
  if (decision.is_reject()) return cost.value();
  return decision.label().value() == label.value() ? 0.0 : 1.0;
}

MetricsRecord compute_metrics(std::span<const Decision> decisions,
                              std::span<const Label> labels, RejectionCost cost) {
  if (decisions.empty()) throw std::invalid_argument("compute_metrics: empty input");
  if (decisions.size() != labels.size()) {
    throw std::invalid_argument("compute_metrics: decisions and labels differ in length");
  }
  MetricsRecord m;
  m.n = decisions.size();
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const Decision& d = decisions[i];
    if (d.is_reject()) {
      switch (d.reason()) {
        case RejectReason::kDistance:
          ++m.n_reject_distance;
          break;
        case RejectReason::kAmbiguity:
          ++m.n_reject_ambiguity;
          break;
        case RejectReason::kOracle:
          ++m.n_reject_oracle;
          break;
      }
    } else if (d.label().value() != labels[i].value()) {
      ++m.n_wrong_accepted;
    }
  }
  const double n = static_cast<double>(m.n);
  const std::size_t rejected = m.n_rejected();
  const std::size_t accepted = m.n - rejected;
  m.rejection_ratio = static_cast<double>(rejected) / n;
  m.nothing_accepted = accepted == 0;
  m.accepted_error =
      accepted == 0 ? 0.0
                    : static_cast<double>(m.n_wrong_accepted) / static_cast<double>(accepted);
  m.risk01c = (cost.value() * static_cast<double>(rejected) +
               static_cast<double>(m.n_wrong_accepted)) / n;
  return m;
}

}  // namespace csreject
