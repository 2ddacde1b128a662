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

#ifndef CSREJECT_POSTERIOR_HPP_
#define CSREJECT_POSTERIOR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace csreject {

/// Class-posterior vector eta(x): non-negative entries summing to one.
class PosteriorSimplex {
 public:
  /// Throws std::invalid_argument on a negative entry, fewer than one entry,
  /// or a sum farther than 1e-9 from one.
  explicit PosteriorSimplex(std::vector<double> eta);

  std::size_t num_classes() const noexcept { return eta_.size(); }
  double operator[](std::size_t i) const noexcept { return eta_[i]; }
  std::span<const double> values() const noexcept { return eta_; }
  double max() const noexcept;
  /// Smallest index attaining the maximum.
  std::size_t argmax() const noexcept;

 private:
  std::vector<double> eta_;
};

}  // namespace csreject

#endif  // CSREJECT_POSTERIOR_HPP_
