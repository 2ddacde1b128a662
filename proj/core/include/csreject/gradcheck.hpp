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

// Central finite-difference checks of every analytic gradient in the library.

#ifndef CSREJECT_GRADCHECK_HPP_
#define CSREJECT_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace csreject {

struct GradCheckResult {
  std::string name;
  std::size_t checks = 0;
  /// Samples discarded for lying within reach of a kink.
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
  double tolerance = 1e-4;

  bool passed() const noexcept { return checks > 0 && max_rel_error < tolerance; }
};

/// |a - n| / max(|a|, |n|, 1e-3). The floor keeps components that cancel to
/// roundoff level from dominating.
double gradient_rel_error(double analytic, double numeric) noexcept;

/// Nine margin losses, the cost-sensitive surrogate on raw scores and through
/// linear and MLP models, SCE, DEFER and ANGLE.
std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, std::size_t samples = 200);

}  // namespace csreject

#endif  // CSREJECT_GRADCHECK_HPP_
