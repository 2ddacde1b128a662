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

// Synthetic generators with exact posteriors, CSV ingestion, splitting and
// standardization.

#ifndef CSREJECT_DATA_HPP_
#define CSREJECT_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/posterior.hpp"
#include "csreject/random.hpp"

namespace csreject {

struct SyntheticSpec {
  enum class Kind { kTwonorm, kGaussMixture };

  Kind kind = Kind::kGaussMixture;
  int num_classes = 2;
  std::size_t dim = 2;
  std::vector<std::vector<double>> means;                     // K x d
  std::vector<std::vector<std::vector<double>>> covariances;  // K x d x d
  std::vector<double> priors;                                 // K

  /// Throws std::invalid_argument on shape errors, a non-simplex prior, or a
  /// covariance that is not symmetric positive definite.
  void validate() const;
};

/// Means +-(2/sqrt(20)) * 1 in R^20, identity covariance, priors
/// (prior_pos, 1 - prior_pos).
SyntheticSpec twonorm_spec(double prior_pos = 0.5);

/// K isotropic Gaussians with means on a circle of `radius` in the plane.
SyntheticSpec planar_mixture_spec(int num_classes, double radius, double stddev);

/// Exact class posterior of a Gaussian mixture by Bayes' rule.
class PosteriorOracle {
 public:
  explicit PosteriorOracle(SyntheticSpec spec);

  PosteriorSimplex operator()(std::span<const double> x) const;
  const SyntheticSpec& spec() const noexcept { return spec_; }

 private:
  SyntheticSpec spec_;
  std::vector<std::vector<double>> cholesky_;  // lower factors, row-major d x d
  std::vector<double> log_norm_;               // log prior - 0.5 log det
};

struct GeneratedData {
  Dataset data;
  PosteriorOracle oracle;
};

/// Prior-then-class-conditional sampling.
GeneratedData gen_gauss_mixture(const SyntheticSpec& spec, std::size_t n, Rng& rng);

/// The 20-dimensional two-Gaussian benchmark with equal priors.
GeneratedData gen_twonorm(std::size_t n, Rng& rng);

struct LabelColumn {
  std::variant<std::size_t, std::string> column;  // 0-based index or header name
};

/// Comma-separated numeric features with an integer label column. Distinct raw
/// labels are remapped to 1..K in sorted order. Throws std::runtime_error
/// naming the row (1-based, counting the header) on malformed input.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                 bool has_header);

/// Seeded shuffle, then contiguous cuts at rounded cumulative fractions.
std::vector<Dataset> split(const Dataset& data, std::span<const double> fractions,
                           std::uint64_t seed);

struct StandardizeTransform {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 / sqrt(max(variance, 1e-12)); 0 for constant features

  Dataset apply(const Dataset& data) const;
};

/// Fits per-feature mean/variance on `train` and returns the transform and the
/// transformed training set.
std::pair<StandardizeTransform, Dataset> standardize(const Dataset& train);

}  // namespace csreject

#endif  // CSREJECT_DATA_HPP_
