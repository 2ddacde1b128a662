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

// Exact oracles (Chow's rule, Bayes cost-sensitive classifiers and their
// one-vs-rest reconstruction) and numerical auditors for the calibration and
// excess-risk results of the cost-sensitive approach.

#ifndef CSREJECT_THEORY_HPP_
#define CSREJECT_THEORY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "csreject/core.hpp"
#include "csreject/losses.hpp"
#include "csreject/posterior.hpp"
#include "csreject/random.hpp"
#include "csreject/surrogate.hpp"

namespace csreject {

/// Reject(Oracle) if max_y eta_y <= 1 - c, else Predict(argmax eta).
Decision chow_rule(const PosteriorSimplex& eta, RejectionCost cost);

/// +1 if p_pos > alpha, else -1.
int bayes_cs_binary(double p_pos, double alpha);

/// Chow's rule for K = 2 assembled from the cost-sensitive classifiers at
/// alpha = 1 - c and alpha = c.
Decision binary_three_way(double p_pos, RejectionCost cost);

/// Chow's rule assembled from K one-vs-rest verdicts at alpha = 1 - c.
Decision ensemble_chow(const PosteriorSimplex& eta, RejectionCost cost);

/// Inverse calibration transform as tabulated for the squared loss,
/// eps^2 / (2c(1-c) - eps(1-2c)), and for the hinge loss (identity).
/// Throws std::invalid_argument for other losses, negative eps, or when the
/// squared-loss denominator is not positive.
double psi_inverse(MarginLoss loss, RejectionCost cost, double eps);

/// Calibration function of the (c, 1-c)-weighted binary problem:
/// the smallest surrogate regret compatible with a 0-1 regret of `theta`.
/// squared: theta^2 / (2c(1-c) + theta(1-2c)); hinge: theta.
double calibration_psi(MarginLoss loss, RejectionCost cost, double theta);

/// Inverse of calibration_psi; bounds the weighted 0-1 regret of one
/// one-vs-rest classifier by a function of its surrogate regret.
double calibration_psi_inverse(MarginLoss loss, RejectionCost cost, double eps);

/// c * [g_y <= 0] + (1 - c) * sum_{y' != y} [g_{y'} > 0]; the surrogate with
/// phi replaced by the zero-one loss, using the verdict convention of decide().
double cs_zero_one_loss(RejectionCost cost, std::span<const double> g, Label y);

struct FiniteDistribution {
  struct Atom {
    int id = 0;
    PosteriorSimplex eta;
    double weight = 0.0;
  };
  std::vector<Atom> support;

  /// Throws unless weights are non-negative, sum to one, and all posteriors
  /// share the same number of classes.
  void validate() const;
  std::size_t num_classes() const;
};

struct ExcessChainReport {
  double risk01c = 0.0;         // R^{01c}(f)
  double bayes_risk01c = 0.0;   // R^{01c,*} via chow_rule
  double cs01_risk = 0.0;       // R^{L_CS with l01}(g)
  double cs01_min_risk = 0.0;   // its minimum, by enumerating verdict vectors
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated = false;
};

/// Exhaustive check of R^{01c}(f) - R^{01c,*} <= R^{CS,01}(g) - R^{CS,01,*}
/// on a finite distribution. score_table[i] holds the scores of support[i].
ExcessChainReport audit_excess_chain(const FiniteDistribution& dist,
                                     const std::vector<ScoreVector>& score_table,
                                     RejectionCost cost, double tolerance = 1e-12);

struct PsiBoundReport {
  double cs01_regret = 0.0;         // sum_i zero-one regret of classifier i
  double bound = 0.0;               // sum_i calibration_psi_inverse(surrogate regret_i)
  double tabulated_bound = 0.0;     // same with psi_inverse; NaN outside its domain
  bool violated = false;
  bool tabulated_violated = false;
};

/// Checks the second inequality of the chain for a loss with a known
/// calibration function (squared or hinge).
PsiBoundReport audit_psi_bound(const FiniteDistribution& dist,
                               const std::vector<ScoreVector>& score_table, RejectionCost cost,
                               MarginLoss loss, double tolerance = 1e-12);

/// Uniform draw from the simplex, optionally sharpened by raising the
/// exponential variates to `power` so that confident posteriors are common.
PosteriorSimplex random_simplex(std::size_t k, Rng& rng, double power = 1.0);

/// One row of the audit table.
struct AuditResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t skipped = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  std::string detail;

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

/// binary_three_way vs chow_rule on random (p, c); boundary ties skipped.
AuditResult audit_binary_three_way(std::size_t cases, std::uint64_t seed);

/// ensemble_chow and (for K = 2) binary_three_way vs chow_rule on random
/// (eta, c) with K drawn from [2, 6].
AuditResult audit_oracle_equivalence(std::size_t cases, std::uint64_t seed);

/// Componentwise conditional-risk minimizers decide like Chow's rule.
/// Draws keep every |eta_y - (1 - c)| above `margin`.
AuditResult audit_calibration(MarginLoss loss, std::size_t cases, std::uint64_t seed,
                              double margin = 0.02);

/// Finds a posterior on which a sign-flipped sigmoid loss (not
/// classification-calibrated) disagrees with Chow's rule. failures counts
/// the absence of such a witness.
AuditResult audit_uncalibrated_witness(std::uint64_t seed);

/// Random finite instances for the excess-risk chain; also checks the
/// psi-bounded form for squared and hinge.
struct ExcessChainAudit {
  AuditResult chain;
  AuditResult psi_squared;
  AuditResult psi_hinge;
  /// Violations of the psi-bounded form when psi_inverse is used for squared.
  std::size_t tabulated_squared_violations = 0;
};
ExcessChainAudit audit_excess_chain_random(std::size_t cases, std::uint64_t seed,
                                           std::size_t max_support = 5, std::size_t max_k = 4);

/// psi_inverse is zero at zero and non-decreasing on its domain.
AuditResult audit_psi_monotonicity(std::uint64_t seed);

/// Every audit, as run by `bench audit`.
std::vector<AuditResult> run_all_audits(std::uint64_t seed, bool quick = false);

}  // namespace csreject

#endif  // CSREJECT_THEORY_HPP_
