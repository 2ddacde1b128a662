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

#include "csreject/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace csreject {
namespace {

constexpr double kTieMargin = 1e-12;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double uniform_cost(Rng& rng, double lo = 1e-3, double hi = 0.5 - 1e-3) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Weighted 0-1 cost of one one-vs-rest verdict: A if the verdict is -1,
// B if it is +1.
double verdict_cost(double a, double b, double score) { return score > 0.0 ? b : a; }

}  // namespace

Decision chow_rule(const PosteriorSimplex& eta, RejectionCost cost) {
  if (eta.max() <= 1.0 - cost.value()) return Decision::reject(RejectReason::kOracle);
  const int k = static_cast<int>(eta.num_classes());
  return Decision::predict(Label(static_cast<int>(eta.argmax()) + 1, std::max(k, 2)));
}

int bayes_cs_binary(double p_pos, double alpha) {
  if (!(p_pos >= 0.0 && p_pos <= 1.0)) {
    throw std::invalid_argument("bayes_cs_binary: p_pos must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("bayes_cs_binary: alpha must lie in (0, 1)");
  }
  return p_pos > alpha ? +1 : -1;
}

Decision binary_three_way(double p_pos, RejectionCost cost) {
  const double c = cost.value();
  if (bayes_cs_binary(p_pos, 1.0 - c) == +1) return Decision::predict(Label::positive());
  if (bayes_cs_binary(p_pos, c) == -1) return Decision::predict(Label::negative());
  return Decision::reject(RejectReason::kOracle);
}

Decision ensemble_chow(const PosteriorSimplex& eta, RejectionCost cost) {
  const double alpha = 1.0 - cost.value();
  const int k = static_cast<int>(eta.num_classes());
  int positive = -1;
  for (int y = 0; y < k; ++y) {
    if (bayes_cs_binary(eta[static_cast<std::size_t>(y)], alpha) == +1) {
      if (positive >= 0) {
        throw std::logic_error("ensemble_chow: more than one positive verdict with c < 0.5");
      }
      positive = y;
    }
  }
  if (positive < 0) return Decision::reject(RejectReason::kOracle);
  return Decision::predict(Label(positive + 1, std::max(k, 2)));
}

double psi_inverse(MarginLoss loss, RejectionCost cost, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("psi_inverse: eps must be non-negative");
  const double c = cost.value();
  switch (loss) {
    case MarginLoss::kSquared: {
      const double denom = 2.0 * c * (1.0 - c) - eps * (1.0 - 2.0 * c);
      if (!(denom > 0.0)) {
        throw std::invalid_argument("psi_inverse: eps outside the squared-loss domain");
      }
      return eps * eps / denom;
    }
    case MarginLoss::kHinge:
      return eps;
    default:
      throw std::invalid_argument("psi_inverse: no closed form tabulated for loss '" +
                                  std::string(to_string(loss)) + "'");
  }
}

double calibration_psi(MarginLoss loss, RejectionCost cost, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("calibration_psi: theta must be >= 0");
  const double c = cost.value();
  switch (loss) {
    case MarginLoss::kSquared:
      return theta * theta / (2.0 * c * (1.0 - c) + theta * (1.0 - 2.0 * c));
    case MarginLoss::kHinge:
      return theta;
    default:
      throw std::invalid_argument("calibration_psi: unsupported loss '" +
                                  std::string(to_string(loss)) + "'");
  }
}

double calibration_psi_inverse(MarginLoss loss, RejectionCost cost, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("calibration_psi_inverse: eps must be >= 0");
  const double c = cost.value();
  switch (loss) {
    case MarginLoss::kSquared: {
      // Positive root of theta^2 - b eps theta - a eps = 0.
      const double a = 2.0 * c * (1.0 - c);
      const double b = 1.0 - 2.0 * c;
      return 0.5 * (b * eps + std::sqrt(b * b * eps * eps + 4.0 * a * eps));
    }
    case MarginLoss::kHinge:
      return eps;
    default:
      throw std::invalid_argument("calibration_psi_inverse: unsupported loss '" +
                                  std::string(to_string(loss)) + "'");
  }
}

double cs_zero_one_loss(RejectionCost cost, std::span<const double> g, Label y) {
  const double c = cost.value();
  double total = g[y.index()] <= 0.0 ? c : 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k != y.index() && g[k] > 0.0) total += 1.0 - c;
  }
  return total;
}

void FiniteDistribution::validate() const {
  if (support.empty()) throw std::invalid_argument("FiniteDistribution: empty support");
  double sum = 0.0;
  const std::size_t k = support.front().eta.num_classes();
  for (const auto& atom : support) {
    if (!(atom.weight >= 0.0)) throw std::invalid_argument("FiniteDistribution: negative weight");
    if (atom.eta.num_classes() != k) {
      throw std::invalid_argument("FiniteDistribution: inconsistent class counts");
    }
    sum += atom.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("FiniteDistribution: weights do not sum to one");
  }
}

std::size_t FiniteDistribution::num_classes() const {
  return support.empty() ? 0 : support.front().eta.num_classes();
}

ExcessChainReport audit_excess_chain(const FiniteDistribution& dist,
                                     const std::vector<ScoreVector>& score_table,
                                     RejectionCost cost, double tolerance) {
  dist.validate();
  if (score_table.size() != dist.support.size()) {
    throw std::invalid_argument("audit_excess_chain: score table does not match support");
  }
  const std::size_t k = dist.num_classes();
  const int ki = static_cast<int>(k);
  ExcessChainReport report;

  // Every verdict vector in {-1,+1}^K, encoded by the sign of a unit score.
  const std::size_t n_combos = std::size_t{1} << k;
  std::vector<double> candidate(k);

  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    const auto& atom = dist.support[i];
    const ScoreVector& g = score_table[i];
    if (g.size() != k) throw std::invalid_argument("audit_excess_chain: score length mismatch");

    const Decision f = decide(g);
    const Decision bayes = chow_rule(atom.eta, cost);
    double point_risk = 0.0;
    double point_bayes = 0.0;
    double point_cs = 0.0;
    for (int y = 1; y <= ki; ++y) {
      const Label label(y, ki);
      const double eta_y = atom.eta[static_cast<std::size_t>(y - 1)];
      point_risk += eta_y * zero_one_c_loss(f, label, cost);
      point_bayes += eta_y * zero_one_c_loss(bayes, label, cost);
      point_cs += eta_y * cs_zero_one_loss(cost, g, label);
    }

    double point_cs_min = std::numeric_limits<double>::infinity();
    for (std::size_t combo = 0; combo < n_combos; ++combo) {
      for (std::size_t j = 0; j < k; ++j) candidate[j] = (combo >> j) & 1U ? 1.0 : -1.0;
      double value = 0.0;
      for (int y = 1; y <= ki; ++y) {
        value += atom.eta[static_cast<std::size_t>(y - 1)] *
                 cs_zero_one_loss(cost, candidate, Label(y, ki));
      }
      point_cs_min = std::min(point_cs_min, value);
    }

    report.risk01c += atom.weight * point_risk;
    report.bayes_risk01c += atom.weight * point_bayes;
    report.cs01_risk += atom.weight * point_cs;
    report.cs01_min_risk += atom.weight * point_cs_min;
  }
  report.lhs = report.risk01c - report.bayes_risk01c;
  report.rhs = report.cs01_risk - report.cs01_min_risk;
  report.violated = report.lhs > report.rhs + tolerance;
  return report;
}

PsiBoundReport audit_psi_bound(const FiniteDistribution& dist,
                               const std::vector<ScoreVector>& score_table, RejectionCost cost,
                               MarginLoss loss, double tolerance) {
  dist.validate();
  if (score_table.size() != dist.support.size()) {
    throw std::invalid_argument("audit_psi_bound: score table does not match support");
  }
  const std::size_t k = dist.num_classes();
  const double c = cost.value();
  PsiBoundReport report;
  bool tabulated_ok = true;
  for (std::size_t cls = 0; cls < k; ++cls) {
    double regret01 = 0.0;
    double regret_phi = 0.0;
    for (std::size_t i = 0; i < dist.support.size(); ++i) {
      const auto& atom = dist.support[i];
      const double w_pos = atom.eta[cls] * c;
      const double w_neg = (1.0 - atom.eta[cls]) * (1.0 - c);
      const double v = score_table[i][cls];
      regret01 += atom.weight * (verdict_cost(w_pos, w_neg, v) - std::min(w_pos, w_neg));
      regret_phi += atom.weight * (weighted_conditional_risk(loss, w_pos, w_neg, v) -
                                   min_weighted_conditional_risk(loss, w_pos, w_neg));
    }
    regret_phi = std::max(0.0, regret_phi);
    report.cs01_regret += regret01;
    report.bound += calibration_psi_inverse(loss, cost, regret_phi);
    try {
      report.tabulated_bound += psi_inverse(loss, cost, regret_phi);
    } catch (const std::invalid_argument&) {
      tabulated_ok = false;
    }
  }
  report.violated = report.cs01_regret > report.bound + tolerance;
  if (!tabulated_ok) {
    report.tabulated_bound = std::numeric_limits<double>::quiet_NaN();
    report.tabulated_violated = false;
  } else {
    report.tabulated_violated = report.cs01_regret > report.tabulated_bound + tolerance;
  }
  return report;
}

PosteriorSimplex random_simplex(std::size_t k, Rng& rng, double power) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> eta(k);
  double sum = 0.0;
  for (auto& v : eta) {
    v = std::pow(expo(rng), power);
    sum += v;
  }
  for (auto& v : eta) v /= sum;
  // Renormalize once more so the sum is 1 to rounding.
  double s2 = 0.0;
  for (double v : eta) s2 += v;
  for (auto& v : eta) v /= s2;
  return PosteriorSimplex(std::move(eta));
}

AuditResult audit_binary_three_way(std::size_t cases, std::uint64_t seed) {
  Stopwatch watch;
  AuditResult result;
  result.name = "binary three-way rule == Chow (K=2)";
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < cases; ++i) {
    const RejectionCost cost(uniform_cost(rng));
    const double p = unit(rng);
    const double c = cost.value();
    if (std::abs(p - (1.0 - c)) < kTieMargin || std::abs(p - c) < kTieMargin) {
      ++result.skipped;
      continue;
    }
    ++result.cases;
    const Decision oracle = chow_rule(PosteriorSimplex({p, 1.0 - p}), cost);
    if (!same_outcome(binary_three_way(p, cost), oracle)) ++result.failures;
  }
  result.seconds = watch.seconds();
  return result;
}

AuditResult audit_oracle_equivalence(std::size_t cases, std::uint64_t seed) {
  Stopwatch watch;
  AuditResult result;
  result.name = "ensemble / three-way rule == Chow (K=2..6)";
  Rng rng(seed);
  std::uniform_int_distribution<int> pick_k(2, 6);
  std::uniform_int_distribution<int> pick_power(0, 2);
  constexpr double kPowers[] = {1.0, 2.0, 4.0};
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t k = static_cast<std::size_t>(pick_k(rng));
    const RejectionCost cost(uniform_cost(rng));
    const PosteriorSimplex eta = random_simplex(k, rng, kPowers[pick_power(rng)]);
    const double c = cost.value();
    bool tie = false;
    for (double v : eta.values()) {
      if (std::abs(v - (1.0 - c)) < kTieMargin || (k == 2 && std::abs(v - c) < kTieMargin)) {
        tie = true;
      }
    }
    if (tie) {
      ++result.skipped;
      continue;
    }
    ++result.cases;
    const Decision oracle = chow_rule(eta, cost);
    bool ok = same_outcome(ensemble_chow(eta, cost), oracle);
    if (k == 2) ok = ok && same_outcome(binary_three_way(eta[0], cost), oracle);
    if (!ok) ++result.failures;
  }
  result.seconds = watch.seconds();
  return result;
}

AuditResult audit_calibration(MarginLoss loss, std::size_t cases, std::uint64_t seed,
                              double margin) {
  Stopwatch watch;
  AuditResult result;
  result.name = "calibration: decide(g*) == Chow, " + std::string(to_string(loss));
  Rng rng(seed);
  std::uniform_int_distribution<int> pick_k(2, 5);
  std::uniform_int_distribution<int> pick_power(0, 2);
  constexpr double kPowers[] = {1.0, 2.0, 4.0};
  while (result.cases < cases) {
    const std::size_t k = static_cast<std::size_t>(pick_k(rng));
    const RejectionCost cost(uniform_cost(rng, 0.03, 0.47));
    const PosteriorSimplex eta = random_simplex(k, rng, kPowers[pick_power(rng)]);
    const double c = cost.value();
    bool near_boundary = false;
    for (double v : eta.values()) near_boundary |= std::abs(v - (1.0 - c)) <= margin;
    if (near_boundary) {
      ++result.skipped;
      continue;
    }
    ++result.cases;
    ScoreVector g(k);
    for (std::size_t y = 0; y < k; ++y) {
      g[y] = argmin_weighted_conditional_risk(loss, eta[y] * c, (1.0 - eta[y]) * (1.0 - c));
    }
    if (!same_outcome(decide(g), chow_rule(eta, cost))) ++result.failures;
  }
  result.seconds = watch.seconds();
  return result;
}

AuditResult audit_uncalibrated_witness(std::uint64_t seed) {
  Stopwatch watch;
  AuditResult result;
  result.name = "calibration converse: flipped sigmoid disagrees";
  Rng rng(seed);
  // phi(z) = 1 / (1 + exp(-z)) prefers the wrong sign everywhere.
  auto flipped = [](double z) { return phi_eval(MarginLoss::kSigmoid, -z); };
  bool found = false;
  std::size_t tried = 0;
  for (; tried < 1000 && !found; ++tried) {
    const std::size_t k = 2 + tried % 3;
    const RejectionCost cost(uniform_cost(rng, 0.05, 0.45));
    const PosteriorSimplex eta = random_simplex(k, rng, 3.0);
    const double c = cost.value();
    ScoreVector g(k);
    for (std::size_t y = 0; y < k; ++y) {
      g[y] = argmin_weighted_conditional_risk(flipped, eta[y] * c, (1.0 - eta[y]) * (1.0 - c));
    }
    found = !same_outcome(decide(g), chow_rule(eta, cost));
  }
  result.cases = tried;
  result.failures = found ? 0 : 1;
  result.detail = found ? "witness found" : "no witness";
  result.seconds = watch.seconds();
  return result;
}

ExcessChainAudit audit_excess_chain_random(std::size_t cases, std::uint64_t seed,
                                           std::size_t max_support, std::size_t max_k) {
  Stopwatch watch;
  ExcessChainAudit audit;
  audit.chain.name = "excess chain: 01c regret <= CS-01 regret";
  audit.psi_squared.name = "excess chain: psi bound, squared";
  audit.psi_hinge.name = "excess chain: psi bound, hinge";
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_n(1, max_support);
  std::uniform_int_distribution<std::size_t> pick_k(2, max_k);
  std::uniform_int_distribution<int> pick_mode(0, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kScales[] = {0.05, 0.5, 1.0, 3.0};

  double worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t n = pick_n(rng);
    const std::size_t k = pick_k(rng);
    const RejectionCost cost(uniform_cost(rng, 0.01, 0.49));
    const double c = cost.value();
    const PosteriorSimplex weights = random_simplex(n, rng);
    FiniteDistribution dist;
    std::vector<ScoreVector> scores;
    const int mode = pick_mode(rng);
    const double scale = kScales[pick_mode(rng)];
    for (std::size_t i = 0; i < n; ++i) {
      PosteriorSimplex eta = random_simplex(k, rng, unit(rng) < 0.5 ? 1.0 : 3.0);
      ScoreVector g(k);
      for (std::size_t y = 0; y < k; ++y) {
        const double optimal_sign = eta[y] > 1.0 - c ? 1.0 : -1.0;
        switch (mode) {
          case 0:  // unstructured
            g[y] = scale * normal(rng);
            break;
          case 1:  // Bayes verdicts with random magnitudes
            g[y] = optimal_sign * (0.01 + std::abs(normal(rng)) * scale);
            break;
          case 2:  // Bayes verdicts, some flipped
            g[y] = optimal_sign * (0.01 + std::abs(normal(rng)) * scale) *
                   (unit(rng) < 0.3 ? -1.0 : 1.0);
            break;
          default:  // near-zero scores
            g[y] = 1e-3 * normal(rng);
            break;
        }
        if (g[y] == 0.0) g[y] = 1e-9;
      }
      dist.support.push_back({static_cast<int>(i), std::move(eta), weights[i]});
      scores.push_back(std::move(g));
    }

    const ExcessChainReport chain = audit_excess_chain(dist, scores, cost);
    ++audit.chain.cases;
    if (chain.violated) ++audit.chain.failures;
    worst_gap = std::max(worst_gap, chain.lhs - chain.rhs);

    const PsiBoundReport sq = audit_psi_bound(dist, scores, cost, MarginLoss::kSquared);
    ++audit.psi_squared.cases;
    if (sq.violated) ++audit.psi_squared.failures;
    if (sq.tabulated_violated) ++audit.tabulated_squared_violations;
    if (chain.rhs > sq.cs01_regret + 1e-12 || chain.rhs < sq.cs01_regret - 1e-12) {
      // The CS-01 regret must split into the per-class regrets exactly.
      ++audit.psi_squared.failures;
    }

    const PsiBoundReport hi = audit_psi_bound(dist, scores, cost, MarginLoss::kHinge);
    ++audit.psi_hinge.cases;
    if (hi.violated) ++audit.psi_hinge.failures;
  }
  const double secs = watch.seconds();
  audit.chain.seconds = audit.psi_squared.seconds = audit.psi_hinge.seconds = secs;
  std::ostringstream os;
  os << "max(lhs - rhs) = " << worst_gap;
  audit.chain.detail = os.str();
  audit.psi_squared.detail =
      "tabulated-form violations: " + std::to_string(audit.tabulated_squared_violations);
  return audit;
}

AuditResult audit_psi_monotonicity(std::uint64_t seed) {
  Stopwatch watch;
  AuditResult result;
  result.name = "psi_inverse: zero at zero, non-decreasing";
  Rng rng(seed);
  for (MarginLoss loss : {MarginLoss::kSquared, MarginLoss::kHinge}) {
    for (int trial = 0; trial < 200; ++trial) {
      const RejectionCost cost(uniform_cost(rng));
      const double c = cost.value();
      ++result.cases;
      if (psi_inverse(loss, cost, 0.0) != 0.0) {
        ++result.failures;
        continue;
      }
      // Stay strictly inside the squared-loss domain.
      const double limit = loss == MarginLoss::kSquared
                               ? 0.999 * 2.0 * c * (1.0 - c) / (1.0 - 2.0 * c)
                               : 10.0;
      double prev = 0.0;
      for (int i = 1; i <= 200; ++i) {
        const double v = psi_inverse(loss, cost, limit * i / 200.0);
        if (v < prev) {
          ++result.failures;
          break;
        }
        prev = v;
      }
    }
  }
  result.seconds = watch.seconds();
  return result;
}

std::vector<AuditResult> run_all_audits(std::uint64_t seed, bool quick) {
  const std::size_t n_oracle = quick ? 10'000 : 100'000;
  const std::size_t n_calib = quick ? 100 : 1'000;
  const std::size_t n_chain = quick ? 1'000 : 10'000;
  std::vector<AuditResult> out;
  out.push_back(audit_binary_three_way(n_oracle, derive_seed(seed, 1)));
  out.push_back(audit_oracle_equivalence(n_oracle, derive_seed(seed, 2)));
  std::uint64_t stream = 10;
  for (MarginLoss loss : {MarginLoss::kSigmoid, MarginLoss::kHinge, MarginLoss::kSquared,
                          MarginLoss::kLogistic}) {
    out.push_back(audit_calibration(loss, n_calib, derive_seed(seed, stream++)));
  }
  out.push_back(audit_uncalibrated_witness(derive_seed(seed, 20)));
  ExcessChainAudit chain = audit_excess_chain_random(n_chain, derive_seed(seed, 30));
  out.push_back(chain.chain);
  out.push_back(chain.psi_squared);
  out.push_back(chain.psi_hinge);
  out.push_back(audit_psi_monotonicity(derive_seed(seed, 40)));
  return out;
}

}  // namespace csreject
