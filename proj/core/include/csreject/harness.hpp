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

// Experiment grid: methods x costs x trials on one or more datasets, with
// per-cell seeding, a bounded worker pool, and CSV emission.

#ifndef CSREJECT_HARNESS_HPP_
#define CSREJECT_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csreject/baselines.hpp"
#include "csreject/core.hpp"
#include "csreject/losses.hpp"
#include "csreject/models.hpp"

namespace csreject {

enum class Setting { kClean, kNoisy, kPU };

std::string_view to_string(Setting setting) noexcept;
Setting parse_setting(std::string_view name);

/// Method ids: "cs-<loss>" for every margin loss, "sce", "defer", "angle",
/// "reject" (always reject) and "chow" (posterior oracle; synthetic data only).
struct MethodId {
  enum class Kind { kCostSensitive, kSce, kDefer, kAngle, kAlwaysReject, kChow };

  Kind kind = Kind::kCostSensitive;
  MarginLoss loss = MarginLoss::kSigmoid;

  static MethodId parse(std::string_view name);
  std::string name() const;
};

/// Dataset ids: "twonorm" (7400 rows), "gauss3" (three planar Gaussians,
/// 7400 rows) and "csv:<path>" (header row, label in the column named by
/// GridSpec::csv_label_column).
bool is_synthetic_dataset(std::string_view id);

struct GridSpec {
  std::vector<std::string> datasets{"twonorm"};
  std::vector<std::string> methods{"cs-sigmoid"};
  std::vector<double> costs{0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  std::size_t trials = 10;
  Setting setting = Setting::kClean;
  std::uint64_t master_seed = 42;

  double noise_rate = 0.25;
  double prior = 0.7;
  std::string csv_label_column = "label";
  std::size_t synthetic_size = 7400;

  TrainConfig train{};
  std::size_t pu_batch_size = 64;
  std::size_t hidden_units = 64;
  /// Record wall-clock training time; off by default so rows are a pure
  /// function of the spec.
  bool record_timing = false;

  /// Throws std::invalid_argument on an empty axis, a cost outside (0, 0.5),
  /// zero trials, or an unknown method or dataset id.
  void validate() const;
};

/// Inclusive "lo:hi:step" range or a comma-separated list.
std::vector<double> parse_costs(std::string_view text);

struct Cell {
  std::string dataset;
  std::string method;
  double cost = 0.1;
  std::size_t trial = 0;
};

struct ResultRow {
  std::string dataset;
  std::string method;
  std::string setting;
  double cost = 0.0;
  std::size_t trial = 0;
  double risk01c = 0.0;
  double rejection_ratio = 0.0;
  double accepted_error = 0.0;
  std::size_t n_reject_distance = 0;
  std::size_t n_reject_ambiguity = 0;
  double train_seconds = 0.0;

  /// Non-finite training output; metrics are NaN.
  bool flagged() const noexcept;
};

struct CellOutcome {
  ResultRow row;
  MetricsRecord metrics;
  /// Validation tuning of SCE (temperature) or ANGLE (threshold).
  std::optional<TuningResult> tuning;
  std::string error;
};

/// Canonical enumeration: dataset, method, cost, trial (outer to inner).
std::vector<Cell> enumerate_cells(const GridSpec& grid);

/// Seed of the data draw for (dataset, trial); shared by every method and
/// cost so comparisons are paired.
std::uint64_t data_seed(const GridSpec& grid, const Cell& cell);
/// Seed of model initialization and mini-batch order.
std::uint64_t training_seed(const GridSpec& grid, const Cell& cell);

/// Generates and splits the data (50% train / 10% validation / 40% test),
/// applies the setting, trains the method and evaluates it on the test split.
/// Non-finite training output yields a flagged row rather than an exception.
CellOutcome run_cell_detailed(const GridSpec& grid, const Cell& cell);
ResultRow run_cell(const GridSpec& grid, const Cell& cell);

struct GridRun {
  std::vector<ResultRow> rows;       // canonical order
  std::vector<std::string> failures; // one entry per failed or flagged cell
};

struct RunOptions {
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 0;
  /// Rows already computed; matching cells are skipped and the rows kept.
  std::vector<ResultRow> existing;
};

GridRun run_grid(const GridSpec& grid, const RunOptions& options = {});

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct Summary {
  std::string dataset;
  std::string method;
  std::string setting;
  double cost = 0.0;
  std::size_t n = 0;
  MeanSe risk01c;
  MeanSe rejection_ratio;
  MeanSe accepted_error;
  MeanSe n_reject_distance;
  MeanSe n_reject_ambiguity;
  MeanSe train_seconds;
  /// Group of one row: the standard error is reported as 0.
  bool single_trial = false;
};

/// Mean and standard error (n - 1 denominator, divided by sqrt(n)).
MeanSe mean_se(std::span<const double> values);

/// One summary per (dataset, method, setting, cost), in first-seen order.
std::vector<Summary> aggregate(std::span<const ResultRow> rows);

void write_csv(std::span<const ResultRow> rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

/// `scale` multiplies risk, rejection ratio and accepted error (100 gives the
/// 0-100 presentation); stored rows are never rescaled.
void write_summary_csv(std::span<const Summary> summaries, const std::filesystem::path& path,
                       double scale = 1.0);

}  // namespace csreject

#endif  // CSREJECT_HARNESS_HPP_
