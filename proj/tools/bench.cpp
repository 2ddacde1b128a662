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

// bench: experiment grid runner, aggregation and self-checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csreject/csreject.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_command(csreject::GridSpec grid, const std::string& datasets, const std::string& methods,
                const std::string& setting, const std::string& costs, const std::string& out,
                bool resume, std::size_t threads) {
  grid.datasets = split_list(datasets);
  grid.methods = split_list(methods);
  grid.setting = csreject::parse_setting(setting);
  grid.costs = csreject::parse_costs(costs);
  grid.validate();

  csreject::RunOptions options;
  options.threads = threads;
  if (resume && std::filesystem::exists(out)) options.existing = csreject::read_csv(out);

  const csreject::GridRun run = csreject::run_grid(grid, options);
  csreject::write_csv(run.rows, out);
  std::cerr << run.rows.size() << " rows written to " << out << '\n';
  for (const auto& f : run.failures) std::cerr << "FLAGGED " << f << '\n';
  return run.failures.empty() ? 0 : 1;
}

int aggregate_command(const std::string& in, const std::string& out, double scale) {
  const auto rows = csreject::read_csv(in);
  if (rows.empty()) {
    std::cerr << in << ": no rows\n";
    return 1;
  }
  const auto summaries = csreject::aggregate(rows);
  csreject::write_summary_csv(summaries, out, scale);
  int flagged = 0;
  for (const auto& row : rows) flagged += row.flagged() ? 1 : 0;
  std::cerr << summaries.size() << " groups written to " << out << '\n';
  return flagged == 0 ? 0 : 1;
}

int audit_command(std::uint64_t seed, bool quick) {
  bool ok = true;
  for (const auto& r : csreject::run_all_audits(seed, quick)) {
    std::printf("%-4s %-56s cases=%-7zu skipped=%-5zu failures=%-4zu %.2fs %s\n",
                r.passed() ? "ok" : "FAIL", r.name.c_str(), r.cases, r.skipped, r.failures,
                r.seconds, r.detail.c_str());
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

int gradcheck_command(std::uint64_t seed, std::size_t samples) {
  bool ok = true;
  for (const auto& r : csreject::run_gradient_suite(seed, samples)) {
    std::printf("%-4s %-28s checks=%-6zu skipped=%-4zu max_rel_err=%.3g\n",
                r.passed() ? "ok" : "FAIL", r.name.c_str(), r.checks, r.skipped,
                r.max_rel_error);
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classification with rejection: experiment grid and self-checks"};
  app.require_subcommand(1);

  csreject::GridSpec grid;
  std::string datasets = "twonorm";
  std::string methods = "cs-sigmoid";
  std::string setting = "clean";
  std::string costs = "0.1:0.4:0.05";
  std::string out = "results.csv";
  bool resume = false;
  std::size_t threads = 0;
  auto* run = app.add_subcommand("run", "Run a methods x costs x trials grid");
  run->add_option("--dataset", datasets, "twonorm, gauss3 or csv:<path> (comma-separated)");
  run->add_option("--methods", methods, "cs-<loss>, sce, defer, angle, reject, chow");
  run->add_option("--setting", setting, "clean, noisy or pu")
      ->check(CLI::IsMember({"clean", "noisy", "pu"}));
  run->add_option("--costs", costs, "lo:hi:step or a comma-separated list");
  run->add_option("--trials", grid.trials)->check(CLI::PositiveNumber);
  run->add_option("--seed", grid.master_seed);
  run->add_option("--out", out);
  run->add_option("--noise-rate", grid.noise_rate)->check(CLI::Range(0.0, 0.999));
  run->add_option("--prior", grid.prior)->check(CLI::Range(0.001, 0.999));
  run->add_option("--label-column", grid.csv_label_column, "label column name for csv datasets");
  run->add_option("--epochs", grid.train.epochs);
  run->add_option("--lr", grid.train.learning_rate);
  run->add_option("--batch-size", grid.train.batch_size);
  run->add_option("--threads", threads, "0 = hardware concurrency");
  run->add_flag("--resume", resume, "keep rows already present in --out");
  run->add_flag("--timing", grid.record_timing, "record train_seconds");

  std::string agg_in = "results.csv";
  std::string agg_out = "summary.csv";
  double scale = 1.0;
  auto* agg = app.add_subcommand("aggregate", "Mean and standard error per cell group");
  agg->add_option("--in", agg_in)->required();
  agg->add_option("--out", agg_out)->required();
  agg->add_option("--scale", scale, "presentation factor, e.g. 100");

  std::uint64_t seed = 2026;
  bool quick = false;
  auto* audit = app.add_subcommand("audit", "Randomized checks of the decision theory");
  audit->add_option("--seed", seed);
  audit->add_flag("--quick", quick, "smaller case counts");

  std::size_t samples = 200;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  grad->add_option("--seed", seed);
  grad->add_option("--samples", samples);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(grid, datasets, methods, setting, costs, out, resume, threads);
    if (*agg) return aggregate_command(agg_in, agg_out, scale);
    if (*audit) return audit_command(seed, quick);
    if (*grad) return gradcheck_command(seed, samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
