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

#include "csreject/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "csreject/data.hpp"
#include "csreject/surrogate.hpp"
#include "csreject/theory.hpp"
#include "csreject/weaksup.hpp"

namespace csreject {
namespace {

constexpr const char* kRowHeader =
    "dataset,method,setting,cost,trial,risk01c,rejection_ratio,accepted_error,"
    "n_reject_distance,n_reject_ambiguity,train_seconds";

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a count: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string cell_key(std::string_view dataset, std::string_view method, std::string_view setting,
                     double cost, std::size_t trial) {
  std::string key(dataset);
  key += '|';
  key += method;
  key += '|';
  key += setting;
  key += '|';
  key += format_double(cost);
  key += '|';
  key += std::to_string(trial);
  return key;
}

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
  Dataset test_raw;
  std::optional<PosteriorOracle> oracle;
};

Splits prepare_data(const GridSpec& grid, const Cell& cell) {
  const std::uint64_t seed = data_seed(grid, cell);
  Rng rng(derive_seed(seed, 0));
  std::optional<GeneratedData> generated;
  Dataset full(1, 2);
  if (cell.dataset == "twonorm") {
    generated.emplace(gen_twonorm(grid.synthetic_size, rng));
    full = generated->data;
  } else if (cell.dataset == "gauss3") {
    generated.emplace(gen_gauss_mixture(planar_mixture_spec(3, 2.0, 1.0), grid.synthetic_size, rng));
    full = generated->data;
  } else if (cell.dataset.starts_with("csv:")) {
    full = load_csv(cell.dataset.substr(4), LabelColumn{grid.csv_label_column}, true);
  } else {
    throw std::invalid_argument("unknown dataset id '" + cell.dataset + "'");
  }

  const double fractions[] = {0.5, 0.1, 0.4};
  std::vector<Dataset> parts = split(full, fractions, derive_seed(seed, 1));
  auto [transform, train] = standardize(parts[0]);
  Splits s{std::move(train), transform.apply(parts[1]), transform.apply(parts[2]),
           std::move(parts[2]), std::nullopt};
  if (generated) s.oracle.emplace(generated->oracle);
  if (grid.setting == Setting::kNoisy) {
    Rng noise_rng(derive_seed(seed, 2));
    s.train = inject_uniform_noise(s.train, grid.noise_rate, noise_rng);
    s.val = inject_uniform_noise(s.val, grid.noise_rate, noise_rng);
  }
  return s;
}

std::size_t output_width(const MethodId& method, int k) {
  switch (method.kind) {
    case MethodId::Kind::kDefer:
      return static_cast<std::size_t>(k) + 1;
    case MethodId::Kind::kAngle:
      return static_cast<std::size_t>(k) - 1;
    default:
      return static_cast<std::size_t>(k);
  }
}

std::vector<Decision> decide_all(const Dataset& data, const std::function<Decision(std::span<const double>)>& rule) {
  std::vector<Decision> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(rule(data.features(i)));
  return out;
}

}  // namespace

std::string_view to_string(Setting setting) noexcept {
  switch (setting) {
    case Setting::kClean:
      return "clean";
    case Setting::kNoisy:
      return "noisy";
    case Setting::kPU:
      return "pu";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  if (name == "clean") return Setting::kClean;
  if (name == "noisy") return Setting::kNoisy;
  if (name == "pu") return Setting::kPU;
  throw std::invalid_argument("unknown setting '" + std::string(name) + "'");
}

MethodId MethodId::parse(std::string_view name) {
  MethodId id;
  if (name.starts_with("cs-")) {
    id.kind = Kind::kCostSensitive;
    id.loss = parse_margin_loss(name.substr(3));
  } else if (name == "sce") {
    id.kind = Kind::kSce;
  } else if (name == "defer") {
    id.kind = Kind::kDefer;
  } else if (name == "angle") {
    id.kind = Kind::kAngle;
  } else if (name == "reject") {
    id.kind = Kind::kAlwaysReject;
  } else if (name == "chow") {
    id.kind = Kind::kChow;
  } else {
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
  }
  return id;
}

std::string MethodId::name() const {
  switch (kind) {
    case Kind::kCostSensitive:
      return "cs-" + std::string(to_string(loss));
    case Kind::kSce:
      return "sce";
    case Kind::kDefer:
      return "defer";
    case Kind::kAngle:
      return "angle";
    case Kind::kAlwaysReject:
      return "reject";
    case Kind::kChow:
      return "chow";
  }
  return "?";
}

bool is_synthetic_dataset(std::string_view id) { return id == "twonorm" || id == "gauss3"; }

void GridSpec::validate() const {
  if (datasets.empty() || methods.empty() || costs.empty()) {
    throw std::invalid_argument("grid: datasets, methods and costs must be non-empty");
  }
  if (trials < 1) throw std::invalid_argument("grid: trials must be >= 1");
  for (double c : costs) RejectionCost{c};
  for (const auto& d : datasets) {
    if (!is_synthetic_dataset(d) && !d.starts_with("csv:")) {
      throw std::invalid_argument("grid: unknown dataset id '" + d + "'");
    }
  }
  for (const auto& m : methods) {
    const MethodId id = MethodId::parse(m);
    if (id.kind == MethodId::Kind::kChow) {
      for (const auto& d : datasets) {
        if (!is_synthetic_dataset(d)) {
          throw std::invalid_argument("grid: method 'chow' needs a synthetic dataset");
        }
      }
    }
  }
  if (setting == Setting::kNoisy && !(noise_rate >= 0.0 && noise_rate < 1.0)) {
    throw std::invalid_argument("grid: noise rate must lie in [0, 1)");
  }
  if (setting == Setting::kPU && !(prior > 0.0 && prior < 1.0)) {
    throw std::invalid_argument("grid: prior must lie in (0, 1)");
  }
}

std::vector<double> parse_costs(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto f = split_fields(text, ':');
    if (f.size() != 3) throw std::invalid_argument("costs: expected lo:hi:step");
    const double lo = parse_double(f[0]);
    const double hi = parse_double(f[1]);
    const double step = parse_double(f[2]);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("costs: bad range");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
      // Round to the printed precision so 0.1 + 2 * 0.05 is exactly 0.2.
      out.push_back(parse_double(format_double(lo + static_cast<double>(i) * step)));
    }
  } else {
    for (auto f : split_fields(text, ',')) out.push_back(parse_double(f));
  }
  return out;
}

bool ResultRow::flagged() const noexcept {
  return !std::isfinite(risk01c) || !std::isfinite(rejection_ratio) ||
         !std::isfinite(accepted_error);
}

std::vector<Cell> enumerate_cells(const GridSpec& grid) {
  std::vector<Cell> cells;
  for (const auto& d : grid.datasets) {
    for (const auto& m : grid.methods) {
      for (double c : grid.costs) {
        for (std::size_t t = 0; t < grid.trials; ++t) cells.push_back({d, m, c, t});
      }
    }
  }
  return cells;
}

std::uint64_t data_seed(const GridSpec& grid, const Cell& cell) {
  return derive_seed(derive_seed(grid.master_seed, fnv1a(cell.dataset)), cell.trial);
}

std::uint64_t training_seed(const GridSpec& grid, const Cell& cell) {
  const std::string key = cell.method + '|' + format_double(cell.cost);
  return derive_seed(data_seed(grid, cell), fnv1a(key));
}

CellOutcome run_cell_detailed(const GridSpec& grid, const Cell& cell) {
  const MethodId method = MethodId::parse(cell.method);
  const RejectionCost cost(cell.cost);
  const Splits s = prepare_data(grid, cell);
  const int k = s.train.num_classes();

  CellOutcome out;
  out.row.dataset = cell.dataset;
  out.row.method = method.name();
  out.row.setting = std::string(to_string(grid.setting));
  out.row.cost = cell.cost;
  out.row.trial = cell.trial;

  std::vector<Decision> decisions;
  bool non_finite = false;
  double seconds = 0.0;

  if (method.kind == MethodId::Kind::kAlwaysReject) {
    decisions.assign(s.test.size(), Decision::reject(RejectReason::kOracle));
  } else if (method.kind == MethodId::Kind::kChow) {
    if (!s.oracle) throw std::invalid_argument("method 'chow' needs a synthetic dataset");
    decisions = decide_all(s.test_raw, [&](std::span<const double> x) {
      return chow_rule((*s.oracle)(x), cost);
    });
  } else {
    const std::uint64_t seed = training_seed(grid, cell);
    Rng init_rng(derive_seed(seed, 0));
    const ModelKind kind = k == 2 ? ModelKind::kLinear : ModelKind::kMlp;
    Model model = kind == ModelKind::kLinear
                      ? Model(LinearModel::random(s.train.dim(), output_width(method, k), init_rng))
                      : Model(MlpModel::random(s.train.dim(), output_width(method, k), init_rng,
                                               grid.hidden_units));
    const AngleConfig angle = method.kind == MethodId::Kind::kAngle
                                  ? AngleConfig::for_cost(cost, k)
                                  : AngleConfig(std::max(k, 2), 1.0);

    LossGradFn objective;
    switch (method.kind) {
      case MethodId::Kind::kCostSensitive:
        objective = [loss = method.loss, cost](std::span<const double> g, Label y,
                                               std::span<double> grad) {
          return cs_surrogate_loss_grad(loss, cost, g, y, grad, true);
        };
        break;
      case MethodId::Kind::kSce:
        objective = [](std::span<const double> g, Label y, std::span<double> grad) {
          return sce_loss_grad(g, y, grad);
        };
        break;
      case MethodId::Kind::kDefer:
        objective = [cost](std::span<const double> g, Label y, std::span<double> grad) {
          return defer_loss_grad(g, y, cost, grad);
        };
        break;
      case MethodId::Kind::kAngle:
        objective = [&angle](std::span<const double> g, Label y, std::span<double> grad) {
          return angle_loss_grad(g, y, angle, grad);
        };
        break;
      default:
        break;
    }

    TrainConfig config = grid.train;
    config.seed = derive_seed(seed, 1);
    config.track_risk = false;
    const auto start = std::chrono::steady_clock::now();
    if (grid.setting == Setting::kPU) {
      if (k != 2) throw std::invalid_argument("the PU setting requires a binary dataset");
      const std::size_t n_pos = static_cast<std::size_t>(
          std::count(s.train.labels().begin(), s.train.labels().end(), 1));
      const PUConfig pu_config =
          PUConfig::for_source(s.train.size(), n_pos, s.train.size() - n_pos, grid.prior);
      Rng pu_rng(derive_seed(data_seed(grid, cell), 3));
      const PUDataset pu = make_pu_dataset(s.train, pu_config, pu_rng);
      config.batch_size = grid.pu_batch_size;
      non_finite = train_pu(model, pu, grid.prior, objective, config).non_finite;
    } else {
      non_finite = train(model, s.train, objective, config).non_finite;
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    switch (method.kind) {
      case MethodId::Kind::kSce: {
        out.tuning = tune_temperature(model, s.val, cost, default_candidates());
        const double t = out.tuning->value;
        decisions = decide_all(s.test, [&](std::span<const double> x) {
          return sce_decide(forward(model, x), t, cost);
        });
        break;
      }
      case MethodId::Kind::kDefer:
        decisions = decide_all(s.test, [&](std::span<const double> x) {
          return defer_decide(forward(model, x));
        });
        break;
      case MethodId::Kind::kAngle: {
        out.tuning = tune_delta(model, s.val, cost, angle, default_delta_candidates());
        AngleConfig tuned = angle;
        tuned.threshold = out.tuning->value;
        decisions = decide_all(s.test, [&](std::span<const double> x) {
          return angle_decide(forward(model, x), tuned);
        });
        break;
      }
      default:
        decisions = decide_all(s.test, [&](std::span<const double> x) {
          return decide(forward(model, x));
        });
        break;
    }
  }

  std::vector<Label> labels;
  labels.reserve(s.test.size());
  for (std::size_t i = 0; i < s.test.size(); ++i) labels.push_back(s.test.label(i));
  out.metrics = compute_metrics(decisions, labels, cost);

  if (non_finite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.row.risk01c = out.row.rejection_ratio = out.row.accepted_error = nan;
    out.error = "non-finite training output";
  } else {
    out.row.risk01c = out.metrics.risk01c;
    out.row.rejection_ratio = out.metrics.rejection_ratio;
    out.row.accepted_error = out.metrics.accepted_error;
  }
  out.row.n_reject_distance = out.metrics.n_reject_distance;
  out.row.n_reject_ambiguity = out.metrics.n_reject_ambiguity;
  out.row.train_seconds = grid.record_timing ? seconds : 0.0;
  return out;
}

ResultRow run_cell(const GridSpec& grid, const Cell& cell) {
  return run_cell_detailed(grid, cell).row;
}

GridRun run_grid(const GridSpec& grid, const RunOptions& options) {
  grid.validate();
  const std::vector<Cell> cells = enumerate_cells(grid);
  const std::string setting(to_string(grid.setting));

  std::map<std::string, ResultRow> known;
  for (const auto& row : options.existing) {
    known.emplace(cell_key(row.dataset, MethodId::parse(row.method).name(), row.setting, row.cost,
                           row.trial),
                  row);
  }

  std::vector<std::optional<ResultRow>> slots(cells.size());
  std::vector<std::string> errors(cells.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto it = known.find(cell_key(cells[i].dataset, MethodId::parse(cells[i].method).name(),
                                        setting, cells[i].cost, cells[i].trial));
    if (it != known.end()) {
      slots[i] = it->second;
    } else {
      pending.push_back(i);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < pending.size(); j = next++) {
      const std::size_t i = pending[j];
      try {
        CellOutcome outcome = run_cell_detailed(grid, cells[i]);
        errors[i] = std::move(outcome.error);
        slots[i] = std::move(outcome.row);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(pending.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  GridRun run;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (slots[i]) {
      if (slots[i]->flagged() && errors[i].empty()) errors[i] = "flagged row";
      run.rows.push_back(std::move(*slots[i]));
    }
    if (!errors[i].empty()) {
      run.failures.push_back(cell_key(cells[i].dataset, cells[i].method, setting, cells[i].cost,
                                      cells[i].trial) +
                             ": " + errors[i]);
    }
  }
  return run;
}

MeanSe mean_se(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_se: empty input");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; })) {
    return {values[0], 0.0};
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::vector<Summary> aggregate(std::span<const ResultRow> rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ResultRow*>> groups;
  for (const auto& row : rows) {
    std::string key = row.dataset + '|' + row.method + '|' + row.setting + '|' + format_double(row.cost);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  std::vector<Summary> out;
  for (const auto& key : order) {
    const auto& group = groups[key];
    Summary s;
    s.dataset = group.front()->dataset;
    s.method = group.front()->method;
    s.setting = group.front()->setting;
    s.cost = group.front()->cost;
    s.n = group.size();
    s.single_trial = group.size() == 1;
    auto column = [&](auto field) {
      std::vector<double> v;
      for (const ResultRow* r : group) v.push_back(static_cast<double>(r->*field));
      return mean_se(v);
    };
    s.risk01c = column(&ResultRow::risk01c);
    s.rejection_ratio = column(&ResultRow::rejection_ratio);
    s.accepted_error = column(&ResultRow::accepted_error);
    s.n_reject_distance = column(&ResultRow::n_reject_distance);
    s.n_reject_ambiguity = column(&ResultRow::n_reject_ambiguity);
    s.train_seconds = column(&ResultRow::train_seconds);
    out.push_back(std::move(s));
  }
  return out;
}

void write_csv(std::span<const ResultRow> rows, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os << kRowHeader << '\n';
  for (const auto& r : rows) {
    os << r.dataset << ',' << r.method << ',' << r.setting << ',' << format_double(r.cost) << ','
       << r.trial << ',' << format_double(r.risk01c) << ',' << format_double(r.rejection_ratio)
       << ',' << format_double(r.accepted_error) << ',' << r.n_reject_distance << ','
       << r.n_reject_ambiguity << ',' << format_double(r.train_seconds) << '\n';
  }
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(is, line) || line != kRowHeader) {
    throw std::runtime_error("'" + path.string() + "': missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 11) {
      throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) +
                               ": expected 11 fields");
    }
    try {
      ResultRow r;
      r.dataset = f[0];
      r.method = f[1];
      r.setting = f[2];
      r.cost = parse_double(f[3]);
      r.trial = parse_size(f[4]);
      r.risk01c = parse_double(f[5]);
      r.rejection_ratio = parse_double(f[6]);
      r.accepted_error = parse_double(f[7]);
      r.n_reject_distance = parse_size(f[8]);
      r.n_reject_ambiguity = parse_size(f[9]);
      r.train_seconds = parse_double(f[10]);
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return rows;
}

void write_summary_csv(std::span<const Summary> summaries, const std::filesystem::path& path,
                       double scale) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os << "dataset,method,setting,cost,n,risk01c_mean,risk01c_se,rejection_ratio_mean,"
        "rejection_ratio_se,accepted_error_mean,accepted_error_se,n_reject_distance_mean,"
        "n_reject_ambiguity_mean,train_seconds_mean,single_trial\n";
  for (const auto& s : summaries) {
    os << s.dataset << ',' << s.method << ',' << s.setting << ',' << format_double(s.cost) << ','
       << s.n << ',' << format_double(scale * s.risk01c.mean) << ','
       << format_double(scale * s.risk01c.se) << ',' << format_double(scale * s.rejection_ratio.mean)
       << ',' << format_double(scale * s.rejection_ratio.se) << ','
       << format_double(scale * s.accepted_error.mean) << ','
       << format_double(scale * s.accepted_error.se) << ','
       << format_double(s.n_reject_distance.mean) << ','
       << format_double(s.n_reject_ambiguity.mean) << ',' << format_double(s.train_seconds.mean)
       << ',' << (s.single_trial ? 1 : 0) << '\n';
  }
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace csreject
