#pragma once

// Multi-seed experiment orchestration: arm comparisons with Mean / Var /
// Best-k aggregation, hyper-parameter grids, and beta sweeps.
//
// Reported scales: Mean and Best-k are F in percentage points, Var is the
// population variance of F in percentage points squared (raw variance on
// [0,1] times 1e4). Raw values are kept alongside.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "adascale/data.hpp"
#include "adascale/model.hpp"
#include "adascale/serialization.hpp"
#include "adascale/trainer.hpp"

namespace adascale {

struct GeneratedSource {
  GeneratorConfig generator;
  std::size_t n_dev = 2000;
  std::size_t n_test = 2000;
};

struct FileSource {
  std::string train;
  std::string dev;
  std::string test;
  std::optional<DataFormat> format;  // inferred from extension when absent
};

using DataSource = std::variant<GeneratedSource, FileSource>;

Splits load_splits(const DataSource& source);

/// One hyper-parameter axis. `parameter` is one of negative_cost, gamma,
/// beta, neg_to_pos_ratio, lr.
struct Grid {
  std::string parameter;
  std::vector<double> values;
};

/// Returns `base` with `parameter` set to `value`. Throws ArgumentError if
/// the parameter does not apply to the config's strategy or sampler.
TrainConfig apply_grid_value(const TrainConfig& base, const std::string& parameter, double value);

struct Arm {
  std::string name;
  TrainConfig train;
  std::optional<Grid> grid;
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  DataSource data = GeneratedSource{};
  Architecture model = MlpArch{};
  std::vector<Arm> arms;
  std::size_t n_seeds = 10;
  std::size_t best_k = 3;
  std::uint64_t base_seed = 0;
  std::vector<double> beta_sweep;
  std::string output_dir = "out";
  std::size_t workers = 1;

  void validate() const;
  /// Directory receiving this experiment's files: output_dir/experiment_id.
  std::string run_dir() const;
  std::vector<std::uint64_t> seeds() const;
  const Arm& arm(const std::string& name) const;
};

/// Parses an experiment document; see schemas/experiment_config.schema.json.
ExperimentConfig experiment_from_json(const Json& j);
ExperimentConfig load_experiment(const std::string& path);
Json to_json(const ExperimentConfig& c);

// ---------------------------------------------------------------------------
// Aggregation

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool valid = true;
  double dev_f = 0.0;
  EvalResult test;
};

struct Aggregate {
  std::size_t runs = 0;      // valid runs aggregated
  double mean_f = 0.0;       // [0,1]
  double var_f_raw = 0.0;    // population variance on [0,1]
  double best_k_f = 0.0;     // [0,1]
  double mean_precision = 0.0;
  double mean_recall = 0.0;

  double mean_pct() const { return 100.0 * mean_f; }
  double var_pct2() const { return 1e4 * var_f_raw; }
  double best_k_pct() const { return 100.0 * best_k_f; }
};

/// Among the `k` runs with the highest dev F (earlier position wins ties),
/// the maximum test F. Requires 1 <= k <= dev.size() == test.size().
double best_of_top_dev(std::span<const double> dev_f, std::span<const double> test_f,
                       std::size_t k);

double mean(std::span<const double> xs);
double population_variance(std::span<const double> xs);

/// Aggregates valid outcomes; invalid ones are skipped. Best-k uses
/// min(best_k, valid runs).
Aggregate aggregate(std::span<const SeedOutcome> outcomes, std::size_t best_k);

// ---------------------------------------------------------------------------
// Experiments

struct GridCell {
  double value = 0.0;
  double mean_dev_f = 0.0;
  std::vector<SeedOutcome> runs;
};

struct GridResult {
  std::string parameter;  // empty for a single implicit cell
  std::vector<GridCell> cells;
  std::size_t best = 0;
};

struct ArmSummary {
  std::string name;
  Json strategy;
  Json sampler;
  std::size_t grid_size = 1;
  std::optional<double> selected_value;
  GridResult grid;
  std::vector<SeedOutcome> runs;  // the selected cell's runs
  Aggregate aggregate;
  std::vector<std::uint64_t> invalid_seeds;
};

struct SweepRow {
  double beta = 1.0;
  std::size_t runs = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double std_precision = 0.0;
  double std_recall = 0.0;
  double std_f1 = 0.0;
};

struct ComparisonReport {
  std::string experiment_id;
  std::size_t n_seeds = 0;
  std::size_t best_k = 0;
  std::vector<ArmSummary> arms;
  std::vector<SweepRow> sweep;
  std::vector<std::string> invalid_runs;  // file names of aborted runs

  bool all_valid() const { return invalid_runs.empty(); }
  const ArmSummary& arm(const std::string& name) const;
};

Json to_json(const ComparisonReport& r);

struct RunOptions {
  bool persist = true;         // write run files and tables under config.run_dir()
  bool include_sweep = false;  // run_experiment also runs the beta sweep
};

/// Trains every arm (every grid cell of gridded arms) on every seed, persists
/// each run, then aggregates. Gridded arms report their best cell by mean
/// dev F.
ComparisonReport run_experiment(const ExperimentConfig& config, RunOptions options = {});

/// Grid search for one arm: each cell scored by mean dev F over the seeds.
/// Ties go to the first cell in declared order. An arm without a grid is a
/// single cell.
GridResult grid_search(const Arm& arm, const ExperimentConfig& config, RunOptions options = {});

/// Trains Adaptive(beta) for each beta in `config.beta_sweep`, using the
/// first Adaptive arm's settings, with dev selection on the matching
/// F-beta. Reports test precision, recall and F1.
std::vector<SweepRow> beta_sweep(const ExperimentConfig& config, RunOptions options = {});

// ---------------------------------------------------------------------------
// Files

/// "run_<arm>_<seed>.json" with the arm name made filesystem-safe.
std::string run_file_name(const std::string& arm, std::uint64_t seed);

/// Run document: the report plus experiment id, arm, role and protocol.
Json run_document(const std::string& experiment_id, const std::string& arm,
                  const std::string& role, const TrainConfig& config,
                  const Architecture& model, const RunReport& report, std::size_t n_seeds,
                  std::size_t best_k);

/// Writes `j` as pretty JSON with a trailing newline.
void write_json(const Json& j, const std::string& path);

std::string comparison_csv(const ComparisonReport& r);
std::string per_seed_csv(const ComparisonReport& r);
std::string sweep_csv(std::span<const SweepRow> rows);
std::string grid_csv(const GridResult& g);

/// Shortest round-trip decimal form of `v`.
std::string format_number(double v);

}  // namespace adascale
