#include "adascale/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "adascale/errors.hpp"

namespace adascale {

namespace fs = std::filesystem;

namespace {

std::string safe_name(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    if (!ok) c = '-';
  }
  return out;
}

// Runs `count` independent jobs on up to `workers` threads. Results land at
// their job index so the outcome does not depend on scheduling.
template <class Result>
std::vector<Result> run_parallel(std::size_t count, std::size_t workers,
                                 const std::function<Result(std::size_t)>& job) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

SeedOutcome outcome_of(const RunReport& r) {
  return {r.seed, r.valid, r.best_dev_f, r.test};
}

struct Job {
  std::string arm;   // file-level arm label
  std::string role;  // arm | grid_cell | sweep
  TrainConfig config;
  Json extra;  // merged into the run document
};

struct JobResult {
  RunReport report;
};

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path);
  out << text;
}

// Executes jobs, persists each run document, returns reports in job order.
std::vector<RunReport> execute(const std::vector<Job>& jobs, const Splits& splits,
                               const ExperimentConfig& config, RunOptions options) {
  auto reports = run_parallel<RunReport>(jobs.size(), config.workers, [&](std::size_t i) {
    return train(splits.train, splits.dev, splits.test, config.model, jobs[i].config).report;
  });
  if (options.persist) {
    const fs::path runs = fs::path(config.run_dir()) / "runs";
    fs::create_directories(runs);
    const fs::path timings_path = fs::path(config.run_dir()) / "timings.csv";
    std::ostringstream timings;
    if (!fs::exists(timings_path) || fs::file_size(timings_path) == 0) {
      timings << "arm,seed,wall_clock_seconds\n";
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      Json doc = run_document(config.experiment_id, jobs[i].arm, jobs[i].role, jobs[i].config,
                              config.model, reports[i], config.n_seeds, config.best_k);
      for (const auto& [key, value] : jobs[i].extra.items()) doc[key] = value;
      write_json(doc, (runs / run_file_name(jobs[i].arm, reports[i].seed)).string());
      timings << jobs[i].arm << ',' << reports[i].seed << ','
              << format_number(reports[i].wall_clock_seconds) << '\n';
    }
    // Wall-clock is the one non-reproducible output; it lives apart from the
    // run documents.
    std::ofstream(timings_path, std::ios::app) << timings.str();
  }
  return reports;
}

std::string cell_label(const std::string& arm, std::size_t cell) {
  return arm + "-cell" + std::to_string(cell);
}

Json grid_json(const ArmSummary& a) {
  Json cells = Json::array();
  for (const auto& c : a.grid.cells) {
    cells.push_back({{"value", c.value}, {"mean_dev_f", c.mean_dev_f}});
  }
  Json g = {{"parameter", a.grid.parameter}, {"size", a.grid_size}, {"cells", cells}};
  g["selected_value"] = a.selected_value ? Json(*a.selected_value) : Json(nullptr);
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Splits load_splits(const DataSource& source) {
  if (const auto* gen = std::get_if<GeneratedSource>(&source)) {
    return generate_splits(gen->generator, gen->n_dev, gen->n_test);
  }
  const auto& files = std::get<FileSource>(source);
  auto fmt = [&](const std::string& path) { return files.format.value_or(format_from_path(path)); };
  Splits s{load(files.train, fmt(files.train)), load(files.dev, fmt(files.dev)),
           load(files.test, fmt(files.test))};
  const std::size_t k = std::max({s.train.k, s.dev.k, s.test.k});
  s.train.k = s.dev.k = s.test.k = k;
  return s;
}

TrainConfig apply_grid_value(const TrainConfig& base, const std::string& parameter, double value) {
  TrainConfig c = base;
  auto mismatch = [&](const char* needs) {
    throw ArgumentError("grid parameter '" + parameter + "' needs " + needs);
  };
  if (parameter == "negative_cost") {
    if (!std::holds_alternative<strategy::Static>(c.strategy)) mismatch("a static strategy");
    c.strategy = strategy::Static{value};
  } else if (parameter == "gamma") {
    if (!std::holds_alternative<strategy::Focal>(c.strategy)) mismatch("a focal strategy");
    c.strategy = strategy::Focal{value};
  } else if (parameter == "beta") {
    if (!std::holds_alternative<strategy::Adaptive>(c.strategy)) mismatch("an adaptive strategy");
    c.strategy = strategy::Adaptive{Beta(value)};
  } else if (parameter == "neg_to_pos_ratio") {
    if (!std::holds_alternative<sampler::UnderSample>(c.sampler)) mismatch("an undersample sampler");
    c.sampler = sampler::UnderSample{value};
  } else if (parameter == "lr") {
    std::visit([&](auto& o) { o.lr = value; }, c.optimizer);
  } else {
    throw ArgumentError("unknown grid parameter '" + parameter + "'");
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (experiment_id.empty()) throw ArgumentError("experiment_id must not be empty");
  if (n_seeds < 1) throw ArgumentError("n_seeds must be >= 1");
  if (best_k < 1 || best_k > n_seeds) throw ArgumentError("best_k must lie in [1, n_seeds]");
  if (workers < 1) throw ArgumentError("workers must be >= 1");
  std::set<std::string> names;
  for (const Arm& a : arms) {
    if (a.name.empty()) throw ArgumentError("arm names must not be empty");
    if (!names.insert(safe_name(a.name)).second) {
      throw ArgumentError("duplicate arm name '" + a.name + "'");
    }
    a.train.validate();
    if (a.grid) {
      if (a.grid->values.empty()) throw ArgumentError("grid for arm '" + a.name + "' is empty");
      for (double v : a.grid->values) apply_grid_value(a.train, a.grid->parameter, v);
    }
  }
  for (double b : beta_sweep) Beta{b};
}

std::string ExperimentConfig::run_dir() const {
  return (fs::path(output_dir) / safe_name(experiment_id)).string();
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i) out[i] = base_seed + i;
  return out;
}

const Arm& ExperimentConfig::arm(const std::string& name) const {
  for (const Arm& a : arms) {
    if (a.name == name) return a;
  }
  throw ArgumentError("no arm named '" + name + "'");
}

ExperimentConfig experiment_from_json(const Json& j) {
  require_known_keys(j,
                     {"experiment_id", "data", "model", "train", "arms", "n_seeds", "best_k",
                      "base_seed", "beta_sweep", "output_dir", "workers"},
                     "experiment config");
  ExperimentConfig c;
  try {
    c.experiment_id = j.value("experiment_id", c.experiment_id);
    c.n_seeds = j.value("n_seeds", c.n_seeds);
    c.best_k = j.value("best_k", c.best_k);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.workers = j.value("workers", c.workers);
    c.beta_sweep = j.value("beta_sweep", c.beta_sweep);
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("experiment config: ") + e.what());
  }

  if (j.contains("data")) {
    const Json& d = j["data"];
    require_known_keys(d, {"generator", "files"}, "data");
    if (d.contains("generator") == d.contains("files")) {
      throw ArgumentError("data needs exactly one of 'generator' or 'files'");
    }
    if (d.contains("generator")) {
      GeneratedSource g;
      g.generator = generator_from_json(d["generator"]);
      g.n_dev = d["generator"].value("n_dev", g.n_dev);
      g.n_test = d["generator"].value("n_test", g.n_test);
      c.data = g;
    } else {
      const Json& f = d["files"];
      require_known_keys(f, {"train", "dev", "test", "format"}, "data.files");
      FileSource src{f.at("train").get<std::string>(), f.at("dev").get<std::string>(),
                     f.at("test").get<std::string>(), std::nullopt};
      if (f.contains("format")) src.format = format_from_string(f["format"].get<std::string>());
      c.data = src;
    }
  }
  if (j.contains("model")) c.model = architecture_from_json(j["model"]);

  const TrainConfig defaults = j.contains("train") ? train_config_from_json(j["train"]) : TrainConfig{};
  if (j.contains("arms")) {
    for (const Json& a : j["arms"]) {
      require_known_keys(a, {"name", "strategy", "sampler", "train", "grid"}, "arm");
      Arm arm;
      arm.name = a.at("name").get<std::string>();
      arm.train = a.contains("train") ? train_config_from_json(a["train"], defaults) : defaults;
      if (a.contains("strategy")) arm.train.strategy = strategy_from_json(a["strategy"]);
      if (a.contains("sampler")) arm.train.sampler = sampler_from_json(a["sampler"]);
      if (a.contains("grid")) {
        require_known_keys(a["grid"], {"parameter", "values"}, "grid");
        arm.grid = Grid{a["grid"].at("parameter").get<std::string>(),
                        a["grid"].at("values").get<std::vector<double>>()};
      }
      c.arms.push_back(std::move(arm));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open experiment config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw LoadError(path + ": " + e.what());
  }
  return experiment_from_json(j);
}

Json to_json(const ExperimentConfig& c) {
  Json data;
  if (const auto* g = std::get_if<GeneratedSource>(&c.data)) {
    Json gen = to_json(g->generator);
    gen["n_dev"] = g->n_dev;
    gen["n_test"] = g->n_test;
    data["generator"] = gen;
  } else {
    const auto& f = std::get<FileSource>(c.data);
    data["files"] = {{"train", f.train}, {"dev", f.dev}, {"test", f.test}};
    if (f.format) data["files"]["format"] = *f.format == DataFormat::Csv ? "csv" : "jsonl";
  }
  Json arms = Json::array();
  for (const Arm& a : c.arms) {
    Json arm = {{"name", a.name}, {"train", to_json(a.train)}};
    if (a.grid) arm["grid"] = {{"parameter", a.grid->parameter}, {"values", a.grid->values}};
    arms.push_back(arm);
  }
  return {{"experiment_id", c.experiment_id}, {"data", data},          {"model", to_json(c.model)},
          {"arms", arms},                     {"n_seeds", c.n_seeds},  {"best_k", c.best_k},
          {"base_seed", c.base_seed},         {"beta_sweep", c.beta_sweep},
          {"output_dir", c.output_dir},       {"workers", c.workers}};
}

// ---------------------------------------------------------------------------
// Aggregation

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return sum / static_cast<double>(xs.size());
}

double best_of_top_dev(std::span<const double> dev_f, std::span<const double> test_f,
                       std::size_t k) {
  if (dev_f.size() != test_f.size()) throw ArgumentError("dev and test lists differ in length");
  if (k < 1 || k > dev_f.size()) throw ArgumentError("best-k needs 1 <= k <= number of runs");
  std::vector<std::size_t> order(dev_f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dev_f[a] > dev_f[b]; });
  double best = test_f[order[0]];
  for (std::size_t i = 1; i < k; ++i) best = std::max(best, test_f[order[i]]);
  return best;
}

Aggregate aggregate(std::span<const SeedOutcome> outcomes, std::size_t best_k) {
  std::vector<double> dev, test, prec, rec;
  for (const auto& o : outcomes) {
    if (!o.valid) continue;
    dev.push_back(o.dev_f);
    test.push_back(o.test.f_beta);
    prec.push_back(o.test.precision);
    rec.push_back(o.test.recall);
  }
  Aggregate a;
  a.runs = test.size();
  if (test.empty()) return a;
  a.mean_f = mean(test);
  a.var_f_raw = population_variance(test);
  a.best_k_f = best_of_top_dev(dev, test, std::min(best_k, test.size()));
  a.mean_precision = mean(prec);
  a.mean_recall = mean(rec);
  return a;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

double mean_dev_f(const std::vector<SeedOutcome>& runs) {
  std::vector<double> dev;
  for (const auto& r : runs) {
    if (r.valid) dev.push_back(r.dev_f);
  }
  return mean(dev);
}

std::vector<double> cell_values(const Arm& arm) {
  return arm.grid ? arm.grid->values : std::vector<double>{0.0};
}

TrainConfig cell_config(const Arm& arm, std::size_t cell, std::uint64_t seed) {
  TrainConfig c = arm.grid ? apply_grid_value(arm.train, arm.grid->parameter, arm.grid->values[cell])
                           : arm.train;
  c.seed = seed;
  return c;
}

// Jobs for every cell x seed of `arm`, cell-major.
void push_arm_jobs(const Arm& arm, const ExperimentConfig& config, std::vector<Job>& jobs) {
  const auto values = cell_values(arm);
  for (std::size_t cell = 0; cell < values.size(); ++cell) {
    for (std::uint64_t seed : config.seeds()) {
      Job job{arm.grid ? cell_label(arm.name, cell) : arm.name,
              arm.grid ? "grid_cell" : "arm", cell_config(arm, cell, seed), Json::object()};
      if (arm.grid) {
        job.extra["grid"] = {{"parameter", arm.grid->parameter},
                             {"value", arm.grid->values[cell]},
                             {"cell", cell},
                             {"parent_arm", arm.name}};
      }
      jobs.push_back(std::move(job));
    }
  }
}

GridResult collect_grid(const Arm& arm, std::span<const RunReport> reports, std::size_t n_seeds) {
  GridResult g;
  g.parameter = arm.grid ? arm.grid->parameter : "";
  const auto values = cell_values(arm);
  for (std::size_t cell = 0; cell < values.size(); ++cell) {
    GridCell c;
    c.value = values[cell];
    for (std::size_t s = 0; s < n_seeds; ++s) c.runs.push_back(outcome_of(reports[cell * n_seeds + s]));
    c.mean_dev_f = mean_dev_f(c.runs);
    g.cells.push_back(std::move(c));
  }
  for (std::size_t i = 1; i < g.cells.size(); ++i) {
    if (g.cells[i].mean_dev_f > g.cells[g.best].mean_dev_f) g.best = i;
  }
  return g;
}

}  // namespace

const ArmSummary& ComparisonReport::arm(const std::string& name) const {
  for (const auto& a : arms) {
    if (a.name == name) return a;
  }
  throw ArgumentError("no arm named '" + name + "' in report");
}

GridResult grid_search(const Arm& arm, const ExperimentConfig& config, RunOptions options) {
  config.validate();
  const Splits splits = load_splits(config.data);
  std::vector<Job> jobs;
  push_arm_jobs(arm, config, jobs);
  const auto reports = execute(jobs, splits, config, options);
  GridResult g = collect_grid(arm, reports, config.n_seeds);
  if (options.persist) {
    write_text(grid_csv(g), (fs::path(config.run_dir()) / ("grid_" + safe_name(arm.name) + ".csv")).string());
  }
  return g;
}

ComparisonReport run_experiment(const ExperimentConfig& config, RunOptions options) {
  config.validate();
  if (config.arms.empty()) throw ArgumentError("experiment has no arms");
  const Splits splits = load_splits(config.data);
  if (options.persist) {
    fs::create_directories(config.run_dir());
    std::ofstream(fs::path(config.run_dir()) / "timings.csv", std::ios::trunc);
  }

  std::vector<Job> jobs;
  std::vector<std::size_t> first_job;
  for (const Arm& arm : config.arms) {
    first_job.push_back(jobs.size());
    push_arm_jobs(arm, config, jobs);
  }
  const auto reports = execute(jobs, splits, config, options);

  ComparisonReport report;
  report.experiment_id = config.experiment_id;
  report.n_seeds = config.n_seeds;
  report.best_k = config.best_k;
  const fs::path runs_dir = fs::path(config.run_dir()) / "runs";

  for (std::size_t a = 0; a < config.arms.size(); ++a) {
    const Arm& arm = config.arms[a];
    const std::size_t cells = cell_values(arm).size();
    const std::span<const RunReport> arm_reports(reports.data() + first_job[a],
                                                 cells * config.n_seeds);
    ArmSummary s;
    s.name = arm.name;
    s.grid = collect_grid(arm, arm_reports, config.n_seeds);
    s.grid_size = cells;
    const std::size_t best = s.grid.best;
    s.runs = s.grid.cells[best].runs;
    const TrainConfig chosen = cell_config(arm, best, config.base_seed);
    s.strategy = to_json(chosen.strategy);
    s.sampler = to_json(chosen.sampler);
    if (arm.grid) s.selected_value = arm.grid->values[best];
    s.aggregate = aggregate(s.runs, config.best_k);

    for (std::size_t i = 0; i < arm_reports.size(); ++i) {
      const RunReport& r = arm_reports[i];
      if (r.valid) continue;
      const std::string label = arm.grid ? cell_label(arm.name, i / config.n_seeds) : arm.name;
      report.invalid_runs.push_back(run_file_name(label, r.seed));
      if (i / config.n_seeds == best) s.invalid_seeds.push_back(r.seed);
    }

    // The selected cell's runs are republished under the arm's own name so
    // aggregates can be recomputed from role=arm documents alone.
    if (options.persist && arm.grid) {
      for (std::size_t seed_i = 0; seed_i < config.n_seeds; ++seed_i) {
        const RunReport& r = arm_reports[best * config.n_seeds + seed_i];
        Json doc = run_document(config.experiment_id, arm.name, "arm",
                                cell_config(arm, best, r.seed), config.model, r, config.n_seeds,
                                config.best_k);
        doc["grid"] = {{"parameter", arm.grid->parameter},
                       {"value", arm.grid->values[best]},
                       {"cell", best},
                       {"parent_arm", arm.name}};
        write_json(doc, (runs_dir / run_file_name(arm.name, r.seed)).string());
      }
      write_text(grid_csv(s.grid),
                 (fs::path(config.run_dir()) / ("grid_" + safe_name(arm.name) + ".csv")).string());
    }
    report.arms.push_back(std::move(s));
  }
  if (options.include_sweep && !config.beta_sweep.empty()) report.sweep = beta_sweep(config, options);

  if (options.persist) {
    write_json(to_json(report), (fs::path(config.run_dir()) / "report.json").string());
    write_text(comparison_csv(report), (fs::path(config.run_dir()) / "comparison.csv").string());
    write_text(per_seed_csv(report), (fs::path(config.run_dir()) / "per_seed.csv").string());
  }
  return report;
}

std::vector<SweepRow> beta_sweep(const ExperimentConfig& config, RunOptions options) {
  config.validate();
  if (config.beta_sweep.empty()) throw ArgumentError("beta_sweep is empty");
  const Arm* adaptive = nullptr;
  for (const Arm& a : config.arms) {
    if (std::holds_alternative<strategy::Adaptive>(a.train.strategy)) {
      adaptive = &a;
      break;
    }
  }
  if (!adaptive) throw ArgumentError("beta sweep needs an adaptive arm");
  const Splits splits = load_splits(config.data);
  if (options.persist) fs::create_directories(config.run_dir());

  std::vector<Job> jobs;
  for (double beta : config.beta_sweep) {
    for (std::uint64_t seed : config.seeds()) {
      TrainConfig c = adaptive->train;
      c.strategy = strategy::Adaptive{Beta(beta)};
      c.eval_beta = Beta(beta);
      c.seed = seed;
      jobs.push_back({"sweep-beta" + format_number(beta), "sweep", c, {{"sweep_beta", beta}}});
    }
  }
  const auto reports = execute(jobs, splits, config, options);

  std::vector<SweepRow> rows;
  for (std::size_t b = 0; b < config.beta_sweep.size(); ++b) {
    std::vector<double> p, r, f;
    for (std::size_t s = 0; s < config.n_seeds; ++s) {
      const RunReport& rep = reports[b * config.n_seeds + s];
      if (!rep.valid) continue;
      p.push_back(rep.test.precision);
      r.push_back(rep.test.recall);
      f.push_back(f_beta(rep.test.stats, Beta{1.0}));
    }
    rows.push_back({config.beta_sweep[b], f.size(), mean(p), mean(r), mean(f),
                    std::sqrt(population_variance(p)), std::sqrt(population_variance(r)),
                    std::sqrt(population_variance(f))});
  }
  if (options.persist) {
    write_text(sweep_csv(rows), (fs::path(config.run_dir()) / "sweep.csv").string());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Files

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string run_file_name(const std::string& arm, std::uint64_t seed) {
  return "run_" + safe_name(arm) + "_" + std::to_string(seed) + ".json";
}

Json run_document(const std::string& experiment_id, const std::string& arm,
                  const std::string& role, const TrainConfig& config, const Architecture& model,
                  const RunReport& report, std::size_t n_seeds, std::size_t best_k) {
  Json doc = to_json(report);
  doc["schema"] = "adascale.run/1";
  doc["experiment_id"] = experiment_id;
  doc["arm"] = arm;
  doc["role"] = role;
  doc["train_config"] = to_json(config);
  doc["model"] = to_json(model);
  doc["protocol"] = {{"n_seeds", n_seeds}, {"best_k", best_k}};
  return doc;
}

void write_json(const Json& j, const std::string& path) {
  write_text(j.dump(2) + "\n", path);
}

Json to_json(const ComparisonReport& r) {
  Json arms = Json::array();
  for (const auto& a : r.arms) {
    Json per_seed = Json::array();
    for (const auto& o : a.runs) {
      per_seed.push_back({{"seed", o.seed},
                          {"valid", o.valid},
                          {"dev_f", o.dev_f},
                          {"test_precision", o.test.precision},
                          {"test_recall", o.test.recall},
                          {"test_f", o.test.f_beta}});
    }
    arms.push_back({{"name", a.name},
                    {"strategy", a.strategy},
                    {"sampler", a.sampler},
                    {"grid", grid_json(a)},
                    {"runs_aggregated", a.aggregate.runs},
                    {"mean", a.aggregate.mean_pct()},
                    {"var", a.aggregate.var_pct2()},
                    {"best_k", a.aggregate.best_k_pct()},
                    {"mean_raw", a.aggregate.mean_f},
                    {"var_raw", a.aggregate.var_f_raw},
                    {"best_k_raw", a.aggregate.best_k_f},
                    {"mean_precision", a.aggregate.mean_precision},
                    {"mean_recall", a.aggregate.mean_recall},
                    {"invalid_seeds", a.invalid_seeds},
                    {"per_seed", per_seed}});
  }
  Json sweep = Json::array();
  for (const auto& s : r.sweep) {
    sweep.push_back({{"beta", s.beta},
                     {"runs", s.runs},
                     {"mean_precision", s.mean_precision},
                     {"mean_recall", s.mean_recall},
                     {"mean_f1", s.mean_f1},
                     {"std_precision", s.std_precision},
                     {"std_recall", s.std_recall},
                     {"std_f1", s.std_f1}});
  }
  return {{"schema", "adascale.comparison/1"},
          {"experiment_id", r.experiment_id},
          {"n_seeds", r.n_seeds},
          {"best_k", r.best_k},
          {"units",
           {{"mean", "F in percentage points"},
            {"best_k", "F in percentage points"},
            {"var", "population variance of F in percentage points squared (= raw variance x 1e4); "
                    "unit convention inferred from published table magnitudes"}}},
          {"arms", arms},
          {"sweep", sweep},
          {"invalid_runs", r.invalid_runs}};
}

std::string comparison_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out << "arm,mean,var,best3\n";
  for (const auto& a : r.arms) {
    out << a.name << ',' << format_number(a.aggregate.mean_pct()) << ','
        << format_number(a.aggregate.var_pct2()) << ',' << format_number(a.aggregate.best_k_pct())
        << '\n';
  }
  return out.str();
}

std::string per_seed_csv(const ComparisonReport& r) {
  std::ostringstream out;
  out << "arm,seed,valid,dev_f,test_precision,test_recall,test_f\n";
  for (const auto& a : r.arms) {
    for (const auto& o : a.runs) {
      out << a.name << ',' << o.seed << ',' << (o.valid ? 1 : 0) << ',' << format_number(o.dev_f)
          << ',' << format_number(o.test.precision) << ',' << format_number(o.test.recall) << ','
          << format_number(o.test.f_beta) << '\n';
    }
  }
  return out.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "beta,mean_precision,mean_recall,mean_f1,std_precision,std_recall,std_f1\n";
  for (const auto& s : rows) {
    out << format_number(s.beta) << ',' << format_number(s.mean_precision) << ','
        << format_number(s.mean_recall) << ',' << format_number(s.mean_f1) << ','
        << format_number(s.std_precision) << ',' << format_number(s.std_recall) << ','
        << format_number(s.std_f1) << '\n';
  }
  return out.str();
}

std::string grid_csv(const GridResult& g) {
  std::ostringstream out;
  out << "parameter,value,mean_dev_f,selected\n";
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    out << g.parameter << ',' << format_number(g.cells[i].value) << ','
        << format_number(g.cells[i].mean_dev_f) << ',' << (i == g.best ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace adascale
