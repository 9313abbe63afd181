// adascale: command-line front end for dataset generation, single training
// runs, evaluation, and multi-seed experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "adascale/data.hpp"
#include "adascale/errors.hpp"
#include "adascale/harness.hpp"
#include "adascale/model.hpp"
#include "adascale/serialization.hpp"
#include "adascale/trainer.hpp"

namespace fs = std::filesystem;
using namespace adascale;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "Experiment JSON config");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Seed (generator seed, run seed, or base seed)");
  cmd->add_option("--out", c.out, "Output directory");
}

ExperimentConfig experiment_with_overrides(const Common& c, std::optional<std::size_t> workers,
                                           std::optional<std::size_t> n_seeds) {
  ExperimentConfig cfg = load_experiment(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (workers) cfg.workers = *workers;
  if (n_seeds) {
    cfg.n_seeds = *n_seeds;
    cfg.best_k = std::min(cfg.best_k, cfg.n_seeds);
  }
  cfg.validate();
  return cfg;
}

void print_report(const ComparisonReport& r) {
  std::cout << comparison_csv(r);
  for (const auto& a : r.arms) {
    if (a.selected_value) {
      std::cout << "# " << a.name << ": grid " << a.grid.parameter << " selected "
                << format_number(*a.selected_value) << " of " << a.grid_size << " cells\n";
    }
  }
  for (const auto& name : r.invalid_runs) std::cout << "# invalid run: " << name << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-scaling cost-sensitive training toolkit"};
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  Common gen_common;
  GeneratorConfig gen;
  std::size_t n_dev = 2000;
  std::size_t n_test = 2000;
  std::string gen_format = "csv";
  auto* generate_cmd = app.add_subcommand("generate", "Write synthetic train/dev/test splits");
  add_common(generate_cmd, gen_common, false);
  generate_cmd->add_option("--n", gen.n, "Training instances");
  generate_cmd->add_option("--n-dev", n_dev, "Dev instances");
  generate_cmd->add_option("--n-test", n_test, "Test instances");
  generate_cmd->add_option("--d", gen.d, "Feature dimension");
  generate_cmd->add_option("--k", gen.k, "Classes including the negative class");
  generate_cmd->add_option("--positive-rate", gen.positive_rate, "Fraction of positives");
  generate_cmd->add_option("--negative-modes", gen.negative_modes, "Negative mixture components");
  generate_cmd->add_option("--separation", gen.class_separation, "Cluster centre radius");
  generate_cmd->add_option("--noise", gen.noise_scale, "Per-feature noise std");
  generate_cmd->add_option("--format", gen_format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  // train ------------------------------------------------------------------
  Common train_common;
  std::string train_arm;
  auto* train_cmd = app.add_subcommand("train", "Train one arm for one seed");
  add_common(train_cmd, train_common, true);
  train_cmd->add_option("--arm", train_arm, "Arm name (default: first arm)");

  // eval -------------------------------------------------------------------
  Common eval_common;
  std::string eval_model;
  std::string eval_data;
  std::string eval_format;
  double eval_beta = 1.0;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset file");
  add_common(eval_cmd, eval_common, false);
  eval_cmd->add_option("--model", eval_model, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval_data, "Dataset file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--format", eval_format, "csv or jsonl (default: from extension)");
  eval_cmd->add_option("--beta", eval_beta, "F-beta factor");

  // compare / sweep / grid ---------------------------------------------------
  Common cmp_common;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> n_seeds;
  bool strict = false;
  auto* compare_cmd = app.add_subcommand("compare", "Multi-seed comparison of all arms");
  add_common(compare_cmd, cmp_common, true);
  compare_cmd->add_option("--workers", workers, "Concurrent training runs");
  compare_cmd->add_option("--n-seeds", n_seeds, "Override n_seeds");
  compare_cmd->add_flag("--strict", strict, "Exit non-zero if any run was invalid");
  bool with_sweep = false;
  compare_cmd->add_flag("--with-sweep", with_sweep, "Also run the config's beta sweep");

  Common sweep_common;
  std::vector<double> sweep_betas;
  auto* sweep_cmd = app.add_subcommand("sweep", "Beta sweep with the adaptive arm");
  add_common(sweep_cmd, sweep_common, true);
  sweep_cmd->add_option("--betas", sweep_betas, "Beta values (overrides config)")->delimiter(',');
  sweep_cmd->add_option("--workers", workers, "Concurrent training runs");
  sweep_cmd->add_option("--n-seeds", n_seeds, "Override n_seeds");
  sweep_cmd->add_flag("--strict", strict, "Exit non-zero if any run was invalid");

  Common grid_common;
  std::string grid_arm;
  std::string grid_parameter;
  std::vector<double> grid_values;
  auto* grid_cmd = app.add_subcommand("grid", "Grid search for one arm by mean dev F");
  add_common(grid_cmd, grid_common, true);
  grid_cmd->add_option("--arm", grid_arm, "Arm name")->required();
  grid_cmd->add_option("--parameter", grid_parameter, "Grid parameter (overrides config)");
  grid_cmd->add_option("--values", grid_values, "Grid values (overrides config)")->delimiter(',');
  grid_cmd->add_option("--workers", workers, "Concurrent training runs");
  grid_cmd->add_option("--n-seeds", n_seeds, "Override n_seeds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate_cmd->parsed()) {
      if (!gen_common.config.empty()) {
        const auto cfg = load_experiment(gen_common.config);
        if (const auto* g = std::get_if<GeneratedSource>(&cfg.data)) {
          // Command-line flags still win over the config file.
          GeneratorConfig from_file = g->generator;
          if (generate_cmd->count("--n") == 0) gen.n = from_file.n;
          if (generate_cmd->count("--d") == 0) gen.d = from_file.d;
          if (generate_cmd->count("--k") == 0) gen.k = from_file.k;
          if (generate_cmd->count("--positive-rate") == 0) gen.positive_rate = from_file.positive_rate;
          if (generate_cmd->count("--negative-modes") == 0) gen.negative_modes = from_file.negative_modes;
          if (generate_cmd->count("--separation") == 0) gen.class_separation = from_file.class_separation;
          if (generate_cmd->count("--noise") == 0) gen.noise_scale = from_file.noise_scale;
          if (generate_cmd->count("--n-dev") == 0) n_dev = g->n_dev;
          if (generate_cmd->count("--n-test") == 0) n_test = g->n_test;
          gen.seed = from_file.seed;
        }
      }
      if (gen_common.seed) gen.seed = *gen_common.seed;
      const fs::path out = gen_common.out.empty() ? fs::path("data") : fs::path(gen_common.out);
      fs::create_directories(out);
      const Splits s = generate_splits(gen, n_dev, n_test);
      const auto fmt = format_from_string(gen_format);
      save(s.train, (out / ("train." + gen_format)).string(), fmt);
      save(s.dev, (out / ("dev." + gen_format)).string(), fmt);
      save(s.test, (out / ("test." + gen_format)).string(), fmt);
      std::cout << "wrote " << s.train.size() << "/" << s.dev.size() << "/" << s.test.size()
                << " instances (" << s.train.positives() << " train positives) to " << out.string()
                << '\n';
      return 0;
    }

    if (train_cmd->parsed()) {
      ExperimentConfig cfg = load_experiment(train_common.config);
      if (!train_common.out.empty()) cfg.output_dir = train_common.out;
      if (cfg.arms.empty()) throw ArgumentError("config has no arms");
      const Arm& arm = train_arm.empty() ? cfg.arms.front() : cfg.arm(train_arm);
      TrainConfig tc = arm.train;
      tc.seed = train_common.seed.value_or(cfg.base_seed);
      const Splits s = load_splits(cfg.data);
      const TrainResult result = train(s.train, s.dev, s.test, cfg.model, tc);
      const fs::path runs = fs::path(cfg.run_dir()) / "runs";
      fs::create_directories(runs);
      const auto doc = run_document(cfg.experiment_id, arm.name, "arm", tc, cfg.model,
                                    result.report, 1, 1);
      const fs::path run_path = runs / run_file_name(arm.name, tc.seed);
      write_json(doc, run_path.string());
      fs::path ckpt = run_path;
      ckpt.replace_extension(".ckpt");
      save_checkpoint(result.params, ckpt.string());
      const auto& t = result.report.test;
      std::cout << "arm=" << arm.name << " seed=" << tc.seed << " valid=" << result.report.valid
                << " best_epoch=" << result.report.best_epoch
                << " dev_f=" << format_number(result.report.best_dev_f)
                << " test_p=" << format_number(t.precision) << " test_r=" << format_number(t.recall)
                << " test_f=" << format_number(t.f_beta) << '\n'
                << "run: " << run_path.string() << "\ncheckpoint: " << ckpt.string() << '\n';
      return result.report.valid ? 0 : 2;
    }

    if (eval_cmd->parsed()) {
      const ModelParams params = load_checkpoint(eval_model);
      const auto fmt = eval_format.empty() ? format_from_path(eval_data) : format_from_string(eval_format);
      const Dataset ds = load(eval_data, fmt);
      const EvalResult r = evaluate(params, ds, Beta(eval_beta));
      Json j = to_json(r);
      j["beta"] = eval_beta;
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (compare_cmd->parsed()) {
      const auto cfg = experiment_with_overrides(cmp_common, workers, n_seeds);
      const ComparisonReport r = run_experiment(cfg, RunOptions{true, with_sweep});
      print_report(r);
      if (!r.sweep.empty()) std::cout << sweep_csv(r.sweep);
      std::cout << "# outputs in " << cfg.run_dir() << '\n';
      if (strict && !r.all_valid()) {
        std::cerr << "error: " << r.invalid_runs.size() << " invalid run(s)\n";
        return 3;
      }
      return 0;
    }

    if (sweep_cmd->parsed()) {
      auto cfg = experiment_with_overrides(sweep_common, workers, n_seeds);
      if (!sweep_betas.empty()) cfg.beta_sweep = sweep_betas;
      const auto rows = beta_sweep(cfg);
      std::cout << sweep_csv(rows);
      std::cout << "# outputs in " << cfg.run_dir() << '\n';
      bool all = true;
      for (const auto& row : rows) all = all && row.runs == cfg.n_seeds;
      if (strict && !all) {
        std::cerr << "error: some sweep runs were invalid\n";
        return 3;
      }
      return 0;
    }

    if (grid_cmd->parsed()) {
      auto cfg = experiment_with_overrides(grid_common, workers, n_seeds);
      Arm arm = cfg.arm(grid_arm);
      if (!grid_parameter.empty() || !grid_values.empty()) {
        if (grid_parameter.empty() || grid_values.empty()) {
          throw ArgumentError("--parameter and --values must be given together");
        }
        arm.grid = Grid{grid_parameter, grid_values};
      }
      const GridResult g = grid_search(arm, cfg);
      std::cout << grid_csv(g);
      std::cout << "# best: " << (g.parameter.empty() ? "(no grid)" : g.parameter) << " = "
                << format_number(g.cells[g.best].value) << " (grid size " << g.cells.size()
                << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
