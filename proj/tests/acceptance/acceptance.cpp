// Acceptance suite. Prints one PASS/FAIL line per criterion and writes the
// measured values to <out>/acceptance.json. Exit status is the number of
// failed criteria (capped at 100).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adascale/harness.hpp"
#include "adascale/metrics.hpp"
#include "adascale/scaling.hpp"
#include "adascale/serialization.hpp"
#include "adascale/trainer.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace adascale;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  Json measured = Json::object();
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: no limit stated
  std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. closed form vs composition; marginal utilities vs finite differences

Outcome formula_suite() {
  std::mt19937_64 rng(101);
  double max_composition = 0.0;
  int compared = 0;
  while (compared < 10000) {
    const auto s = oracle::random_counts(rng);
    const double beta = oracle::uniform(rng, 0.1, 5.0);
    double composed = 0.0;
    if (!oracle::composed_f(s, beta, composed)) continue;
    max_composition = std::max(max_composition, std::abs(f_beta(s, Beta(beta)) - composed));
    ++compared;
  }
  constexpr double h = 1e-4;
  double max_fd = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = oracle::random_interior(rng, h);
    const Beta beta(oracle::uniform(rng, 0.25, 4.0));
    const auto mu = marginal_utility_fbeta(s, beta);
    auto along = [&](double ConfusionStats::*field) {
      return oracle::central_difference(
          [&](double v) {
            auto t = s;
            t.*field = v;
            return f_beta(t, beta);
          },
          s.*field, h);
    };
    max_fd = std::max({max_fd, oracle::relative_error(mu.mu_tp, along(&ConfusionStats::tp)),
                       oracle::relative_error(mu.mu_tn, along(&ConfusionStats::tn))});
  }
  Outcome o;
  o.pass = max_composition <= 1e-12 && max_fd <= 1e-6;
  o.detail = "max |closed - composed| = " + fmt(max_composition) + " (<= 1e-12, n=10000); " +
             "max FD rel err = " + fmt(max_fd) + " (<= 1e-6, n=1000)";
  o.measured = {{"max_composition_error", max_composition}, {"max_fd_relative_error", max_fd}};
  return o;
}

// ---------------------------------------------------------------------------
// 2. scaling-weight properties

Outcome property_suite() {
  std::mt19937_64 rng(102);
  constexpr int kSamples = 1000;
  int p1 = 0, p2 = 0, p3 = 0, p4 = 0, p5 = 0;
  for (int i = 0; i < kSamples; ++i) {
    // Property 1: fixed rates, pe = 0; w decreases as n/p grows.
    const double rp = oracle::uniform(rng, 0.01, 1.0);
    const double rn = oracle::uniform(rng, 0.0, 0.99);
    const Beta b1(oracle::uniform(rng, 0.25, 4.0));
    const double p = oracle::uniform(rng, 1.0, 100.0);
    const double n_lo = oracle::uniform(rng, 1.0, 1000.0);
    const double n_hi = n_lo * oracle::uniform(rng, 1.01, 10.0);
    p1 += w_exact({p, n_lo, rp * p, rn * n_lo, 0.0}, b1).value >
          w_exact({p, n_hi, rp * p, rn * n_hi, 0.0}, b1).value;

    // Property 2: F depends on the per-class TP only through their sum.
    const int classes = oracle::uniform_int(rng, 1, 5);
    auto s = oracle::random_counts(rng);
    std::vector<double> split(static_cast<std::size_t>(classes), 0.0);
    for (int t = 0; t < static_cast<int>(s.tp); ++t) split[static_cast<std::size_t>(oracle::uniform_int(rng, 0, classes - 1))] += 1;
    PerClassCounts per;
    for (int c = 0; c < classes; ++c) per.tp_by_class[c + 1] = split[static_cast<std::size_t>(c)];
    const Beta b2(oracle::uniform(rng, 0.25, 4.0));
    bool invariant = micro_f_invariance_check(per, s, b2);
    // Independent check: rebuild stats from a second random split.
    std::vector<double> other(static_cast<std::size_t>(classes), 0.0);
    for (int t = 0; t < static_cast<int>(s.tp); ++t) other[static_cast<std::size_t>(oracle::uniform_int(rng, 0, classes - 1))] += 1;
    ConfusionStats rebuilt = s;
    rebuilt.tp = 0;
    for (double v : other) rebuilt.tp += v;
    invariant = invariant && f_beta(rebuilt, b2) == f_beta(s, b2);
    p2 += invariant;

    // Property 3: increasing in tp.
    auto t3 = oracle::random_counts(rng);
    if (t3.p < 2) t3.p = 2;
    const double tp_lo = oracle::uniform(rng, 0.0, t3.p - 1.0);
    const double tp_hi = oracle::uniform(rng, tp_lo + 1e-3, t3.p);
    t3.pe = oracle::uniform(rng, 0.0, t3.p - tp_hi);
    const Beta b3(oracle::uniform(rng, 0.25, 4.0));
    auto a3 = t3, c3 = t3;
    a3.tp = tp_lo;
    c3.tp = tp_hi;
    p3 += w_exact(a3, b3).value < w_exact(c3, b3).value;

    // Property 4: increasing in tn, tp > 0.
    auto t4 = oracle::random_counts(rng);
    t4.tp = oracle::uniform(rng, 0.5, t4.p);
    t4.pe = oracle::uniform(rng, 0.0, t4.p - t4.tp);
    const double tn_lo = oracle::uniform(rng, 0.0, 0.99 * t4.n);
    const double tn_hi = oracle::uniform(rng, tn_lo + 1e-3 * t4.n, t4.n);
    const Beta b4(oracle::uniform(rng, 0.25, 4.0));
    auto a4 = t4, c4 = t4;
    a4.tn = tn_lo;
    c4.tn = tn_hi;
    p4 += w_exact(a4, b4).value < w_exact(c4, b4).value;

    // Property 5: decreasing in beta, tp > 0, p > 0.
    auto t5 = oracle::random_counts(rng);
    if (t5.tp == 0) t5.tp = 1;
    t5.pe = std::min(t5.pe, t5.p - t5.tp);
    const double beta_lo = oracle::uniform(rng, 0.1, 4.0);
    const double beta_hi = beta_lo * oracle::uniform(rng, 1.01, 3.0);
    p5 += w_exact(t5, Beta(beta_lo)).value > w_exact(t5, Beta(beta_hi)).value;
  }
  Outcome o;
  o.pass = p1 == kSamples && p2 == kSamples && p3 == kSamples && p4 == kSamples && p5 == kSamples;
  o.detail = "holding/total: P1 " + std::to_string(p1) + ", P2 " + std::to_string(p2) + ", P3 " +
             std::to_string(p3) + ", P4 " + std::to_string(p4) + ", P5 " + std::to_string(p5) +
             " of " + std::to_string(kSamples);
  o.measured = {{"p1", p1}, {"p2", p2}, {"p3", p3}, {"p4", p4}, {"p5", p5}, {"samples", kSamples}};
  return o;
}

// ---------------------------------------------------------------------------
// 3. ratio identity and hard-prediction consistency

Outcome ratio_suite() {
  std::mt19937_64 rng(103);
  double max_ratio = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = oracle::random_counts(rng);
    const Beta beta(oracle::uniform(rng, 0.1, 5.0));
    const auto mu = marginal_utility_fbeta(s, beta);
    max_ratio = std::max(max_ratio, std::abs(w_exact(s, beta).value - mu.mu_tn / mu.mu_tp));
  }
  double max_hard = 0.0;
  int hard_cases = 0;
  while (hard_cases < 1000) {
    const int size = oracle::uniform_int(rng, 1, 64);
    std::vector<double> probs(static_cast<std::size_t>(size));
    std::vector<bool> positive(static_cast<std::size_t>(size));
    ConfusionStats s;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      positive[i] = oracle::uniform_int(rng, 0, 3) == 0;
      const bool hit = oracle::uniform_int(rng, 0, 1) == 1;
      // A miss carries the smallest admissible probability (softmax outputs
      // are never exactly 0).
      probs[i] = hit ? 1.0 : std::numeric_limits<double>::min();
      (positive[i] ? s.p : s.n) += 1;
      if (hit) (positive[i] ? s.tp : s.tn) += 1;
    }
    const Beta beta(oracle::uniform(rng, 0.25, 4.0));
    if (beta.squared() * s.p + s.n - s.tn <= 0.0) continue;
    max_hard = std::max(max_hard, std::abs(w_batch(BatchPrediction::make(probs, positive), beta).value -
                                           w_exact(s, beta).value));
    ++hard_cases;
  }
  Outcome o;
  o.pass = max_ratio <= 1e-12 && max_hard <= 1e-12;
  o.detail = "max |w_exact - mu_tn/mu_tp| = " + fmt(max_ratio) + "; max |w_batch - w_exact| on " +
             "hard batches = " + fmt(max_hard) + " (both <= 1e-12)";
  o.measured = {{"max_ratio_error", max_ratio}, {"max_hard_prediction_error", max_hard}};
  return o;
}

// ---------------------------------------------------------------------------
// 4. gradient checks

Outcome gradient_suite() {
  const std::pair<const char*, LossStrategy> strategies[] = {
      {"vanilla", strategy::Vanilla{}},
      {"static(0.2)", strategy::Static{0.2}},
      {"focal(2)", strategy::Focal{2.0}},
      {"adaptive(1)", strategy::Adaptive{Beta(1.0)}}};
  const Architecture archs[] = {LinearArch{}, MlpArch{6, Activation::Tanh},
                                MlpArch{6, Activation::Relu}};
  std::mt19937_64 rng(104);
  double worst = 0.0;
  Json per = Json::object();
  for (const auto& [name, s] : strategies) {
    double strategy_worst = 0.0;
    for (const auto& arch : archs) {
      for (int trial = 0; trial < 20; ++trial) {
        const auto p = oracle::random_problem(rng, arch);
        strategy_worst = std::max(strategy_worst,
                                  oracle::gradient_check(p.params, p.x, p.gold, s).max_relative_error);
      }
    }
    per[name] = strategy_worst;
    worst = std::max(worst, strategy_worst);
  }
  Outcome o;
  o.pass = worst < 1e-4;
  o.detail = "max relative error " + fmt(worst) + " (< 1e-4; step 1e-5, floor " +
             fmt(oracle::kGradFloor) + ", 60 problems per strategy)";
  o.measured = {{"max_relative_error", worst}, {"per_strategy", per}};
  return o;
}

// ---------------------------------------------------------------------------
// 5. degenerate strategies reproduce vanilla runs bit for bit

Outcome equivalence_suite(const ExperimentConfig& cfg, const Splits& splits) {
  TrainConfig base = cfg.arms.front().train;
  base.strategy = strategy::Vanilla{};
  bool all = true;
  Json per = Json::object();
  for (std::uint64_t seed : {cfg.base_seed, cfg.base_seed + 1}) {
    base.seed = seed;
    const auto vanilla = train(splits.train, splits.dev, splits.test, cfg.model, base);
    const std::string reference = to_json(vanilla.report).dump();
    for (const auto& [name, s] : {std::pair<const char*, LossStrategy>{"focal(0)", strategy::Focal{0.0}},
                                  std::pair<const char*, LossStrategy>{"static(1)", strategy::Static{1.0}}}) {
      TrainConfig c = base;
      c.strategy = s;
      const auto run = train(splits.train, splits.dev, splits.test, cfg.model, c);
      const bool same = to_json(run.report).dump() == reference &&
                        run.params.flatten() == vanilla.params.flatten();
      per[std::string(name) + "/seed" + std::to_string(seed)] = same;
      all = all && same;
    }
  }
  Outcome o;
  o.pass = all;
  o.detail = all ? "Focal(0) and Static(1) runs bit-identical to Vanilla on 2 seeds"
                 : "some degenerate run differs from Vanilla";
  o.measured = per;
  return o;
}

// ---------------------------------------------------------------------------
// 6. synthetic sparse benchmark

struct BenchmarkTrial {
  std::uint64_t base_seed;
  double vanilla_mean, adaptive_mean, adaptive_var, undersample_var;
  double undersample_ratio;
  bool gap_ok() const { return adaptive_mean >= vanilla_mean + 2.0; }
  bool var_ok() const { return adaptive_var <= undersample_var; }
};

BenchmarkTrial benchmark_trial(ExperimentConfig cfg, std::uint64_t base_seed, const fs::path& out) {
  cfg.base_seed = base_seed;
  cfg.experiment_id = "acceptance_benchmark_seed" + std::to_string(base_seed);
  cfg.output_dir = out.string();
  const ComparisonReport r = run_experiment(cfg);
  const auto& v = r.arm("vanilla").aggregate;
  const auto& a = r.arm("adaptive").aggregate;
  const auto& u = r.arm("undersample");
  return {base_seed, v.mean_pct(), a.mean_pct(), a.var_pct2(), u.aggregate.var_pct2(),
          u.selected_value.value_or(0.0)};
}

Outcome benchmark_suite(const ExperimentConfig& cfg, const fs::path& out) {
  std::vector<BenchmarkTrial> trials{benchmark_trial(cfg, cfg.base_seed, out)};
  // Documented flake policy for the variance comparison only.
  if (trials[0].gap_ok() && !trials[0].var_ok()) {
    trials.push_back(benchmark_trial(cfg, cfg.base_seed + 100, out));
    trials.push_back(benchmark_trial(cfg, cfg.base_seed + 200, out));
  }
  int var_passes = 0;
  Json list = Json::array();
  for (const auto& t : trials) {
    var_passes += t.var_ok();
    list.push_back({{"base_seed", t.base_seed},
                    {"vanilla_mean", t.vanilla_mean},
                    {"adaptive_mean", t.adaptive_mean},
                    {"adaptive_var", t.adaptive_var},
                    {"undersample_var", t.undersample_var},
                    {"undersample_ratio", t.undersample_ratio}});
  }
  const auto& t0 = trials[0];
  const bool var_ok = trials.size() == 1 ? t0.var_ok() : var_passes >= 2;
  Outcome o;
  o.pass = t0.gap_ok() && var_ok;
  o.detail = "F1 mean adaptive " + fmt(t0.adaptive_mean, 4) + " vs vanilla " +
             fmt(t0.vanilla_mean, 4) + " (need gap >= 2); Var adaptive " +
             fmt(t0.adaptive_var, 4) + " vs undersample(ratio " + fmt(t0.undersample_ratio) +
             ") " + fmt(t0.undersample_var, 4);
  if (trials.size() > 1) {
    o.detail += "; variance rerun policy: " + std::to_string(var_passes) + "/3 trials pass";
  }
  o.measured = {{"trials", list}};
  return o;
}

// ---------------------------------------------------------------------------
// 7. beta sweep

Outcome sweep_suite(ExperimentConfig cfg, const fs::path& out) {
  cfg.beta_sweep = {0.5, 1.0, 2.0, 4.0};
  cfg.experiment_id = "acceptance_sweep";
  cfg.output_dir = out.string();
  const auto rows = beta_sweep(cfg);
  constexpr double slack = 0.01;
  bool precision_ok = true, recall_ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    precision_ok = precision_ok && rows[i].mean_precision <= rows[i - 1].mean_precision + slack;
    recall_ok = recall_ok && rows[i].mean_recall >= rows[i - 1].mean_recall - slack;
  }
  const bool f1_ok = rows[1].mean_f1 >= rows[0].mean_f1 && rows[1].mean_f1 >= rows[2].mean_f1;
  bool all_runs = true;
  for (const auto& r : rows) all_runs = all_runs && r.runs == cfg.n_seeds;
  Outcome o;
  o.pass = precision_ok && recall_ok && f1_ok && all_runs;
  std::ostringstream d;
  d << "P/R/F1 by beta:";
  for (const auto& r : rows) {
    d << ' ' << fmt(r.beta) << "=" << fmt(r.mean_precision, 3) << "/" << fmt(r.mean_recall, 3)
      << "/" << fmt(r.mean_f1, 3);
  }
  d << "; P non-increasing " << (precision_ok ? "yes" : "no") << ", R non-decreasing "
    << (recall_ok ? "yes" : "no") << ", F1 max at beta=1 " << (f1_ok ? "yes" : "no");
  o.detail = d.str();
  Json table = Json::array();
  for (const auto& r : rows) {
    table.push_back({{"beta", r.beta},
                     {"runs", r.runs},
                     {"mean_precision", r.mean_precision},
                     {"mean_recall", r.mean_recall},
                     {"mean_f1", r.mean_f1}});
  }
  o.measured = {{"rows", table}};
  return o;
}

// ---------------------------------------------------------------------------
// 8. Best3 worked example

Outcome best3_suite() {
  const std::vector<double> dev{0.40, 0.50, 0.45, 0.48, 0.30};
  const std::vector<double> test{0.41, 0.52, 0.44, 0.50, 0.35};
  const double b = best_of_top_dev(dev, test, 3);
  Outcome o;
  o.pass = b == 0.52;
  o.detail = "Best3 = " + fmt(b, 17) + " (== 0.52 exactly)";
  o.measured = {{"best3", b}};
  return o;
}

// ---------------------------------------------------------------------------
// 9. determinism of persisted JSON

std::map<std::string, std::string> json_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      out[fs::relative(e.path(), dir).string()] = read_file(e.path());
    }
  }
  return out;
}

Outcome determinism_suite(ExperimentConfig cfg, const Splits& splits, const fs::path& out) {
  // Single train invocations, persisted the way the CLI does.
  bool train_same = true;
  for (const Arm& arm : cfg.arms) {
    TrainConfig c = arm.grid ? apply_grid_value(arm.train, arm.grid->parameter, arm.grid->values.front())
                             : arm.train;
    c.seed = cfg.base_seed;
    std::string docs[2];
    for (auto& doc : docs) {
      const auto r = train(splits.train, splits.dev, splits.test, cfg.model, c);
      doc = run_document(cfg.experiment_id, arm.name, "arm", c, cfg.model, r.report, 1, 1).dump(2);
    }
    train_same = train_same && docs[0] == docs[1];
  }

  // Whole experiments: a reduced seed count keeps this quick; the second
  // repetition uses a different worker count.
  cfg.n_seeds = 2;
  cfg.best_k = 2;
  cfg.experiment_id = "acceptance_determinism";
  ExperimentConfig again = cfg;
  cfg.output_dir = (out / "determinism_a").string();
  cfg.workers = 1;
  again.output_dir = (out / "determinism_b").string();
  again.workers = 4;
  fs::remove_all(cfg.run_dir());
  fs::remove_all(again.run_dir());
  run_experiment(cfg);
  run_experiment(again);
  const auto a = json_files(cfg.run_dir());
  const auto b = json_files(again.run_dir());
  const bool experiment_same = !a.empty() && a == b;
  Outcome o;
  o.pass = train_same && experiment_same;
  o.detail = "train documents identical: " + std::string(train_same ? "yes" : "no") +
             "; run_experiment JSON files identical: " + (experiment_same ? "yes" : "no") + " (" +
             std::to_string(a.size()) + " files, workers 1 vs 4)";
  o.measured = {{"train_identical", train_same},
                {"experiment_identical", experiment_same},
                {"files_compared", a.size()}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adascale acceptance suite"};
  std::string config_path;
  std::string out_dir = "acceptance_out";
  std::vector<int> only;
  app.add_option("--config", config_path, "Default synthetic experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Scratch and report directory");
  app.add_option("--only", only, "Run only these criterion numbers")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const fs::path out(out_dir);
  fs::create_directories(out);
  ExperimentConfig cfg = load_experiment(config_path);
  const Splits splits = load_splits(cfg.data);

  const std::vector<Criterion> criteria{
      {1, "formula suite", 5.0, formula_suite},
      {2, "scaling-weight properties", 5.0, property_suite},
      {3, "ratio identity and hard-prediction consistency", 0.0, ratio_suite},
      {4, "gradient checks", 30.0, gradient_suite},
      {5, "degenerate strategies equal vanilla", 0.0, [&] { return equivalence_suite(cfg, splits); }},
      {6, "synthetic sparse benchmark", 180.0, [&] { return benchmark_suite(cfg, out); }},
      {7, "beta sweep", 300.0, [&] { return sweep_suite(cfg, out); }},
      {8, "Best3 selection", 0.0, best3_suite},
      {9, "determinism", 0.0, [&] { return determinism_suite(cfg, splits, out); }},
  };

  int failed = 0;
  Json report = Json::array();
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s == 0.0 || seconds < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string timing = fmt(seconds, 3) + "s";
    if (c.time_limit_s > 0.0) timing += " (limit " + fmt(c.time_limit_s) + "s)";
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail
              << "; " << timing << std::endl;
    report.push_back({{"criterion", c.id},
                      {"name", c.name},
                      {"pass", pass},
                      {"seconds", seconds},
                      {"time_limit_seconds", c.time_limit_s},
                      {"measured", o.measured}});
  }
  std::ofstream(out / "acceptance.json") << report.dump(2) << '\n';
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return std::min(failed, 100);
}
