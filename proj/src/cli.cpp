#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sarahbb/fetch.hpp"
#include "sarahbb/harness.hpp"

namespace sarahbb {

namespace {

void apply_overrides(ExperimentSpec& spec, const std::optional<uint64_t>& seed,
                     const std::string& output, bool normalize,
                     bool passes_incl) {
  if (seed) spec.seeds = {*seed};
  if (!output.empty()) spec.output_dir = output;
  if (normalize) spec.normalize = true;
  if (passes_incl) spec.passes_include_stepsize = true;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Finite-sum stochastic optimization benchmarks: MB-SARAH with random "
      "Barzilai-Borwein step sizes, plus SVRG/mS2GD/SGD baselines"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::optional<uint64_t> seed;
  std::string output;
  bool normalize = false;
  bool passes_incl = false;
  app.add_option("--seed", seed, "Replace the spec seed list with one seed");
  app.add_option("--output", output, "Override the spec output directory");
  app.add_flag("--normalize", normalize,
               "Scale every feature row to unit norm before solving");
  app.add_flag("--passes-include-stepsize", passes_incl,
               "Count step-size gradient evaluations in the pass totals used "
               "for sweep targets");

  auto* fetch_cmd =
      app.add_subcommand("fetch", "Download a dataset into the local cache");
  std::string fetch_name;
  std::string cache_dir = "data";
  std::string url_config;
  fetch_cmd->add_option("name", fetch_name, "Dataset name (a8a, w8a, ijcnn1)")
      ->required();
  fetch_cmd->add_option("--cache-dir", cache_dir, "Cache directory");
  fetch_cmd->add_option("--config", url_config,
                        "Key-value file overriding URLs/checksums");

  auto* run_cmd =
      app.add_subcommand("run", "Execute the experiment described by a spec "
                                "file and write CSV traces");
  std::string run_spec_path;
  run_cmd->add_option("spec", run_spec_path, "Experiment spec file")
      ->required();

  auto* ref_cmd = app.add_subcommand(
      "reference", "Compute (and cache) the reference minimizer for a spec");
  std::string ref_spec_path;
  ref_cmd->add_option("spec", ref_spec_path, "Experiment spec file")
      ->required();

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Grid search over b, b_H, gamma or eta as configured in the "
               "spec's [sweep] section");
  std::string sweep_spec_path;
  sweep_cmd->add_option("spec", sweep_spec_path, "Experiment spec file")
      ->required();

  auto* theory_cmd = app.add_subcommand(
      "theory", "Evaluate the convergence condition, contraction factor and "
                "complexity estimates for given constants");
  TheoryInputs t;
  t.epsilon = 1e-3;
  theory_cmd->add_option("--L", t.L, "Component smoothness constant")
      ->required();
  theory_cmd->add_option("--mu", t.mu, "Strong convexity constant")
      ->required();
  theory_cmd->add_option("--n", t.n, "Sample size")->required();
  theory_cmd->add_option("--b", t.b, "Gradient mini-batch size")->required();
  theory_cmd->add_option("--bH", t.b_H, "Step-size mini-batch size")
      ->required();
  theory_cmd->add_option("--gamma", t.gamma, "RBB scaling factor")->required();
  theory_cmd->add_option("--m", t.m, "Inner-loop length")->required();
  theory_cmd->add_option("--epsilon", t.epsilon,
                         "Accuracy target for the complexity estimates");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*fetch_cmd) {
      std::filesystem::path cfg_path = url_config;
      FetchResult r = fetch_to_cache(
          fetch_name, cache_dir, url_config.empty() ? nullptr : &cfg_path);
      std::cout << (r.cache_hit ? "cache hit: " : "downloaded: ")
                << r.path.string() << "\n";
      return 0;
    }
    if (*run_cmd) {
      ExperimentSpec spec = parse_experiment_spec(run_spec_path);
      apply_overrides(spec, seed, output, normalize, passes_incl);
      ExperimentResult result = run_experiment(spec);
      std::size_t diverged = 0;
      for (const RunOutcome& o : result.outcomes)
        if (o.diverged) ++diverged;
      std::cout << "wrote " << spec.output_dir.string() << " ("
                << result.outcomes.size() << " runs";
      if (diverged) std::cout << ", " << diverged << " diverged";
      std::cout << ")\n";
      return result.exit_code;
    }
    if (*ref_cmd) {
      ExperimentSpec spec = parse_experiment_spec(ref_spec_path);
      apply_overrides(spec, seed, output, normalize, passes_incl);
      Dataset ds = load_dataset(spec.dataset, spec.normalize);
      auto obj = make_objective(ds, spec.objective, spec.lambda);
      Reference ref = compute_reference(*obj, spec.reference,
                                        spec.output_dir / "reference_cache");
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", ref.value);
      std::cout << "reference_value = " << buf << "\n";
      std::snprintf(buf, sizeof buf, "%.17g", ref.grad_norm_sq);
      std::cout << "reference_grad_norm_sq = " << buf << "\n";
      std::cout << "cache_hit = " << (ref.cache_hit ? "true" : "false")
                << "\n";
      return 0;
    }
    if (*sweep_cmd) {
      ExperimentSpec spec = parse_experiment_spec(sweep_spec_path);
      apply_overrides(spec, seed, output, normalize, passes_incl);
      std::vector<SweepRow> rows = run_sweep(spec);
      const SweepRow* best = nullptr;
      for (const SweepRow& row : rows) {
        if (row.diverged || row.passes_to_target < 0) continue;
        if (!best || row.passes_to_target < best->passes_to_target) best = &row;
      }
      std::cout << "wrote " << (spec.output_dir / "sweep.csv").string() << " ("
                << rows.size() << " configurations)\n";
      if (best)
        std::cout << "best: " << best->label << " reaches target at "
                  << best->passes_to_target << " passes\n";
      else
        std::cout << "no configuration reached the target\n";
      return 0;
    }
    if (*theory_cmd) {
      std::cout << format_theory_report(evaluate_theory(t));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sarahbb
