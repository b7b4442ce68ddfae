#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sarahbb/dataset.hpp"
#include "sarahbb/objective.hpp"
#include "sarahbb/solver.hpp"
#include "sarahbb/theory.hpp"

namespace sarahbb {

enum class ObjectiveKind { logistic, ridge };

enum class DatasetOrigin { synthetic, file, fetch };

struct DatasetSpecEntry {
  DatasetOrigin origin = DatasetOrigin::synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path file;
  std::string fetch_name;
  std::filesystem::path cache_dir = "data";
  std::optional<std::filesystem::path> url_config;
  std::size_t dim_override = 0;
};

struct ReferencePolicy {
  SolverConfig method;        // long-horizon solve; zeros resolved from data
  double tolerance = 1e-16;   // on ||grad P(w*)||^2
  double max_passes = 4000.0; // effective-pass budget
};

struct RunSpec {
  std::string label;
  SolverConfig config;
};

struct ExperimentSpec {
  DatasetSpecEntry dataset;
  ObjectiveKind objective = ObjectiveKind::logistic;
  double lambda = 0.01;
  bool normalize = false;
  std::vector<RunSpec> runs;
  ReferencePolicy reference;
  std::filesystem::path output_dir = "out";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double epsilon = 1e-3;  // accuracy target fed to the theory report
  bool passes_include_stepsize = false;
  // sweep grids (sweep subcommand only)
  std::optional<SolverConfig> sweep_base;
  std::vector<double> sweep_eta_grid;
  std::vector<std::size_t> sweep_b_grid;
  std::vector<std::size_t> sweep_bH_grid;
  std::vector<double> sweep_gamma_grid;
  double sweep_target = 1e-6;
};

ExperimentSpec parse_experiment_spec(const std::filesystem::path& path);

Dataset load_dataset(const DatasetSpecEntry& spec, bool normalize);

std::unique_ptr<Objective> make_objective(const Dataset& ds,
                                          ObjectiveKind kind, double lambda);

// Fills sentinel zeros: m = 2n/b, fixed eta = 0.25/L, gamma by b_H size.
void resolve_config(const Objective& obj, SolverConfig& cfg);

struct Reference {
  DenseVector w_star;
  double value = 0.0;
  double grad_norm_sq = 0.0;
  bool cache_hit = false;
};

class ReferenceBudgetError : public std::runtime_error {
 public:
  ReferenceBudgetError(std::string what, DenseVector best, double grad_sq)
      : std::runtime_error(std::move(what)),
        best_w(std::move(best)),
        best_grad_norm_sq(grad_sq) {}
  DenseVector best_w;
  double best_grad_norm_sq;
};

/// Long-horizon solve until ||grad P||^2 <= tolerance, cached on disk keyed
/// by (dataset content, objective kind, lambda, tolerance).
Reference compute_reference(const Objective& obj, const ReferencePolicy& policy,
                            const std::filesystem::path& cache_dir);

// Deterministic full-gradient descent with step 1/L; independent of the
// stochastic solvers, used as the reference cross-check.
DenseVector gradient_descent_reference(const Objective& obj, double tolerance,
                                       std::size_t max_iters);

struct RunOutcome {
  std::string label;
  std::uint64_t seed = 0;
  RunTrace trace;
  bool diverged = false;
};

struct ExperimentResult {
  std::vector<RunOutcome> outcomes;
  Reference reference;
  int exit_code = 0;
};

/// Executes every (run x seed), writes per-run CSV traces (with a
/// suboptimality column), a mean trace per run, a combined long-format CSV,
/// theory blocks and a summary. Returns nonzero when any run diverged.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct SweepRow {
  std::string label;
  SolverConfig config;
  double final_suboptimality = 0.0;
  double passes_to_target = -1.0;  // -1 = target not reached
  bool diverged = false;
};

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec);

// Default fixed-step grid: 7 log-spaced points in [1e-3, 1].
std::vector<double> default_eta_grid();

int cli_main(int argc, const char* const* argv);

}  // namespace sarahbb
