#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarahbb/objective.hpp"
#include "sarahbb/rng.hpp"
#include "sarahbb/stepsize.hpp"

namespace sarahbb {

enum class Method {
  mb_sarah_rbb,
  mb_sarah_fixed,
  ms2gd_rbb,
  ms2gd_fixed,
  svrg,
  svrg_bb,
  sgd,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct SolverConfig {
  Method method = Method::mb_sarah_rbb;
  std::size_t m = 1;            // inner-loop length (update frequency)
  std::size_t b = 1;            // gradient mini-batch size
  std::size_t b_H = 0;          // step-size mini-batch size; 0 when unused
  std::size_t outer_count = 1;  // number of outer loops
  StepRule step = FixedStep{};
  std::uint64_t seed = 0;
  DenseVector w0;  // empty = zero vector

  // Optional per-inner-iteration trace. Diagnostic evaluations made for the
  // trace never touch the work counters.
  bool dense_trace = false;
  bool dense_trace_gap = false;  // also record ||grad P(w_k) - v_k||^2
};

struct TraceRecord {
  std::size_t outer_index = 0;  // 1-based
  double effective_passes = 0.0;
  double effective_passes_incl_stepsize = 0.0;
  double objective_value = 0.0;
  double grad_norm_sq = 0.0;
  double step_min = 0.0;
  double step_mean = 0.0;
  double step_max = 0.0;
  std::size_t fallback_count = 0;
};

struct DenseTraceRecord {
  std::size_t outer_index = 0;
  std::size_t inner_index = 0;  // 0 = the eta_0 step
  double eta = 0.0;
  bool fallback = false;
  double v_norm_sq = 0.0;
  double estimator_gap_sq = -1.0;  // -1 unless dense_trace_gap
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<DenseTraceRecord> dense;
  DenseVector final_w;
  std::uint64_t total_component_grad_evals = 0;
  std::uint64_t total_stepsize_grad_evals = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t outer, RunTrace partial)
      : std::runtime_error("objective diverged (non-finite value) at outer " +
                           std::to_string(outer)),
        partial_trace(std::move(partial)) {}
  RunTrace partial_trace;
};

/// Uniformly random k-subset of {0..n-1}, returned sorted. Deterministic
/// given the generator state; advances it.
std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k, Rng& rng);

/// v_k = grad P_S(w_k) - grad P_S(w_prev) + v_prev; costs exactly 2|S|
/// component-gradient evaluations. On the full index set the recursion
/// collapses to grad P(w_k) bit-exactly; with w_k == w_prev it returns
/// v_prev bit-exactly.
DenseVector sarah_estimator_update(const DenseVector& v_prev,
                                   const Objective& obj,
                                   std::span<const std::uint32_t> S,
                                   const DenseVector& w_k,
                                   const DenseVector& w_prev,
                                   EvalCounter* counter = nullptr);

/// v_k = grad P_S(w_k) - grad P_S(snapshot) + fullgrad_snapshot. Unbiased
/// given the snapshot; costs exactly 2|S| component-gradient evaluations.
DenseVector svrg_estimator(const Objective& obj,
                           std::span<const std::uint32_t> S,
                           const DenseVector& w_k, const DenseVector& snapshot,
                           const DenseVector& fullgrad_snapshot,
                           EvalCounter* counter = nullptr);

void validate_config(const Objective& obj, const SolverConfig& cfg);

/// Runs the configured method. One trace record per outer loop; deterministic
/// given the seed (bit-identical traces for identical inputs, independent of
/// thread count). Throws DivergenceError when a recorded objective value is
/// non-finite.
RunTrace run_solver(const Objective& obj, const SolverConfig& cfg);

void write_trace_csv(const RunTrace& trace, std::ostream& out);

}  // namespace sarahbb
