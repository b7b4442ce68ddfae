#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

namespace sarahbb {

struct TheoryInputs {
  double L = 0.0;
  double mu = 0.0;
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t b_H = 0;
  double gamma = 0.0;
  std::size_t m = 0;
  double epsilon = 0.0;  // target accuracy on ||grad P||^2
};

struct TheoryReport {
  double condition_13_lhs = 0.0;
  bool condition_13_holds = false;
  double rho_m = 0.0;
  bool linear_rate_valid = false;  // rho_m < 1
  double single_loop_complexity = 0.0;
  double multi_loop_complexity = 0.0;
  bool gamma_gt_epsilon = false;  // informational only
};

/// LHS of the one-loop convergence condition
///   (L^2 g^2 / (mu^2 b b_H^2)) ((n-b)/(n-1)) m - (1 - L g / (mu b_H)) <= 0
/// Returns (lhs, lhs <= 0). Requires n >= 2.
std::pair<double, bool> check_condition_13(const TheoryInputs& t);

/// Per-outer-loop contraction factor b_H / (gamma (m+1)). A linear rate
/// claim is meaningful only when the result is < 1.
double rho_m(const TheoryInputs& t);

/// One-outer-loop cost n + 2m in component-gradient evaluations.
/// m = ceil(2 mu b_H gap / (gamma eps)) when the initial suboptimality gap
/// is supplied, else the order-level proxy m = ceil(mu b_H / (gamma eps)).
double complexity_single_loop(const TheoryInputs& t,
                              std::optional<double> initial_gap = std::nullopt);

/// (n + mu b_H / (gamma eps)) * log(1/eps), order-level. Requires eps in (0,1).
double complexity_multi_loop(const TheoryInputs& t);

TheoryReport evaluate_theory(const TheoryInputs& t,
                             std::optional<double> initial_gap = std::nullopt);

/// Bisection witness: largest power-halving gamma in (0, gamma_hi] making
/// condition 13 hold for the given inputs, if one exists.
std::optional<double> feasible_gamma(TheoryInputs t, double gamma_hi = 1.0);

// Flat key-value block embedded in experiment reports.
std::string format_theory_report(const TheoryReport& r);

}  // namespace sarahbb
