#include "sarahbb/theory.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sarahbb {

std::pair<double, bool> check_condition_13(const TheoryInputs& t) {
  if (t.n < 2) throw std::invalid_argument("condition 13: need n >= 2");
  if (t.b < 1 || t.b > t.n)
    throw std::invalid_argument("condition 13: need 1 <= b <= n");
  if (t.b_H < 1) throw std::invalid_argument("condition 13: need b_H >= 1");
  if (t.mu <= 0.0 || t.L < t.mu)
    throw std::invalid_argument("condition 13: need L >= mu > 0");
  if (t.gamma <= 0.0) throw std::invalid_argument("condition 13: gamma > 0");
  const double n = static_cast<double>(t.n);
  const double b = static_cast<double>(t.b);
  const double bH = static_cast<double>(t.b_H);
  const double m = static_cast<double>(t.m);
  const double variance_coeff =
      (t.L * t.L * t.gamma * t.gamma) / (t.mu * t.mu * b * bH * bH);
  const double correction = (n - b) / (n - 1.0);
  const double lhs =
      variance_coeff * correction * m - (1.0 - t.L * t.gamma / (t.mu * bH));
  return {lhs, lhs <= 0.0};
}

double rho_m(const TheoryInputs& t) {
  return static_cast<double>(t.b_H) /
         (t.gamma * (static_cast<double>(t.m) + 1.0));
}

double complexity_single_loop(const TheoryInputs& t,
                              std::optional<double> initial_gap) {
  if (t.epsilon <= 0.0)
    throw std::invalid_argument("complexity: epsilon must be > 0");
  const double bH = static_cast<double>(t.b_H);
  double m;
  if (initial_gap) {
    m = std::ceil(2.0 * t.mu * bH * (*initial_gap) / (t.gamma * t.epsilon));
  } else {
    m = std::ceil(t.mu * bH / (t.gamma * t.epsilon));
  }
  return static_cast<double>(t.n) + 2.0 * m;
}

double complexity_multi_loop(const TheoryInputs& t) {
  if (t.epsilon <= 0.0 || t.epsilon >= 1.0)
    throw std::invalid_argument("complexity: need 0 < epsilon < 1");
  const double bH = static_cast<double>(t.b_H);
  return (static_cast<double>(t.n) + t.mu * bH / (t.gamma * t.epsilon)) *
         std::log(1.0 / t.epsilon);
}

TheoryReport evaluate_theory(const TheoryInputs& t,
                             std::optional<double> initial_gap) {
  TheoryReport r;
  auto [lhs, holds] = check_condition_13(t);
  r.condition_13_lhs = lhs;
  r.condition_13_holds = holds;
  r.rho_m = rho_m(t);
  r.linear_rate_valid = r.rho_m < 1.0;
  r.single_loop_complexity = complexity_single_loop(t, initial_gap);
  r.multi_loop_complexity =
      (t.epsilon > 0.0 && t.epsilon < 1.0) ? complexity_multi_loop(t) : 0.0;
  r.gamma_gt_epsilon = t.gamma > t.epsilon;
  return r;
}

std::optional<double> feasible_gamma(TheoryInputs t, double gamma_hi) {
  // The LHS is continuous and increasing in gamma with limit -1 as
  // gamma -> 0+, so halving always terminates when mu b_H / L > 0.
  double g = gamma_hi;
  for (int iter = 0; iter < 4096; ++iter) {
    t.gamma = g;
    if (check_condition_13(t).second) return g;
    g *= 0.5;
    if (g <= 0.0) break;
  }
  return std::nullopt;
}

std::string format_theory_report(const TheoryReport& r) {
  char buf[512];
  std::string out;
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.12g\n", key, v);
    out += buf;
  };
  auto kb = [&](const char* key, bool v) {
    out += key;
    out += v ? " = true\n" : " = false\n";
  };
  kv("condition_13_lhs", r.condition_13_lhs);
  kb("condition_13_holds", r.condition_13_holds);
  kv("rho_m", r.rho_m);
  kb("linear_rate_valid", r.linear_rate_valid);
  kv("single_loop_complexity", r.single_loop_complexity);
  kv("multi_loop_complexity", r.multi_loop_complexity);
  kb("gamma_gt_epsilon", r.gamma_gt_epsilon);
  return out;
}

}  // namespace sarahbb
