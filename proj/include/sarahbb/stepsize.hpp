#pragma once

#include <cstddef>
#include <variant>

#include "sarahbb/linalg.hpp"

namespace sarahbb {

// Finite-precision guards around the BB ratio. The analytic bound keeps the
// denominator positive on strongly convex problems; these floors catch the
// degenerate numerics the analysis assumes away.
struct SafeguardPolicy {
  double eps_denominator = 1e-12;  // floor on curvature relative to ||dw||^2
  double eta_max = 1e3;
  double eta_min = 1e-12;
};

struct FixedStep {
  double eta = 0.1;
};

// Per-iteration random BB ratio scaled by gamma / b_H.
struct RbbStep {
  double gamma = 0.1;
  double eta_0 = 0.1;
  SafeguardPolicy safeguard;
};

// Per-epoch BB from consecutive snapshots and their full gradients.
struct EpochBbStep {
  double eta_0 = 0.1;
  SafeguardPolicy safeguard;
};

using StepRule = std::variant<FixedStep, RbbStep, EpochBbStep>;

struct StepResult {
  double eta = 0.0;
  bool fallback = false;  // denominator under the floor, previous step reused
};

/// eta' = (gamma / b_H) * ||w_k - w_prev||^2 / ((w_k - w_prev)^T (g_k - g_prev))
/// g_k, g_prev must be subsample mean gradients on the same subsample.
/// Falls back to last_accepted when the denominator is below
/// eps_denominator * ||dw||^2; otherwise the result is clamped into
/// [eta_min, eta_max]. Throws if w_k == w_prev.
StepResult rbb_step(const DenseVector& w_k, const DenseVector& w_prev,
                    const DenseVector& g_k, const DenseVector& g_prev,
                    std::size_t b_H, double gamma,
                    const SafeguardPolicy& policy, double last_accepted);

// Analytic ceiling gamma / (mu * b_H) every accepted RBB step respects on a
// mu-strongly convex objective.
double rbb_upper_bound(double mu, double gamma, std::size_t b_H);

/// (1/m) * ||dw||^2 / (dw^T dg) from consecutive outer snapshots and their
/// full gradients; same safeguard behavior as rbb_step.
StepResult epoch_bb_step(const DenseVector& snapshot_k,
                         const DenseVector& snapshot_prev,
                         const DenseVector& fullgrad_k,
                         const DenseVector& fullgrad_prev, std::size_t m,
                         const SafeguardPolicy& policy, double last_accepted);

// 0.1 for small step-size batches, 1.0 otherwise.
inline double default_gamma(std::size_t b_H) { return b_H < 50 ? 0.1 : 1.0; }

}  // namespace sarahbb
