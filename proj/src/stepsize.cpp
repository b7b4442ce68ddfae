#include "sarahbb/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sarahbb {

namespace {

StepResult bb_ratio(const DenseVector& w_k, const DenseVector& w_prev,
                    const DenseVector& g_k, const DenseVector& g_prev,
                    double scale, const SafeguardPolicy& policy,
                    double last_accepted, const char* caller) {
  if (w_k.size() != w_prev.size() || g_k.size() != g_prev.size() ||
      w_k.size() != g_k.size())
    throw std::invalid_argument(std::string(caller) + ": dimension mismatch");
  double dw_sq = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < w_k.size(); ++j) {
    double dw = w_k[j] - w_prev[j];
    dw_sq += dw * dw;
    den += dw * (g_k[j] - g_prev[j]);
  }
  if (dw_sq == 0.0)
    throw std::invalid_argument(std::string(caller) + ": degenerate step");
  if (!(den >= policy.eps_denominator * dw_sq)) return {last_accepted, true};
  double eta = scale * (dw_sq / den);
  if (!std::isfinite(eta)) return {last_accepted, true};
  eta = std::clamp(eta, policy.eta_min, policy.eta_max);
  return {eta, false};
}

}  // namespace

StepResult rbb_step(const DenseVector& w_k, const DenseVector& w_prev,
                    const DenseVector& g_k, const DenseVector& g_prev,
                    std::size_t b_H, double gamma,
                    const SafeguardPolicy& policy, double last_accepted) {
  if (b_H == 0) throw std::invalid_argument("rbb_step: b_H must be >= 1");
  if (gamma <= 0.0) throw std::invalid_argument("rbb_step: gamma must be > 0");
  return bb_ratio(w_k, w_prev, g_k, g_prev,
                  gamma / static_cast<double>(b_H), policy, last_accepted,
                  "rbb_step");
}

double rbb_upper_bound(double mu, double gamma, std::size_t b_H) {
  if (mu <= 0.0) throw std::invalid_argument("rbb_upper_bound: mu must be > 0");
  if (b_H == 0)
    throw std::invalid_argument("rbb_upper_bound: b_H must be >= 1");
  return gamma / (mu * static_cast<double>(b_H));
}

StepResult epoch_bb_step(const DenseVector& snapshot_k,
                         const DenseVector& snapshot_prev,
                         const DenseVector& fullgrad_k,
                         const DenseVector& fullgrad_prev, std::size_t m,
                         const SafeguardPolicy& policy, double last_accepted) {
  if (m == 0) throw std::invalid_argument("epoch_bb_step: m must be >= 1");
  return bb_ratio(snapshot_k, snapshot_prev, fullgrad_k, fullgrad_prev,
                  1.0 / static_cast<double>(m), policy, last_accepted,
                  "epoch_bb_step");
}

}  // namespace sarahbb
