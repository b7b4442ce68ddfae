#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here stays independent of the library paths it is used to check: finite
// differences for gradients, exhaustive subset enumeration for estimator
// laws, long-double summation for objective values.

#include <cstdint>
#include <functional>
#include <vector>

#include "sarahbb/dataset.hpp"
#include "sarahbb/linalg.hpp"
#include "sarahbb/objective.hpp"
#include "sarahbb/rng.hpp"
#include "sarahbb/solver.hpp"

namespace testsupport {

using sarahbb::Dataset;
using sarahbb::DenseVector;
using sarahbb::Example;
using sarahbb::SparseVector;

// Central finite differences, default step 1e-6.
inline DenseVector finite_difference_gradient(
    const std::function<double(const DenseVector&)>& f, const DenseVector& w,
    double h = 1e-6) {
  DenseVector g(w.size());
  DenseVector wp = w;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double orig = wp[j];
    wp[j] = orig + h;
    double fp = f(wp);
    wp[j] = orig - h;
    double fm = f(wp);
    wp[j] = orig;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_err(double got, double want) {
  double denom = std::max(std::abs(want), 1e-30);
  return std::abs(got - want) / denom;
}

inline double max_rel_err(const DenseVector& got, const DenseVector& want) {
  double scale = 0.0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-30);
  double worst = 0.0;
  for (std::size_t j = 0; j < got.size(); ++j)
    worst = std::max(worst, std::abs(got[j] - want[j]) / scale);
  return worst;
}

// Three fixed logistic examples in d = 3.
inline Dataset tiny_logistic_dataset() {
  std::vector<Example> rows(3);
  rows[0].features = SparseVector(3, {0, 1}, {0.5, -1.25});
  rows[0].label = 1.0;
  rows[1].features = SparseVector(3, {1, 2}, {2.0, 0.75});
  rows[1].label = -1.0;
  rows[2].features = SparseVector(3, {0, 2}, {-0.5, 1.5});
  rows[2].label = 1.0;
  return Dataset("tiny-logistic", 3, std::move(rows));
}

// Small seeded logistic instance used by estimator-law and enumeration tests.
inline Dataset small_dataset(std::size_t n, std::size_t d,
                             std::uint64_t seed = 11) {
  sarahbb::SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  return sarahbb::generate_synthetic(spec);
}

// The desk-scale benchmark problem: n=1000, d=20 classification rows scaled
// to unit norm, so logistic lambda=0.01 gives mu = 0.01 and L = 0.26.
inline Dataset benchmark_dataset() {
  sarahbb::SyntheticSpec spec;
  spec.n = 1000;
  spec.d = 20;
  spec.seed = 7;
  return sarahbb::normalize_rows(sarahbb::generate_synthetic(spec)).dataset;
}

// Sparse binary classification data shaped like the a8a benchmark:
// 22696 rows, dimension 123, about 14 active features per row.
inline Dataset a8a_shaped_dataset() {
  sarahbb::Rng rng(99);
  DenseVector w_true(123);
  for (double& x : w_true) x = rng.normal();
  std::vector<Example> rows;
  rows.reserve(22696);
  for (std::size_t i = 0; i < 22696; ++i) {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    for (std::uint32_t j = 0; j < 123; ++j) {
      if (rng.uniform01() < 14.0 / 123.0) {
        idx.push_back(j);
        val.push_back(1.0);
      }
    }
    Example ex;
    ex.features = SparseVector(123, idx, val);
    ex.label = sarahbb::dot(ex.features, w_true) >= 0.0 ? 1.0 : -1.0;
    if (rng.uniform01() < 0.05) ex.label = -ex.label;
    rows.push_back(std::move(ex));
  }
  return Dataset("a8a-shaped", 123, std::move(rows));
}

// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::uint32_t>> all_subsets(std::size_t n,
                                                           std::size_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(k);
  for (std::size_t j = 0; j < k; ++j) cur[j] = static_cast<std::uint32_t>(j);
  for (;;) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

inline DenseVector random_dense(std::size_t d, sarahbb::Rng& rng,
                                double scale = 1.0) {
  DenseVector v(d);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Field-by-field bit equality of two run traces.
inline bool traces_identical(const sarahbb::RunTrace& a,
                             const sarahbb::RunTrace& b) {
  if (a.final_w != b.final_w) return false;
  if (a.total_component_grad_evals != b.total_component_grad_evals)
    return false;
  if (a.total_stepsize_grad_evals != b.total_stepsize_grad_evals) return false;
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const sarahbb::TraceRecord& x = a.records[i];
    const sarahbb::TraceRecord& y = b.records[i];
    if (x.outer_index != y.outer_index) return false;
    if (x.effective_passes != y.effective_passes) return false;
    if (x.effective_passes_incl_stepsize != y.effective_passes_incl_stepsize)
      return false;
    if (x.objective_value != y.objective_value) return false;
    if (x.grad_norm_sq != y.grad_norm_sq) return false;
    if (x.step_min != y.step_min || x.step_mean != y.step_mean ||
        x.step_max != y.step_max)
      return false;
    if (x.fallback_count != y.fallback_count) return false;
  }
  return true;
}

}  // namespace testsupport
