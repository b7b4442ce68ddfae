#include "sarahbb/objective.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace sarahbb {

namespace {

// Examples per reduction block. Partials combine in ascending block order,
// which fixes the floating-point result independent of thread count.
constexpr std::size_t kReduceBlock = 1024;

}  // namespace

Objective::Objective(const Dataset& dataset, double lambda)
    : dataset_(dataset), lambda_(lambda) {
  for (std::size_t i = 0; i < dataset_.n(); ++i)
    max_row_norm_sq_ =
        std::max(max_row_norm_sq_, dataset_.example(i).features.norm_sq());
}

void Objective::check_dim(const DenseVector& w) const {
  if (w.size() != dim())
    throw std::invalid_argument("objective: iterate dimension mismatch");
}

double Objective::data_value_blocked(const DenseVector& w) const {
  const std::size_t nn = n();
  const std::size_t nblocks = (nn + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, nn);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      s += component_loss(i, dot(dataset_.example(i).features, w));
    partial[static_cast<std::size_t>(blk)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double Objective::value(const DenseVector& w) const {
  check_dim(w);
  return data_value_blocked(w) / static_cast<double>(n()) +
         0.5 * lambda_ * norm_sq(w);
}

double Objective::value_serial(const DenseVector& w) const {
  check_dim(w);
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i)
    s += component_loss(i, dot(dataset_.example(i).features, w));
  return s / static_cast<double>(n()) + 0.5 * lambda_ * norm_sq(w);
}

void Objective::data_gradient_blocked(const DenseVector& w,
                                      DenseVector& out) const {
  const std::size_t nn = n();
  const std::size_t d = dim();
  const std::size_t nblocks = (nn + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks * d, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kReduceBlock;
    const std::size_t hi = std::min(lo + kReduceBlock, nn);
    double* acc = partial.data() + static_cast<std::size_t>(blk) * d;
    for (std::size_t i = lo; i < hi; ++i) {
      const SparseVector& x = dataset_.example(i).features;
      double g = loss_derivative(i, dot(x, w));
      const auto& idx = x.indices();
      const auto& val = x.values();
      for (std::size_t j = 0; j < idx.size(); ++j) acc[idx[j]] += g * val[j];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t blk = 0; blk < nblocks; ++blk) {
    const double* acc = partial.data() + blk * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += acc[j];
  }
}

void Objective::full_gradient(const DenseVector& w, DenseVector& out,
                              EvalCounter* counter) const {
  check_dim(w);
  out.resize(dim());
  data_gradient_blocked(w, out);
  const double inv_n = 1.0 / static_cast<double>(n());
  for (std::size_t j = 0; j < dim(); ++j)
    out[j] = out[j] * inv_n + lambda_ * w[j];
  if (counter) counter->component_grad_evals += n();
}

DenseVector Objective::full_gradient(const DenseVector& w,
                                     EvalCounter* counter) const {
  DenseVector out(dim());
  full_gradient(w, out, counter);
  return out;
}

DenseVector Objective::full_gradient_serial(const DenseVector& w,
                                            EvalCounter* counter) const {
  check_dim(w);
  DenseVector out(dim(), 0.0);
  for (std::size_t i = 0; i < n(); ++i) {
    const SparseVector& x = dataset_.example(i).features;
    axpy(loss_derivative(i, dot(x, w)), x, out);
  }
  const double inv_n = 1.0 / static_cast<double>(n());
  for (std::size_t j = 0; j < dim(); ++j)
    out[j] = out[j] * inv_n + lambda_ * w[j];
  if (counter) counter->component_grad_evals += n();
  return out;
}

void Objective::minibatch_gradient(std::span<const std::uint32_t> S,
                                   const DenseVector& w, DenseVector& out,
                                   EvalCounter* counter) const {
  check_dim(w);
  if (S.empty())
    throw std::invalid_argument("minibatch_gradient: empty index set");
  if (S.size() == n()) {
    // Full index set: use the full-gradient kernel so the result is
    // bit-identical to full_gradient (the collapse identities rely on it).
    full_gradient(w, out, counter);
    return;
  }
  out.assign(dim(), 0.0);
  for (std::uint32_t i : S) {
    if (i >= n())
      throw std::out_of_range("minibatch_gradient: index out of range");
    const SparseVector& x = dataset_.example(i).features;
    axpy(loss_derivative(i, dot(x, w)), x, out);
  }
  const double inv_b = 1.0 / static_cast<double>(S.size());
  for (std::size_t j = 0; j < dim(); ++j)
    out[j] = out[j] * inv_b + lambda_ * w[j];
  if (counter) counter->component_grad_evals += S.size();
}

DenseVector Objective::minibatch_gradient(std::span<const std::uint32_t> S,
                                          const DenseVector& w,
                                          EvalCounter* counter) const {
  DenseVector out;
  minibatch_gradient(S, w, out, counter);
  return out;
}

DenseVector Objective::component_gradient(std::size_t i, const DenseVector& w,
                                          EvalCounter* counter) const {
  if (i >= n())
    throw std::out_of_range("component_gradient: index out of range");
  std::uint32_t idx = static_cast<std::uint32_t>(i);
  // Shares the minibatch path so the singleton identity holds bit-exactly.
  return minibatch_gradient(std::span<const std::uint32_t>(&idx, 1), w,
                            counter);
}

ObjectiveConstants Objective::constants() const {
  ObjectiveConstants c;
  c.L = smoothness_coeff() * max_row_norm_sq_ + lambda_;
  c.mu = strong_convexity();
  c.n = n();
  return c;
}

LogisticL2::LogisticL2(const Dataset& dataset, double lambda)
    : Objective(dataset, lambda) {
  if (lambda <= 0.0)
    throw std::invalid_argument("LogisticL2: lambda must be > 0");
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    double y = dataset.example(i).label;
    if (y != 1.0 && y != -1.0)
      throw std::invalid_argument("LogisticL2: labels must be +1/-1");
  }
}

double LogisticL2::component_loss(std::size_t i, double xw) const {
  // softplus identity keeps exp in range for any margin
  double t = dataset_.example(i).label * xw;
  return std::max(-t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double LogisticL2::loss_derivative(std::size_t i, double xw) const {
  double y = dataset_.example(i).label;
  double t = y * xw;
  double sig;  // sigmoid(-t) without overflow
  if (t >= 0.0) {
    double e = std::exp(-t);
    sig = e / (1.0 + e);
  } else {
    sig = 1.0 / (1.0 + std::exp(t));
  }
  return -y * sig;
}

RidgeL2::RidgeL2(const Dataset& dataset, double lambda,
                 std::size_t eigen_dim_limit)
    : Objective(dataset, lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("RidgeL2: lambda must be >= 0");
  if (dataset.dim() <= eigen_dim_limit) {
    const std::size_t d = dataset.dim();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < dataset.n(); ++i) {
      const SparseVector& x = dataset.example(i).features;
      const auto& idx = x.indices();
      const auto& val = x.values();
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
          gram(idx[a], idx[b]) += val[a] * val[b];
    }
    gram /= static_cast<double>(dataset.n());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    gram_min_eig_ = std::max(0.0, solver.eigenvalues().minCoeff());
  }
  if (lambda + gram_min_eig_ <= 0.0)
    throw std::invalid_argument(
        "RidgeL2: lambda + data curvature must be > 0 for strong convexity");
}

double RidgeL2::component_loss(std::size_t i, double xw) const {
  double r = xw - dataset_.example(i).label;
  return 0.5 * r * r;
}

double RidgeL2::loss_derivative(std::size_t i, double xw) const {
  return xw - dataset_.example(i).label;
}

}  // namespace sarahbb
