#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "sarahbb/dataset.hpp"
#include "sarahbb/linalg.hpp"

namespace sarahbb {

// One counter per solver run; gradient calls are re-entrant, the counter is
// the only mutable piece, so diagnostics pass nullptr to stay off the books.
struct EvalCounter {
  std::uint64_t component_grad_evals = 0;
};

struct ObjectiveConstants {
  double L = 0.0;   // component smoothness
  double mu = 0.0;  // strong convexity
  std::size_t n = 0;
};

/// Finite-sum objective P(w) = (1/n) sum_i f_i(w) over an immutable dataset,
/// f_i(w) = loss_i(x_i^T w) + (lambda/2) ||w||^2.
///
/// Dataset sweeps (value, full_gradient) run as OpenMP kernels over
/// fixed-size blocks whose partials combine in block order, so results are
/// bit-identical for any thread count. The *_serial variants are the plain
/// left-to-right references kept for testing and benchmarking.
class Objective {
 public:
  virtual ~Objective() = default;

  const Dataset& dataset() const { return dataset_; }
  std::size_t n() const { return dataset_.n(); }
  std::size_t dim() const { return dataset_.dim(); }
  double lambda() const { return lambda_; }

  double value(const DenseVector& w) const;
  double value_serial(const DenseVector& w) const;

  void full_gradient(const DenseVector& w, DenseVector& out,
                     EvalCounter* counter = nullptr) const;
  DenseVector full_gradient(const DenseVector& w,
                            EvalCounter* counter = nullptr) const;
  DenseVector full_gradient_serial(const DenseVector& w,
                                   EvalCounter* counter = nullptr) const;

  // Mean of component gradients over S (non-empty, indices < n).
  void minibatch_gradient(std::span<const std::uint32_t> S,
                          const DenseVector& w, DenseVector& out,
                          EvalCounter* counter = nullptr) const;
  DenseVector minibatch_gradient(std::span<const std::uint32_t> S,
                                 const DenseVector& w,
                                 EvalCounter* counter = nullptr) const;

  DenseVector component_gradient(std::size_t i, const DenseVector& w,
                                 EvalCounter* counter = nullptr) const;

  // Analytic constants: L = coeff * max_i ||x_i||^2 + lambda.
  ObjectiveConstants constants() const;

  double max_row_norm_sq() const { return max_row_norm_sq_; }

 protected:
  Objective(const Dataset& dataset, double lambda);

  virtual double component_loss(std::size_t i, double xw) const = 0;
  // d loss_i / d(x_i^T w)
  virtual double loss_derivative(std::size_t i, double xw) const = 0;
  virtual double smoothness_coeff() const = 0;
  virtual double strong_convexity() const = 0;

  const Dataset& dataset_;
  double lambda_;
  double max_row_norm_sq_ = 0.0;

 private:
  void check_dim(const DenseVector& w) const;
  double data_value_blocked(const DenseVector& w) const;
  void data_gradient_blocked(const DenseVector& w, DenseVector& out) const;
};

class LogisticL2 : public Objective {
 public:
  // lambda > 0: the data term is convex but not strongly so, mu = lambda.
  LogisticL2(const Dataset& dataset, double lambda);

 protected:
  double component_loss(std::size_t i, double xw) const override;
  double loss_derivative(std::size_t i, double xw) const override;
  double smoothness_coeff() const override { return 0.25; }
  double strong_convexity() const override { return lambda_; }
};

class RidgeL2 : public Objective {
 public:
  // mu = lambda + smallest eigenvalue of the Gram matrix (1/n) X^T X,
  // computed only when dim <= eigen_dim_limit, else mu = lambda.
  RidgeL2(const Dataset& dataset, double lambda,
          std::size_t eigen_dim_limit = 256);

 protected:
  double component_loss(std::size_t i, double xw) const override;
  double loss_derivative(std::size_t i, double xw) const override;
  double smoothness_coeff() const override { return 1.0; }
  double strong_convexity() const override { return lambda_ + gram_min_eig_; }

 private:
  double gram_min_eig_ = 0.0;
};

}  // namespace sarahbb
