#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sarahbb {

// Model coordinates (iterates, gradients, estimators). All arithmetic is
// 64-bit: the convergence targets sit at 1e-8 and below.
using DenseVector = std::vector<double>;

/// Sparse feature row in canonical form: indices strictly increasing,
/// every index < dim, no stored zero values.
class SparseVector {
 public:
  SparseVector() = default;

  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  // Canonicalizes: sorts by index, sums duplicates, drops zeros.
  SparseVector(std::size_t dim, std::vector<std::uint32_t> indices,
               std::vector<double> values)
      : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
    if (indices_.size() != values_.size())
      throw std::invalid_argument("SparseVector: index/value length mismatch");
    canonicalize();
  }

  static SparseVector from_dense(const DenseVector& v) {
    SparseVector out(v.size());
    for (std::uint32_t j = 0; j < v.size(); ++j) {
      if (v[j] != 0.0) {
        out.indices_.push_back(j);
        out.values_.push_back(v[j]);
      }
    }
    return out;
  }

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return indices_.size(); }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }

  double norm_sq() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

  SparseVector scaled(double alpha) const {
    SparseVector out(dim_);
    out.indices_ = indices_;
    out.values_.reserve(values_.size());
    for (double v : values_) out.values_.push_back(alpha * v);
    return out;
  }

  DenseVector to_dense() const {
    DenseVector out(dim_, 0.0);
    for (std::size_t j = 0; j < indices_.size(); ++j)
      out[indices_[j]] = values_[j];
    return out;
  }

  bool operator==(const SparseVector& o) const {
    return dim_ == o.dim_ && indices_ == o.indices_ && values_ == o.values_;
  }

 private:
  void canonicalize() {
    for (std::uint32_t idx : indices_) {
      if (idx >= dim_)
        throw std::invalid_argument("SparseVector: index out of range");
    }
    if (!std::is_sorted(indices_.begin(), indices_.end())) {
      std::vector<std::size_t> order(indices_.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return indices_[a] < indices_[b];
      });
      std::vector<std::uint32_t> idx;
      std::vector<double> val;
      idx.reserve(order.size());
      val.reserve(order.size());
      for (std::size_t k : order) {
        idx.push_back(indices_[k]);
        val.push_back(values_[k]);
      }
      indices_ = std::move(idx);
      values_ = std::move(val);
    }
    std::size_t w = 0;
    for (std::size_t r = 0; r < indices_.size(); ++r) {
      if (w > 0 && indices_[w - 1] == indices_[r]) {
        values_[w - 1] += values_[r];
      } else {
        indices_[w] = indices_[r];
        values_[w] = values_[r];
        ++w;
      }
    }
    indices_.resize(w);
    values_.resize(w);
    // drop zeros (also zeros created by duplicate cancellation)
    std::size_t o = 0;
    for (std::size_t r = 0; r < indices_.size(); ++r) {
      if (values_[r] != 0.0) {
        indices_[o] = indices_[r];
        values_[o] = values_[r];
        ++o;
      }
    }
    indices_.resize(o);
    values_.resize(o);
  }

  std::size_t dim_ = 0;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

inline double dot(const SparseVector& a, const DenseVector& b) {
  if (a.dim() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  const auto& idx = a.indices();
  const auto& val = a.values();
  for (std::size_t j = 0; j < idx.size(); ++j) s += val[j] * b[idx[j]];
  return s;
}

// y[i] += alpha * x[i] on stored entries; alpha == 0 leaves y bit-unchanged.
inline void axpy(double alpha, const SparseVector& x, DenseVector& y) {
  if (x.dim() != y.size())
    throw std::invalid_argument("axpy: dimension mismatch");
  if (alpha == 0.0) return;
  const auto& idx = x.indices();
  const auto& val = x.values();
  for (std::size_t j = 0; j < idx.size(); ++j) y[idx[j]] += alpha * val[j];
}

inline double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double norm_sq(const DenseVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace sarahbb
