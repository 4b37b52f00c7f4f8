#pragma once

// Compressed-sparse-row real square matrices and the handful of operations
// the difference operators need (products, commutators, norms, weighted
// symmetry residuals).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mkg/error.hpp"
#include "mkg/summation.hpp"

namespace mkg {

/// Row r holds the coefficients of f(y) in (A f)(x_r). Columns within a row
/// are strictly increasing and no stored value is exactly zero.
class SparseOperator {
 public:
  SparseOperator() : row_ptr_(1, 0) {}
  explicit SparseOperator(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_vals(std::size_t r) const {
    return {vals_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  double value(std::size_t r, std::size_t c) const {
    const auto cs = row_cols(r);
    const auto it = std::lower_bound(cs.begin(), cs.end(), static_cast<std::uint32_t>(c));
    if (it == cs.end() || *it != c) return 0.0;
    return row_vals(r)[static_cast<std::size_t>(it - cs.begin())];
  }

  std::vector<double> apply(std::span<const double> f) const {
    if (f.size() != dim_) fail(ErrorKind::dimension, "apply: vector length does not match operator");
    std::vector<double> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      const auto cs = row_cols(r);
      const auto vs = row_vals(r);
      CompensatedSum<double> acc;
      for (std::size_t k = 0; k < cs.size(); ++k) acc += vs[k] * f[cs[k]];
      out[r] = acc.value();
    }
    return out;
  }

  double frobenius_norm() const {
    double s = 0;
    for (double v : vals_) s += v * v;
    return std::sqrt(s);
  }

  /// Maximum absolute row sum (operator norm induced by the max norm).
  double inf_norm() const {
    double best = 0;
    for (std::size_t r = 0; r < dim_; ++r) {
      double s = 0;
      for (double v : row_vals(r)) s += std::abs(v);
      best = std::max(best, s);
    }
    return best;
  }

  double max_abs() const {
    double best = 0;
    for (double v : vals_) best = std::max(best, std::abs(v));
    return best;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t r = 0; r < dim_; ++r) {
      const auto cs = row_cols(r);
      const auto vs = row_vals(r);
      for (std::size_t k = 0; k < cs.size(); ++k) m(static_cast<Eigen::Index>(r), cs[k]) = vs[k];
    }
    return m;
  }

  friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

 private:
  friend class OperatorBuilder;
  friend SparseOperator axpby(double, const SparseOperator&, double, const SparseOperator&);
  friend SparseOperator multiply(const SparseOperator&, const SparseOperator&);

  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

/// Row-by-row assembly. Duplicate (row, col) contributions are summed in
/// insertion order; entries that end up exactly zero are dropped.
class OperatorBuilder {
 public:
  explicit OperatorBuilder(std::size_t dim) : dim_(dim), rows_(dim) {}

  void add(std::size_t row, std::size_t col, double v) {
    if (row >= dim_ || col >= dim_) fail(ErrorKind::dimension, "operator entry out of range");
    rows_[row].emplace_back(static_cast<std::uint32_t>(col), v);
  }

  SparseOperator finish() && {
    SparseOperator op(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      auto& entries = rows_[r];
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t k = 0;
      while (k < entries.size()) {
        const auto col = entries[k].first;
        double v = 0;
        for (; k < entries.size() && entries[k].first == col; ++k) v += entries[k].second;
        if (v != 0.0) {
          op.cols_.push_back(col);
          op.vals_.push_back(v);
        }
      }
      op.row_ptr_[r + 1] = op.cols_.size();
      entries.clear();
      entries.shrink_to_fit();
    }
    return op;
  }

 private:
  std::size_t dim_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows_;
};

/// a*A + b*B via a sorted merge of each row pair.
inline SparseOperator axpby(double a, const SparseOperator& A, double b, const SparseOperator& B) {
  if (A.dim() != B.dim()) fail(ErrorKind::dimension, "operator dimensions disagree");
  SparseOperator out(A.dim());
  for (std::size_t r = 0; r < A.dim(); ++r) {
    const auto ac = A.row_cols(r), bc = B.row_cols(r);
    const auto av = A.row_vals(r), bv = B.row_vals(r);
    std::size_t i = 0, j = 0;
    auto emit = [&](std::uint32_t c, double v) {
      if (v != 0.0) {
        out.cols_.push_back(c);
        out.vals_.push_back(v);
      }
    };
    while (i < ac.size() || j < bc.size()) {
      if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        emit(ac[i], a * av[i]);
        ++i;
      } else if (i == ac.size() || bc[j] < ac[i]) {
        emit(bc[j], b * bv[j]);
        ++j;
      } else {
        emit(ac[i], a * av[i] + b * bv[j]);
        ++i;
        ++j;
      }
    }
    out.row_ptr_[r + 1] = out.cols_.size();
  }
  return out;
}

inline SparseOperator operator+(const SparseOperator& A, const SparseOperator& B) { return axpby(1.0, A, 1.0, B); }
inline SparseOperator operator-(const SparseOperator& A, const SparseOperator& B) { return axpby(1.0, A, -1.0, B); }
inline SparseOperator operator*(double s, const SparseOperator& A) { return axpby(s, A, 0.0, SparseOperator(A.dim())); }

/// Row-wise product: row r of AB is sum_k A(r,k) * row k of B, accumulated in
/// a dense scratch row in ascending k, then compacted in column order.
inline SparseOperator multiply(const SparseOperator& A, const SparseOperator& B) {
  if (A.dim() != B.dim()) fail(ErrorKind::dimension, "operator dimensions disagree");
  const std::size_t n = A.dim();
  SparseOperator out(n);
  std::vector<double> scratch(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::uint32_t> pattern;
  for (std::size_t r = 0; r < n; ++r) {
    pattern.clear();
    const auto ac = A.row_cols(r);
    const auto av = A.row_vals(r);
    for (std::size_t i = 0; i < ac.size(); ++i) {
      const auto bc = B.row_cols(ac[i]);
      const auto bv = B.row_vals(ac[i]);
      for (std::size_t j = 0; j < bc.size(); ++j) {
        if (!touched[bc[j]]) {
          touched[bc[j]] = 1;
          pattern.push_back(bc[j]);
        }
        scratch[bc[j]] += av[i] * bv[j];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (auto c : pattern) {
      if (scratch[c] != 0.0) {
        out.cols_.push_back(c);
        out.vals_.push_back(scratch[c]);
      }
      scratch[c] = 0.0;
      touched[c] = 0;
    }
    out.row_ptr_[r + 1] = out.cols_.size();
  }
  return out;
}

inline SparseOperator operator*(const SparseOperator& A, const SparseOperator& B) { return multiply(A, B); }

/// [A, B] = AB - BA.
inline SparseOperator commutator(const SparseOperator& A, const SparseOperator& B) {
  if (A.dim() != B.dim()) fail(ErrorKind::dimension, "commutator: operator dimensions disagree");
  return multiply(A, B) - multiply(B, A);
}

/// Frobenius norm of the antisymmetric part of D^{1/2} A D^{-1/2}, divided by
/// the Frobenius norm of A. Zero exactly when A is self-adjoint for the
/// weighted inner product sum f g w.
inline double symmetrized_residual(const SparseOperator& A, std::span<const double> weight) {
  if (weight.size() != A.dim()) fail(ErrorKind::dimension, "weight length does not match operator");
  for (double w : weight) {
    if (!(w > 0)) fail(ErrorKind::domain, "symmetrized_residual: weights must be positive");
  }
  const double norm = A.frobenius_norm();
  if (norm == 0) return 0;
  std::vector<double> root(weight.size());
  std::transform(weight.begin(), weight.end(), root.begin(), [](double w) { return std::sqrt(w); });
  double s = 0;
  for (std::size_t r = 0; r < A.dim(); ++r) {
    const auto cs = A.row_cols(r);
    const auto vs = A.row_vals(r);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::size_t c = cs[k];
      const double sym = vs[k] * root[r] / root[c];
      const double mirrored = A.value(c, r) * root[c] / root[r];
      const double diff = sym - mirrored;
      // Pairs visited from both sides; entries whose mirror is absent are
      // visited once, so weight them twice to match the full matrix norm.
      s += (A.value(c, r) == 0.0 && c != r) ? 2 * diff * diff : diff * diff;
    }
  }
  return std::sqrt(s) / norm;
}

/// Dense symmetric matrix D^{1/2} A D^{-1/2}, symmetrized. Used to hand
/// self-adjoint operators to a symmetric eigensolver.
inline Eigen::MatrixXd symmetrized_dense(const SparseOperator& A, std::span<const double> weight) {
  if (weight.size() != A.dim()) fail(ErrorKind::dimension, "weight length does not match operator");
  Eigen::MatrixXd m = A.to_dense();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) *= std::sqrt(weight[static_cast<std::size_t>(r)] / weight[static_cast<std::size_t>(c)]);
    }
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace mkg
