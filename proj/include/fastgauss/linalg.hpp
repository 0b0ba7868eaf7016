#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "fastgauss/errors.hpp"

namespace fastgauss {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

namespace detail {

inline std::string shape(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail

/// Lower-triangular Cholesky factor L of an SPD matrix A = L Lᵀ.
template <typename Scalar>
class SpdFactor {
 public:
  SpdFactor() = default;
  explicit SpdFactor(Matrix<Scalar> lower) : lower_(std::move(lower)) {}

  Index dim() const { return lower_.rows(); }
  const Matrix<Scalar>& lower() const { return lower_; }

  /// L Lᵀ, mostly useful for checks.
  Matrix<Scalar> reconstruct() const { return lower_ * lower_.transpose(); }

  /// log |A| = 2 Σ log L_ii.
  Scalar log_det() const {
    return Scalar(2) * lower_.diagonal().array().log().sum();
  }

  /// Solves (L Lᵀ) X = B for a vector or a matrix right-hand side.
  template <typename Derived>
  Matrix<Scalar> solve(const Eigen::MatrixBase<Derived>& rhs) const {
    if (rhs.rows() != dim()) {
      throw DimensionMismatch("solve_spd: factor is " + detail::shape(dim(), dim()) +
                              ", right-hand side has " + std::to_string(rhs.rows()) + " rows");
    }
    Matrix<Scalar> x = lower_.template triangularView<Eigen::Lower>().solve(rhs);
    lower_.transpose().template triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

  /// L⁻¹ B (forward substitution only).
  template <typename Derived>
  Matrix<Scalar> solve_lower(const Eigen::MatrixBase<Derived>& rhs) const {
    return lower_.template triangularView<Eigen::Lower>().solve(rhs);
  }

  /// L⁻ᵀ B (back substitution only).
  template <typename Derived>
  Matrix<Scalar> solve_upper(const Eigen::MatrixBase<Derived>& rhs) const {
    return lower_.transpose().template triangularView<Eigen::Upper>().solve(rhs);
  }

 private:
  Matrix<Scalar> lower_;
};

/// Cholesky factorization of a symmetric positive definite matrix.
///
/// A pivot L_jj² at or below 1e-12·trace(A)/dim is reported as
/// NotPositiveDefinite, which separates genuine indefiniteness from roundoff.
/// Only the lower triangle of `a` is read after the symmetry check.
template <typename Derived>
SpdFactor<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("cholesky: matrix is " + detail::shape(a.rows(), a.cols()));
  }
  const Index dim = a.rows();
  if (dim == 0) return SpdFactor<Scalar>(Matrix<Scalar>(0, 0));

  const Scalar scale = a.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw InvalidParameter("cholesky: non-finite entry");
  const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-10) * scale) {
    throw InvalidParameter("cholesky: matrix is not symmetric (max asymmetry " +
                           std::to_string(static_cast<double>(asym)) + ")");
  }

  const Scalar threshold = Scalar(1e-12) * a.trace() / static_cast<Scalar>(dim);
  Eigen::LLT<Matrix<Scalar>, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success || !(threshold > Scalar(0))) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  Matrix<Scalar> lower = llt.matrixL();
  for (Index j = 0; j < dim; ++j) {
    const Scalar pivot = lower(j, j) * lower(j, j);
    if (!(pivot > threshold)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is " +
                                std::to_string(static_cast<double>(pivot)) +
                                ", below threshold " +
                                std::to_string(static_cast<double>(threshold)));
    }
  }
  return SpdFactor<Scalar>(std::move(lower));
}

template <typename Scalar, typename Derived>
Vector<Scalar> solve_spd(const SpdFactor<Scalar>& factor, const Eigen::MatrixBase<Derived>& b) {
  return factor.solve(b);
}

template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> gemm(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("gemm: " + detail::shape(a.rows(), a.cols()) + " times " +
                            detail::shape(b.rows(), b.cols()));
  }
  return a * b;
}

template <typename DerivedA, typename DerivedX>
Vector<typename DerivedA::Scalar> gemv(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedX>& x) {
  if (a.cols() != x.rows() || x.cols() != 1) {
    throw DimensionMismatch("gemv: " + detail::shape(a.rows(), a.cols()) + " times " +
                            detail::shape(x.rows(), x.cols()));
  }
  return a * x;
}

}  // namespace fastgauss
