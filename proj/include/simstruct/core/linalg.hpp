#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"

namespace simstruct {

template <class Scalar>
using ColMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Thin singular value decomposition M = U diag(s) V^H, s descending.
template <class Scalar>
struct Svd {
  ColMatrix<Scalar> U;
  Eigen::VectorXd singular_values;
  ColMatrix<Scalar> V;

  ColMatrix<Scalar> reconstruct() const {
    return U * singular_values.cast<Scalar>().asDiagonal() * V.adjoint();
  }
};

namespace detail {

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m) {
  if (!m.allFinite()) throw NumericalFailure("svd: matrix has non-finite entries");
}

}  // namespace detail

/// Thin SVD backed by Eigen's divide-and-conquer solver (Jacobi below 16 columns).
template <class Derived>
Svd<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m);
  Eigen::BDCSVD<ColMatrix<Scalar>> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalFailure("svd did not converge");
  return {dec.matrixU(), dec.singularValues().template cast<double>(), dec.matrixV()};
}

/// Full SVD: U and V are square unitary, so their trailing columns span the
/// orthogonal complements of the column and row spaces.
template <class Derived>
Svd<typename Derived::Scalar> full_svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m);
  Eigen::BDCSVD<ColMatrix<Scalar>> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) throw NumericalFailure("svd did not converge");
  return {dec.matrixU(), dec.singularValues().template cast<double>(), dec.matrixV()};
}

template <class Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(m);
  Eigen::BDCSVD<ColMatrix<Scalar>> dec(m);
  if (dec.info() != Eigen::Success) throw NumericalFailure("svd did not converge");
  return dec.singularValues().template cast<double>();
}

template <class Scalar>
Svd<Scalar> svd(const DenseTensor<Scalar>& m) {
  return svd(m.as_matrix());
}

/// Numerical rank: number of singular values above rel_tol * sigma_max.
inline Index numerical_rank(const Eigen::VectorXd& s, double rel_tol = 1e-10) {
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

}  // namespace simstruct
