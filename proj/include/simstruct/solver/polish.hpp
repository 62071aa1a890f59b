#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/QR>

#include "simstruct/core/linalg.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/measurement.hpp"
#include "simstruct/regularizers.hpp"

namespace simstruct {

struct PolishOptions {
  /// Entries above support_tol * max |x| form the support.
  double support_tol = 1e-3;
  /// Singular values above rank_tol * sigma_1 count toward the rank.
  double rank_tol = 1e-3;
  /// Alternations of tangent-space least squares and rank truncation.
  int max_steps = 10;
  /// Candidates further than max_move * ||x|| from the input are discarded.
  double max_move = 1e-2;
};

namespace detail {

/// x = B p with p the least-squares solution of A B p = y.
template <class Scalar>
DenseTensor<Scalar> restricted_least_squares(const GaussianMeasurementMap<Scalar>& A,
                                             const typename GaussianMeasurementMap<Scalar>::Vector& y,
                                             const ColMatrix<Scalar>& B) {
  const ColMatrix<Scalar> AB = A.matrix() * B;
  Eigen::ColPivHouseholderQR<ColMatrix<Scalar>> qr(AB);
  return DenseTensor<Scalar>(A.domain(), B * qr.solve(y));
}

template <class Scalar>
std::optional<DenseTensor<Scalar>> sparse_candidate(const DenseTensor<Scalar>& x, const GaussianMeasurementMap<Scalar>& A,
                                                    const typename GaussianMeasurementMap<Scalar>::Vector& y,
                                                    const PolishOptions& o) {
  const double top = x.data().cwiseAbs().maxCoeff();
  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > o.support_tol * top) support.push_back(i);
  if (support.empty() || static_cast<Index>(support.size()) >= A.rows()) return std::nullopt;
  ColMatrix<Scalar> B = ColMatrix<Scalar>::Zero(x.size(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) B(support[j], static_cast<Index>(j)) = Scalar(1);
  return restricted_least_squares(A, y, B);
}

/// Alternates least squares over the tangent space of the rank-r matrices at
/// the current estimate with truncation back to rank r. Only the block
/// rows x cols of the matrix is allowed to be nonzero.
template <class Scalar>
std::optional<DenseTensor<Scalar>> tangent_candidate(const DenseTensor<Scalar>& x, const GaussianMeasurementMap<Scalar>& A,
                                                     const typename GaussianMeasurementMap<Scalar>::Vector& y,
                                                     const std::vector<Index>& rows, const std::vector<Index>& cols,
                                                     const PolishOptions& o) {
  using M = ColMatrix<Scalar>;
  const Index n2 = x.shape()[1];
  const Index p = static_cast<Index>(rows.size());
  const Index q = static_cast<Index>(cols.size());
  if (p == 0 || q == 0) return std::nullopt;
  auto block_of = [&](const DenseTensor<Scalar>& t) {
    M b(p, q);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < q; ++j) b(i, j) = t(rows[i], cols[j]);
    return b;
  };
  M X = block_of(x);
  const Index r = numerical_rank(singular_values(X), o.rank_tol);
  if (r == 0 || r * (p + q - r) >= A.rows()) return std::nullopt;

  std::optional<DenseTensor<Scalar>> fitted;
  for (int step = 0; step < o.max_steps; ++step) {
    const auto dec = full_svd(X);
    const M U = dec.U.leftCols(r);
    const M V = dec.V.leftCols(r);
    const M Uperp = dec.U.rightCols(p - r);
    // Tangent space {U W + Uperp N V^H}: r*q + (p-r)*r directions.
    M B = M::Zero(x.size(), r * q + (p - r) * r);
    Index col = 0;
    for (Index a = 0; a < r; ++a)
      for (Index j = 0; j < q; ++j, ++col)
        for (Index i = 0; i < p; ++i) B(rows[i] * n2 + cols[j], col) = U(i, a);
    for (Index b = 0; b < p - r; ++b)
      for (Index a = 0; a < r; ++a, ++col)
        for (Index i = 0; i < p; ++i)
          for (Index j = 0; j < q; ++j) B(rows[i] * n2 + cols[j], col) = Uperp(i, b) * Eigen::numext::conj(V(j, a));
    fitted = restricted_least_squares(A, y, B);
    M next = block_of(*fitted);
    const auto trunc = svd(next);
    M Xr = trunc.U.leftCols(r) * trunc.singular_values.head(r).template cast<Scalar>().asDiagonal() *
           trunc.V.leftCols(r).adjoint();
    const double change = (Xr - X).norm();
    X = std::move(Xr);
    if (!X.allFinite()) return std::nullopt;
    if (change <= 1e-14 * X.norm()) break;
  }
  return fitted;
}

template <class Scalar>
std::vector<Index> nonzero_lines(const DenseTensor<Scalar>& x, double tol, bool by_row) {
  const auto m = x.as_matrix();
  const double top = m.cwiseAbs().maxCoeff();
  std::vector<Index> out;
  const Index n = by_row ? m.rows() : m.cols();
  for (Index i = 0; i < n; ++i) {
    const double line = by_row ? m.row(i).cwiseAbs().maxCoeff() : m.col(i).cwiseAbs().maxCoeff();
    if (line > tol * top) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Refines an approximately sparse and/or low-rank solution of A(x) = y by
/// least squares restricted to its detected support, rank, or both.
/// A candidate is kept only if it does not increase the measurement residual,
/// stays within max_move of x (and, given `reg`, does not increase the
/// regularizer); the closest such candidate to x wins. Otherwise x is
/// returned unchanged.
template <class Scalar>
DenseTensor<Scalar> polish(const DenseTensor<Scalar>& x, const GaussianMeasurementMap<Scalar>& A,
                           const typename GaussianMeasurementMap<Scalar>::Vector& y,
                           const CompositeRegularizer* reg = nullptr, const PolishOptions& o = {}) {
  const double x_norm = x.frobenius_norm();
  if (!(x_norm > 0) || !x.all_finite() || A.rows() == 0) return x;
  const double base_res = (A.apply(x) - y).norm();
  const double y_norm = y.norm();
  const double base_reg = reg ? composite_norm(x, *reg) : 0.0;

  std::vector<DenseTensor<Scalar>> candidates;
  if (auto c = detail::sparse_candidate(x, A, y, o)) candidates.push_back(std::move(*c));
  if (x.order() == 2) {
    std::vector<Index> all_rows(static_cast<std::size_t>(x.shape()[0]));
    std::vector<Index> all_cols(static_cast<std::size_t>(x.shape()[1]));
    for (Index i = 0; i < x.shape()[0]; ++i) all_rows[i] = i;
    for (Index j = 0; j < x.shape()[1]; ++j) all_cols[j] = j;
    if (auto c = detail::tangent_candidate(x, A, y, all_rows, all_cols, o)) candidates.push_back(std::move(*c));
    const auto rows = detail::nonzero_lines(x, o.support_tol, true);
    const auto cols = detail::nonzero_lines(x, o.support_tol, false);
    if (rows.size() < all_rows.size() || cols.size() < all_cols.size())
      if (auto c = detail::tangent_candidate(x, A, y, rows, cols, o)) candidates.push_back(std::move(*c));
  }

  const DenseTensor<Scalar>* best = nullptr;
  double best_move = o.max_move * x_norm;
  for (auto& c : candidates) {
    if (!c.all_finite()) continue;
    c = A.affine_project(y, c);
    const double res = (A.apply(c) - y).norm();
    if (res > base_res * (1 + 1e-9) + 1e-14 * y_norm) continue;
    if (reg && composite_norm(c, *reg) > base_reg * (1 + 1e-9)) continue;
    const double move = (c.data() - x.data()).norm();
    if (move <= best_move) {
      best_move = move;
      best = &c;
    }
  }
  return best ? *best : x;
}

}  // namespace simstruct
