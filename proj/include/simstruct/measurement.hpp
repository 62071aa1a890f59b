#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/core/tensor.hpp"

namespace simstruct {

/// Dense linear map A : V -> F^m with rows a_i, A(x)_i = <a_i, x>.
///
/// The Gram matrix A A^H is factored once at construction so that affine
/// projections cost two triangular solves. When m > d the map is injective
/// and projections go through A^H A instead.
template <class Scalar>
class GaussianMeasurementMap {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  /// m x d matrix of iid standard (real or complex) normal entries.
  GaussianMeasurementMap(Index m, Shape domain, std::uint64_t seed) : domain_(std::move(domain)), seed_(seed) {
    if (m < 0) throw ConfigError("number of measurements must be >= 0");
    const Index d = shape_size(domain_);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    matrix_.resize(m, d);
    // Row by row so that the first k rows do not depend on m.
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < d; ++j) matrix_(i, j) = standard_normal<Scalar>(rng, normal);
    factor();
  }

  /// Map with explicitly given rows.
  GaussianMeasurementMap(Matrix rows, Shape domain) : domain_(std::move(domain)), matrix_(std::move(rows)) {
    if (matrix_.cols() != shape_size(domain_))
      throw ShapeMismatch("measurement matrix has " + std::to_string(matrix_.cols()) + " columns for domain " +
                          shape_string(domain_));
    factor();
  }

  Index rows() const { return matrix_.rows(); }
  Index dimension() const { return matrix_.cols(); }
  const Shape& domain() const { return domain_; }
  const Matrix& matrix() const { return matrix_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  Vector apply(const DenseTensor<Scalar>& x) const {
    check(x);
    return matrix_ * x.data();
  }

  DenseTensor<Scalar> adjoint(const Vector& y) const {
    if (y.size() != rows())
      throw ShapeMismatch("adjoint expects " + std::to_string(rows()) + " measurements, got " +
                          std::to_string(y.size()));
    return DenseTensor<Scalar>(domain_, matrix_.adjoint() * y);
  }

  /// argmin ||z - x|| subject to A(z) = y.
  DenseTensor<Scalar> affine_project(const Vector& y, const DenseTensor<Scalar>& x) const {
    check(x);
    if (y.size() != rows())
      throw ShapeMismatch("affine_project expects " + std::to_string(rows()) + " measurements");
    if (rows() == 0) return x;
    if (tall_) return DenseTensor<Scalar>(domain_, normal_.solve(matrix_.adjoint() * y));
    const Vector r = matrix_ * x.data() - y;
    DenseTensor<Scalar> z = x;
    z.data() -= matrix_.adjoint() * gram_.solve(r);
    return z;
  }

  /// Minimum-norm solution of A(x) = y.
  DenseTensor<Scalar> least_norm(const Vector& y) const {
    return affine_project(y, DenseTensor<Scalar>(domain_));
  }

 private:
  void check(const DenseTensor<Scalar>& x) const {
    if (x.shape() != domain_)
      throw ShapeMismatch("measurement map domain is " + shape_string(domain_) + ", got " +
                          shape_string(x.shape()));
  }

  void factor() {
    if (rows() == 0) return;
    tall_ = rows() > dimension();
    if (tall_) {
      normal_.compute(matrix_.adjoint() * matrix_);
      if (normal_.info() != Eigen::Success) throw DegenerateMap("A^H A is not positive definite");
    } else {
      gram_.compute(matrix_ * matrix_.adjoint());
      if (gram_.info() != Eigen::Success) throw DegenerateMap("A A^H is not positive definite");
    }
  }

  Shape domain_;
  std::optional<std::uint64_t> seed_;
  Matrix matrix_;
  bool tall_ = false;
  Eigen::LLT<Matrix> gram_;
  Eigen::LLT<Matrix> normal_;
};

}  // namespace simstruct
