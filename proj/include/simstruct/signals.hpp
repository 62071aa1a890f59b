#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/linalg.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/measurement.hpp"

namespace simstruct {

/// Sums of r outer products x_i y_i^H with s1-sparse x_i and s2-sparse y_i.
struct SparseLowRankModel {
  Index n1 = 0, n2 = 0, r = 1, s1 = 1, s2 = 1;
  Field field = Field::Complex;

  Shape shape() const { return {n1, n2}; }

  void validate() const {
    if (n1 < 1 || n2 < 1) throw InvalidModel("matrix dimensions must be positive");
    if (r < 1) throw InvalidModel("rank must be >= 1");
    if (s1 < 1 || s1 > n1 || s2 < 1 || s2 > n2) throw InvalidModel("sparsities must satisfy 1 <= s_i <= n_i");
  }
};

/// Product tensors x1 ⊗ ... ⊗ xL with Gaussian factors.
struct RankOneTensorModel {
  Shape dims;
  Field field = Field::Real;

  void validate() const {
    if (dims.size() < 2 || static_cast<int>(dims.size()) > kMaxOrder) throw InvalidModel("tensor order must be in 2..8");
    for (Index n : dims)
      if (n < 1) throw InvalidModel("local dimensions must be positive");
  }
};

namespace detail {

/// Uniformly random s-subset of {0..n-1}, as a 0/1 mask.
inline std::vector<bool> random_support(Index n, Index s, Rng& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < s; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < s; ++i) mask[idx[i]] = true;
  return mask;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sparse_gaussian(Index n, Index s, Rng& rng) {
  const auto mask = random_support(n, s, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (mask[i]) v[i] = standard_normal<Scalar>(rng, normal);
  return v;
}

}  // namespace detail

template <class Scalar>
DenseTensor<Scalar> sample_sparse_lowrank(const SparseLowRankModel& model, std::uint64_t seed) {
  model.validate();
  Rng rng(seed);
  ColMatrix<Scalar> X = ColMatrix<Scalar>::Zero(model.n1, model.n2);
  for (Index i = 0; i < model.r; ++i) {
    const auto x = detail::sparse_gaussian<Scalar>(model.n1, model.s1, rng);
    const auto y = detail::sparse_gaussian<Scalar>(model.n2, model.s2, rng);
    X += x * y.adjoint();
  }
  return DenseTensor<Scalar>::from_matrix(X);
}

template <class Scalar>
DenseTensor<Scalar> sample_rank1_tensor(const RankOneTensorModel& model, std::uint64_t seed) {
  model.validate();
  Rng rng(seed);
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> factors;
  for (Index n : model.dims) factors.push_back(gaussian_vector<Scalar>(n, rng));
  return outer_product(factors);
}

/// How ||A(X)||^2 is compared with ||X||^2 = 1.
enum class RipScaling {
  /// ||A(X)||^2 / m: iid unit-variance rows give E ||A(X)||^2 / m = 1.
  PerRow,
  /// ||A(X)||^2 unscaled, for maps already normalized (e.g. orthonormal rows).
  Unit,
};

/// max over n_samples unit-norm model elements X of | c ||A(X)||^2 - 1 |,
/// a lower estimate of the restricted isometry constant on the model set.
template <class Scalar>
double empirical_rip_deviation(const GaussianMeasurementMap<Scalar>& A, const SparseLowRankModel& model,
                               std::size_t n_samples, std::uint64_t seed, RipScaling scaling = RipScaling::PerRow) {
  if (A.domain() != model.shape()) throw ShapeMismatch("map domain does not match the model shape");
  const double c = scaling == RipScaling::PerRow && A.rows() > 0 ? 1.0 / static_cast<double>(A.rows()) : 1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    auto X = sample_sparse_lowrank<Scalar>(model, stream_seed(seed, k));
    X *= Scalar(1.0 / X.frobenius_norm());
    worst = std::max(worst, std::abs(c * A.apply(X).squaredNorm() - 1.0));
  }
  return worst;
}

}  // namespace simstruct
