#include <gtest/gtest.h>

#include <complex>

#include "simstruct/measurement.hpp"

using namespace simstruct;
using cd = std::complex<double>;

TEST(Measurement, ZeroAndLinearity) {
  const GaussianMeasurementMap<double> A(7, {3, 4}, 1);
  EXPECT_EQ(A.rows(), 7);
  EXPECT_EQ(A.dimension(), 12);
  EXPECT_EQ(A.apply(RealTensor(Shape{3, 4})).norm(), 0.0);
  const auto x = sample_gaussian<double>({3, 4}, 2);
  EXPECT_LT((A.apply(-1.75 * x) + 1.75 * A.apply(x)).norm(), 1e-12);
  EXPECT_EQ(A.adjoint(Eigen::VectorXd::Zero(7)).frobenius_norm(), 0.0);
}

TEST(Measurement, AdjointIdentity) {
  const GaussianMeasurementMap<cd> A(9, {4, 5}, 3);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto x = sample_gaussian<cd>({4, 5}, stream_seed(4, k));
    const auto y = sample_gaussian<cd>({9}, stream_seed(5, k));
    const cd lhs = y.data().dot(A.apply(x));
    const cd rhs = A.adjoint(y.data()).data().dot(x.data());
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST(Measurement, AdjointOfApplyMatchesDenseProduct) {
  const GaussianMeasurementMap<double> A(6, {2, 5}, 8);
  const auto x = sample_gaussian<double>({2, 5}, 9);
  const Eigen::VectorXd dense = A.matrix().adjoint() * (A.matrix() * x.data());
  EXPECT_LT((A.adjoint(A.apply(x)).data() - dense).norm(), 1e-12 * dense.norm());
}

TEST(Measurement, SingleRowUnitVector) {
  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 4);
  row(0, 0) = 1.0;
  const GaussianMeasurementMap<double> A(row, {4});
  Eigen::VectorXd c(1);
  c << 2.5;
  EXPECT_EQ(A.adjoint(c), RealTensor::from_vector({2.5, 0, 0, 0}));
}

TEST(Measurement, DeterministicInSeed) {
  const GaussianMeasurementMap<cd> A(5, {3, 3}, 77), B(5, {3, 3}, 77);
  EXPECT_EQ(A.matrix(), B.matrix());
  EXPECT_EQ(A.seed(), std::optional<std::uint64_t>(77));
}

TEST(AffineProject, FeasibleInputUnchanged) {
  const GaussianMeasurementMap<double> A(5, {3, 4}, 10);
  const auto x = sample_gaussian<double>({3, 4}, 11);
  const auto z = A.affine_project(A.apply(x), x);
  EXPECT_LT((z.data() - x.data()).norm(), 1e-10 * x.frobenius_norm());
}

TEST(AffineProject, SquareMapGivesUniqueSolution) {
  const GaussianMeasurementMap<double> A(12, {3, 4}, 12);
  const auto x0 = sample_gaussian<double>({3, 4}, 13);
  const auto y = A.apply(x0);
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto z = A.affine_project(y, sample_gaussian<double>({3, 4}, stream_seed(14, k)));
    EXPECT_LT((z.data() - x0.data()).norm(), 1e-8 * x0.frobenius_norm());
  }
}

TEST(AffineProject, ResidualIdempotenceAndOrthogonality) {
  const GaussianMeasurementMap<cd> A(8, {4, 5}, 15);
  const auto y = A.apply(sample_gaussian<cd>({4, 5}, 16));
  const auto x = sample_gaussian<cd>({4, 5}, 17);
  const auto z = A.affine_project(y, x);
  EXPECT_LE((A.apply(z) - y).norm(), 1e-9 * y.norm());
  const auto zz = A.affine_project(y, z);
  EXPECT_LT((zz.data() - z.data()).norm(), 1e-9 * z.frobenius_norm());
  // Null-space directions: w - P(w) with P the projection onto {A(w) = 0}'s complement.
  const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(8);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto w = A.affine_project(zero, sample_gaussian<cd>({4, 5}, stream_seed(18, k)));
    EXPECT_LT(A.apply(w).norm(), 1e-9 * w.frobenius_norm());
    EXPECT_LT(std::abs(real_inner(z - x, w)), 1e-9 * (z - x).frobenius_norm() * w.frobenius_norm());
  }
}

TEST(AffineProject, ShapeAndLengthErrors) {
  const GaussianMeasurementMap<double> A(4, {2, 3}, 19);
  EXPECT_THROW(A.apply(RealTensor(Shape{3, 2})), ShapeMismatch);
  EXPECT_THROW(A.adjoint(Eigen::VectorXd::Zero(5)), ShapeMismatch);
}

TEST(AffineProject, RankDeficientMapIsDegenerate) {
  Eigen::MatrixXd rows(2, 3);
  rows << 1, 2, 3, 2, 4, 6;
  EXPECT_THROW((GaussianMeasurementMap<double>(rows, {3})), DegenerateMap);
}

TEST(LeastNorm, LiesInRowSpace) {
  const GaussianMeasurementMap<double> A(4, {10}, 20);
  const auto y = A.apply(sample_gaussian<double>({10}, 21));
  const auto x = A.least_norm(y);
  EXPECT_LT((A.apply(x) - y).norm(), 1e-10 * y.norm());
  const Eigen::VectorXd coeffs = A.matrix().transpose().colPivHouseholderQr().solve(x.data());
  EXPECT_LT((A.matrix().transpose() * coeffs - x.data()).norm(), 1e-10 * x.frobenius_norm());
}
