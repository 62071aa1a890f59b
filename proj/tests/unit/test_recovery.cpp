#include <gtest/gtest.h>

#include <complex>

#include "simstruct/measurement.hpp"
#include "simstruct/signals.hpp"
#include "simstruct/solver/polish.hpp"
#include "simstruct/solver/recovery.hpp"

using namespace simstruct;
using cd = std::complex<double>;
using Mode = CompositeRegularizer::Mode;

namespace {

template <class Scalar>
double rel_err(const DenseTensor<Scalar>& x, const DenseTensor<Scalar>& x0) {
  return (x.data() - x0.data()).norm() / x0.frobenius_norm();
}

}  // namespace

TEST(Recovery, SquareMapRecoversExactlyForAnyRegularizer) {
  const auto x0 = sample_sparse_lowrank<double>({3, 4, 1, 2, 2, Field::Real}, 1);
  const GaussianMeasurementMap<double> A(12, x0.shape(), 2);
  const std::vector<NormAtom> atoms{NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())};
  for (Mode mode : {Mode::Sum, Mode::Max}) {
    const auto res = solve_recovery(A, A.apply(x0), CompositeRegularizer(mode, atoms, {1.0, 3.0}));
    EXPECT_LT(rel_err(res.x, x0), 1e-8);
  }
}

TEST(Recovery, ZeroMeasurementsOfZeroSignal) {
  const GaussianMeasurementMap<double> A(5, {4, 4}, 3);
  const CompositeRegularizer reg(Mode::Max, {NormAtom::l1({4, 4})}, {1.0});
  const auto res = solve_recovery(A, Eigen::VectorXd::Zero(5), reg);
  EXPECT_EQ(res.x.frobenius_norm(), 0.0);
}

TEST(Recovery, OneSparseVectorWithDualCertificate) {
  const Index d = 10;
  const auto x0 = RealTensor::from_vector({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const GaussianMeasurementMap<double> A(8, {d}, 5);
  // Least-norm certificate nu with a_1^T nu = 1: exactness of l1 recovery
  // follows when every other column has |a_j^T nu| < 1.
  const Eigen::VectorXd a1 = A.matrix().col(0);
  const Eigen::VectorXd nu = a1 / a1.squaredNorm();
  const Eigen::VectorXd cert = A.matrix().transpose() * nu;
  EXPECT_NEAR(cert[0], 1.0, 1e-12);
  EXPECT_LT(cert.tail(d - 1).cwiseAbs().maxCoeff(), 1.0);

  const CompositeRegularizer reg(Mode::Sum, {NormAtom::l1({d})}, {1.0});
  const auto res = solve_recovery(A, A.apply(x0), reg);
  EXPECT_LT(rel_err(res.x, x0), 1e-5);
}

TEST(Recovery, ResidualAndObjectiveBoundsOnConvergedRuns) {
  const auto x0 = sample_sparse_lowrank<cd>({8, 8, 1, 3, 3, Field::Complex}, 6);
  const std::vector<NormAtom> atoms{NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())};
  for (Index m : {20, 40}) {
    const GaussianMeasurementMap<cd> A(m, x0.shape(), 7);
    const auto y = A.apply(x0);
    for (Mode mode : {Mode::Sum, Mode::Max}) {
      const CompositeRegularizer reg(mode, atoms, optimal_weights(x0, atoms));
      SolverOptions opts;
      opts.polish = false;
      const auto res = solve_recovery(A, y, reg, opts);
      if (!res.report.converged()) continue;
      EXPECT_LE((A.apply(res.x) - y).norm(), 1e-5 * y.norm());
      EXPECT_LE(composite_norm(res.x, reg), composite_norm(x0, reg) * (1 + 1e-4));
    }
  }
}

TEST(Recovery, MaxOfOptimalWeightsRecoversSparseLowRank) {
  const auto x0 = sample_sparse_lowrank<cd>({12, 12, 1, 3, 3, Field::Complex}, 8);
  const std::vector<NormAtom> atoms{NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())};
  const GaussianMeasurementMap<cd> A(70, x0.shape(), 9);
  const auto res = solve_recovery(A, A.apply(x0), CompositeRegularizer(Mode::Max, atoms, optimal_weights(x0, atoms)));
  EXPECT_LT((res.x.data() - x0.data()).norm() / res.x.frobenius_norm(), 1e-5);
}

TEST(Recovery, ShapeMismatchRejected) {
  const GaussianMeasurementMap<double> A(3, {2, 3}, 1);
  const CompositeRegularizer reg(Mode::Max, {NormAtom::l1({3, 2})}, {1.0});
  EXPECT_THROW(solve_recovery(A, Eigen::VectorXd::Zero(3), reg), ShapeMismatch);
}

TEST(Polish, ExactModelPointUnchanged) {
  const auto x0 = sample_sparse_lowrank<double>({6, 6, 1, 2, 2, Field::Real}, 10);
  const GaussianMeasurementMap<double> A(15, x0.shape(), 11);
  const auto p = polish(x0, A, A.apply(x0));
  EXPECT_LT((p.data() - x0.data()).norm(), 1e-10 * x0.frobenius_norm());
}

TEST(Polish, NoisyOneSparseVectorIsRestored) {
  const Index d = 20;
  RealTensor x0(Shape{d});
  x0[3] = -1.3;
  auto noise = sample_gaussian<double>({d}, 12);
  noise *= 1e-3 / noise.frobenius_norm();
  const auto xhat = x0 + noise;
  for (Index m : {2, 5}) {
    const GaussianMeasurementMap<double> A(m, {d}, 13);
    const auto p = polish(xhat, A, A.apply(x0));
    EXPECT_LT((p.data() - x0.data()).norm(), 1e-8);
  }
}

TEST(Polish, NeverIncreasesResidual) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto x0 = sample_sparse_lowrank<cd>({6, 6, 1, 3, 3, Field::Complex}, stream_seed(14, k));
    const GaussianMeasurementMap<cd> A(12, x0.shape(), stream_seed(15, k));
    const auto y = A.apply(x0);
    auto xhat = sample_gaussian<cd>(x0.shape(), stream_seed(16, k));
    xhat *= cd(0.1);
    xhat += x0;
    const auto p = polish(xhat, A, y);
    EXPECT_LE((A.apply(p) - y).norm(), (A.apply(xhat) - y).norm() * (1 + 1e-9) + 1e-14 * y.norm());
  }
}
