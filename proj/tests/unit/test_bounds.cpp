#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "simstruct/bounds.hpp"
#include "simstruct/signals.hpp"
#include "simstruct/statdim.hpp"

using namespace simstruct;

namespace {

// u v^T with 5 entries of +-1 in each factor: flat entries and a flat spectrum.
RealTensor flat_sparse_rank_one(Index n, Index s) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < s; ++i) {
    u[2 * i] = (i % 2) ? -1.0 : 1.0;
    v[n - 1 - i] = 1.0;
  }
  return RealTensor::from_matrix(u * v.transpose());
}

}  // namespace

TEST(Lipschitz, Examples) {
  EXPECT_DOUBLE_EQ(lipschitz(NormAtom::l1({30, 30})), 30.0);
  EXPECT_DOUBLE_EQ(lipschitz(NormAtom::nuclear({30, 30})), std::sqrt(30.0));
  for (Index n : {2, 3, 5}) EXPECT_DOUBLE_EQ(lipschitz(NormAtom::nuclear({n, n, n, n}, Bipartition{0, 1})), n);
  EXPECT_DOUBLE_EQ(lipschitz(NormAtom::nuclear({2, 3, 4}, Bipartition{1})), std::sqrt(3.0));
}

TEST(Lipschitz, BoundsEveryAtomOnRandomDraws) {
  const Shape shape{3, 4, 2};
  std::vector<NormAtom> atoms{NormAtom::l1(shape)};
  for (const auto& b : {Bipartition{0}, Bipartition{1}, Bipartition{2}}) atoms.push_back(NormAtom::nuclear(shape, b));
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const auto x = sample_gaussian<std::complex<double>>(shape, stream_seed(1, k));
    for (const auto& a : atoms) EXPECT_LE(atom_norm(x, a), lipschitz(a) * x.frobenius_norm() * (1 + 1e-12));
  }
}

TEST(FRank, Examples) {
  const auto x = RealTensor::from_vector({1, 0, -1, 0, 1, 0});
  EXPECT_NEAR(f_rank(x, NormAtom::l1({6})), 3.0, 1e-12);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
  M(0, 1) = 2.0;
  M(3, 2) = -2.0;
  M(4, 4) = 2.0;
  EXPECT_NEAR(f_rank(RealTensor::from_matrix(M), NormAtom::nuclear({5, 5})), 3.0, 1e-12);
  EXPECT_THROW(f_rank(RealTensor(Shape{2, 2}), NormAtom::nuclear({2, 2})), DegenerateSignal);
}

TEST(FRank, AtMostRankWithEqualityForFlatSpectrum) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto x = sample_gaussian<double>({6, 6}, stream_seed(2, k));
    const Eigen::VectorXd sig = Eigen::JacobiSVD<Eigen::MatrixXd>(x.as_matrix()).singularValues();
    const double oracle = sig.sum() * sig.sum() / sig.squaredNorm();
    EXPECT_NEAR(f_rank(x, NormAtom::nuclear({6, 6})), oracle, 1e-10);
    EXPECT_LT(oracle, 6.0);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(sample_gaussian<double>({6, 6}, 3).as_matrix());
  const Eigen::MatrixXd q = qr.householderQ();
  EXPECT_NEAR(f_rank(RealTensor::from_matrix(q), NormAtom::nuclear({6, 6})), 6.0, 1e-10);
}

TEST(FRank, AtMostCombinatorialSparsityAndRankOnModelDraws) {
  const SparseLowRankModel model{8, 8, 2, 3, 3, Field::Real};
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const auto x = sample_sparse_lowrank<double>(model, stream_seed(4, k));
    Index nnz = 0;
    for (Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0;
    EXPECT_LE(f_rank(x, NormAtom::l1(model.shape())), nnz * (1 + 1e-12));
    EXPECT_LE(f_rank(x, NormAtom::nuclear(model.shape())), model.r * (1 + 1e-12));
  }
}

TEST(Kappa, FlatSparseLowRankMatchesModelBound) {
  const auto x0 = flat_sparse_rank_one(30, 5);
  const std::vector<NormAtom> atoms{NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())};
  EXPECT_NEAR(kappa_general(x0, atoms), 23.0, 1e-10);
  EXPECT_NEAR(kappa_general(x0, atoms), sparse_lowrank_kappa(30, 30, 1, 5, 5), 1e-10);
}

TEST(Kappa, SparseLowRankFormula) {
  EXPECT_EQ(sparse_lowrank_kappa(30, 30, 1, 5, 5), 23.0);
  EXPECT_EQ(sparse_lowrank_kappa(30, 30, 1, 15, 15), 28.0);
  EXPECT_EQ(sparse_lowrank_kappa(12, 12, 3, 12, 12), 34.0);
  EXPECT_THROW(sparse_lowrank_kappa(4, 4, 1, 5, 1), InvalidModel);
  EXPECT_THROW(sparse_lowrank_kappa(4, 4, 0, 1, 1), InvalidModel);
}

TEST(Kappa, BasisVectorIsVacuous) {
  RealTensor e1(Shape{7});
  e1[0] = 1.0;
  EXPECT_NEAR(kappa_general(e1, {NormAtom::l1({7})}), -1.0, 1e-12);
}

TEST(Kappa, ProductTensorWithB3) {
  const auto b3 = BipartitionSet::b3();
  for (Index n : {2, 3, 4}) {
    const auto x0 = sample_rank1_tensor<double>({{n, n, n, n}, Field::Real}, 5);
    std::vector<NormAtom> atoms;
    for (const auto& b : b3.parts()) atoms.push_back(NormAtom::nuclear(x0.shape(), b));
    EXPECT_NEAR(kappa_general(x0, atoms), static_cast<double>(n * n) - 2.0, 1e-8);
  }
}

TEST(Kappa, ReportInvariants) {
  for (std::uint64_t k = 0; k < 50; ++k) {
    const auto x0 = sample_sparse_lowrank<double>({6, 7, 2, 3, 4, Field::Real}, stream_seed(6, k));
    const auto r = bound_report(x0, {NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())});
    for (double ki : r.kappas) EXPECT_LE(r.kappa, ki);
    EXPECT_GT(r.cos_theta, 0.0);
    EXPECT_LE(r.cos_theta, 1.0 + 1e-12);
    EXPECT_GE(r.kappa, -2.0);
    EXPECT_EQ(r.dimension, 42);
  }
}

TEST(SuccessProbability, Examples) {
  EXPECT_NEAR(success_prob_upper(100, 200), 4 * std::exp(-6.25), 1e-15);
  EXPECT_EQ(success_prob_upper(50, 50), 1.0);
  EXPECT_THROW(success_prob_upper(51, 50), BoundNotApplicable);
  double prev = 2.0;
  for (double m = 400; m >= 0; m -= 20) {
    const double p = success_prob_upper(m, 400);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(CircularCone, Examples) {
  EXPECT_DOUBLE_EQ(circ_cone_statdim_upper(10, 0), 2.0);
  EXPECT_DOUBLE_EQ(circ_cone_statdim_upper(10, std::numbers::pi / 2), 12.0);
  EXPECT_THROW(circ_cone_statdim_upper(10, -0.1), BoundNotApplicable);
  EXPECT_THROW(circ_cone_statdim_upper(10, 2.0), BoundNotApplicable);
}

TEST(CircularCone, RayStatDimBelowBound) {
  const auto x0 = RealTensor::from_vector({1});
  const auto est = estimate_statdim(x0, CompositeRegularizer(CompositeRegularizer::Mode::Max, {NormAtom::l1({1})}, {1.0}),
                                    200, 7);
  EXPECT_LE(est.mean, circ_cone_statdim_upper(1, 0));
}
