#include <gtest/gtest.h>

#include <complex>
#include <numbers>

#include "simstruct/core/linalg.hpp"
#include "simstruct/core/parallel.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/core/tensor.hpp"

using namespace simstruct;
using cd = std::complex<double>;

namespace {

// Direct index arithmetic: entry (i_b, i_bc) of the b-matricization is the
// tensor entry whose b-modes spell i_b and whose remaining modes spell i_bc.
RealTensor matricize_by_hand(const RealTensor& t, const Bipartition& b) {
  const Shape& s = t.shape();
  const int L = t.order();
  auto [rows, cols] = matricized_dims(s, b);
  RealTensor out(Shape{rows, cols});
  std::vector<Index> idx(L, 0);
  for (Index flat = 0; flat < t.size(); ++flat) {
    Index rem = flat;
    for (int k = L - 1; k >= 0; --k) {
      idx[k] = rem % s[k];
      rem /= s[k];
    }
    Index r = 0, c = 0;
    for (int k = 0; k < L; ++k) {
      if (b.contains(k))
        r = r * s[k] + idx[k];
      else
        c = c * s[k] + idx[k];
    }
    out(r, c) = t[flat];
  }
  return out;
}

}  // namespace

TEST(Matricize, ShapeOfPairOfModes) {
  const auto t = sample_gaussian<double>({2, 3, 4, 5}, 7);
  const auto m = matricize(t, Bipartition::from_one_based({1, 2}));
  EXPECT_EQ(m.shape(), (Shape{6, 20}));
}

TEST(Matricize, MatchesIndexArithmetic) {
  const auto t = sample_gaussian<double>({2, 3, 4}, 11);
  for (const auto& modes : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1}}) {
    const Bipartition b(modes);
    EXPECT_EQ(matricize(t, b), matricize_by_hand(t, b)) << b.to_string();
  }
}

TEST(Matricize, RoundTripAllBipartitions) {
  const Shape shape{2, 3, 2, 3};
  const auto t = sample_gaussian<cd>(shape, 3);
  for (int mask = 1; mask < 15; ++mask) {
    std::vector<int> modes;
    for (int k = 0; k < 4; ++k)
      if (mask >> k & 1) modes.push_back(k);
    const Bipartition b(modes);
    const auto m = matricize(t, b);
    EXPECT_EQ(dematricize(m, b, shape), t);
    EXPECT_NEAR(m.frobenius_norm(), t.frobenius_norm(), 1e-12);
  }
}

TEST(Matricize, IsLinear) {
  const Shape shape{3, 2, 4};
  const auto s = sample_gaussian<double>(shape, 1);
  const auto t = sample_gaussian<double>(shape, 2);
  const Bipartition b{0, 2};
  const auto lhs = matricize(RealTensor(2.5 * s + (-1.5) * t), b);
  const auto rhs = 2.5 * matricize(s, b) + (-1.5) * matricize(t, b);
  EXPECT_LT((lhs.data() - rhs.data()).norm(), 1e-12);
}

TEST(Matricize, RankOneTensorGivesOuterProduct) {
  Rng rng(5);
  std::vector<Eigen::VectorXd> f = {gaussian_vector<double>(3, rng), gaussian_vector<double>(4, rng),
                                    gaussian_vector<double>(2, rng)};
  const auto t = outer_product(f);
  const auto m = matricize(t, Bipartition{0});
  const auto yz = outer_product(std::vector<Eigen::VectorXd>{f[1], f[2]});
  const Eigen::MatrixXd expect = f[0] * yz.data().transpose();
  EXPECT_LT((m.as_matrix() - expect).norm(), 1e-12);
  EXPECT_EQ(numerical_rank(singular_values(m.as_matrix())), 1);
}

TEST(Matricize, RejectsInvalidBipartitions) {
  const auto t = sample_gaussian<double>({2, 2, 2}, 1);
  EXPECT_THROW(matricize(t, Bipartition(std::vector<int>{})), InvalidBipartition);
  EXPECT_THROW(matricize(t, Bipartition{0, 1, 2}), InvalidBipartition);
  EXPECT_THROW(matricize(t, Bipartition{3}), InvalidBipartition);
  EXPECT_NO_THROW(matricize(t, Bipartition{0, 1, 2}, true));
}

TEST(Bipartition, OneBasedParsingAndNamedFamilies) {
  EXPECT_EQ(Bipartition::from_one_based({2, 1}).modes(), (std::vector<int>{0, 1}));
  EXPECT_EQ((Bipartition{0, 2}.to_string()), "[1,3]");
  EXPECT_EQ(BipartitionSet::hosvd(4).size(), 4u);
  EXPECT_EQ(BipartitionSet::tensor_train(4).size(), 3u);
  EXPECT_EQ(BipartitionSet::b2().size(), 2u);
  EXPECT_EQ(BipartitionSet::b3().size(), 3u);
  EXPECT_EQ(BipartitionSet::square_deal().size(), 1u);
  EXPECT_THROW(BipartitionSet({Bipartition{0}, Bipartition{0}}), InvalidBipartition);
}

TEST(Svd, SmallExamples) {
  EXPECT_LT((singular_values(Eigen::Matrix3d::Identity()) - Eigen::Vector3d::Ones()).norm(), 1e-15);
  Eigen::Matrix2d d;
  d << 3, 0, 0, 1;
  EXPECT_LT((singular_values(d) - Eigen::Vector2d(3, 1)).norm(), 1e-15);
}

TEST(Svd, ReconstructionAndOrdering) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = sample_gaussian<double>({8, 5}, seed);
    const auto dec = svd(m);
    EXPECT_LE((dec.reconstruct() - m.as_matrix()).norm(), 1e-10 * m.frobenius_norm());
    for (Index i = 0; i + 1 < dec.singular_values.size(); ++i)
      EXPECT_GE(dec.singular_values[i], dec.singular_values[i + 1]);
    EXPECT_GE(dec.singular_values.minCoeff(), 0.0);

    const auto c = sample_gaussian<cd>({4, 7}, seed);
    const auto dc = svd(c);
    EXPECT_LE((dc.reconstruct() - c.as_matrix()).norm(), 1e-10 * c.frobenius_norm());
  }
}

TEST(Svd, InvariantUnderUnitaryFactors) {
  const auto m = sample_gaussian<cd>({5, 5}, 9);
  const auto q1 = svd(sample_gaussian<cd>({5, 5}, 10)).U;
  const auto q2 = svd(sample_gaussian<cd>({5, 5}, 11)).V;
  const Eigen::MatrixXcd rotated = q1 * m.as_matrix() * q2;
  EXPECT_LT((singular_values(rotated) - singular_values(m.as_matrix())).norm(), 1e-8);
}

TEST(Svd, NonFiniteInputIsNumericalFailure) {
  Eigen::Matrix2d m;
  m << 1, std::numeric_limits<double>::quiet_NaN(), 0, 1;
  EXPECT_THROW(svd(m), NumericalFailure);
}

TEST(Gaussian, Deterministic) {
  EXPECT_EQ(sample_gaussian<double>({3, 4}, 42), sample_gaussian<double>({3, 4}, 42));
  EXPECT_EQ(sample_gaussian<cd>({3, 4}, 42), sample_gaussian<cd>({3, 4}, 42));
  EXPECT_FALSE(sample_gaussian<double>({3, 4}, 42) == sample_gaussian<double>({3, 4}, 43));
}

TEST(Gaussian, RealMoments) {
  const auto g = sample_gaussian<double>({100000}, 2024);
  const double mean = g.data().mean();
  const double var = (g.data().array() - mean).square().sum() / (g.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Gaussian, ComplexMoments) {
  const auto g = sample_gaussian<cd>({100000}, 2025);
  const double e2 = g.data().squaredNorm() / static_cast<double>(g.size());
  EXPECT_NEAR(e2, 1.0, 0.02);
  const double re2 = g.data().real().squaredNorm() / static_cast<double>(g.size());
  EXPECT_NEAR(re2, 0.5, 0.02);
}

TEST(Random, StreamSeedsAreDistinctAndStable) {
  EXPECT_EQ(stream_seed(1, {2, 3}), stream_seed(1, {2, 3}));
  EXPECT_NE(stream_seed(1, {2, 3}), stream_seed(1, {3, 2}));
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
  EXPECT_NE(stream_seed(1, {0}), stream_seed(1, {0, 0}));
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  auto f = [](std::size_t k) { return sample_gaussian<double>({3}, stream_seed(7, k)).data().sum(); };
  EXPECT_EQ(parallel_map(50, 1, f), parallel_map(50, 4, f));
}

TEST(Parallel, PropagatesExceptions) {
  auto f = [](std::size_t k) -> int {
    if (k == 7) throw NumericalFailure("boom");
    return 0;
  };
  EXPECT_THROW(parallel_map(20, 3, f), NumericalFailure);
}

TEST(Tensor, RejectsWrongDataLengthAndShapeMismatch) {
  EXPECT_THROW(RealTensor(Shape{2, 2}, Eigen::VectorXd::Zero(3)), ShapeMismatch);
  RealTensor a(Shape{2, 2}), b(Shape{4});
  EXPECT_THROW(a += b, ShapeMismatch);
}
