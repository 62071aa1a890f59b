#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "simstruct/core/linalg.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"

namespace simstruct {

/// A point (x, t) of a norm epigraph {(x, t) : ||x|| <= t}.
template <class Scalar>
struct EpigraphPoint {
  DenseTensor<Scalar> x;
  double t = 0.0;
};

namespace detail {

/// Soft-threshold level theta >= 0 of the projection of (a, t) onto the l1
/// epigraph, for a vector a of moduli. Returns a negative value when (a, t)
/// already lies in the epigraph.
inline double l1_epigraph_threshold(const Eigen::VectorXd& a, double t) {
  const double total = a.sum();
  if (total <= t) return -1.0;
  std::vector<double> sorted(a.data(), a.data() + a.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // (a, t) in the polar cone {||a||_inf <= -t}: projection is the origin.
  if (sorted.empty() || sorted.front() <= -t) return std::max(-t, 0.0);
  double prefix = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double theta = (prefix - t) / static_cast<double>(k + 2);
    const double next = k + 1 < sorted.size() ? sorted[k + 1] : 0.0;
    if (theta >= next && theta < sorted[k]) return theta;
  }
  return (prefix - t) / static_cast<double>(sorted.size() + 1);
}

template <class Scalar>
Eigen::VectorXd moduli(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  return v.cwiseAbs().template cast<double>();
}

/// Clips every modulus at c, keeping phases.
template <class Scalar>
void clip_moduli(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, double c) {
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > c) v[i] *= c / mag;
  }
}

/// Projection of (s, t) onto {||s||_inf <= t} for a nonnegative vector s.
inline std::pair<Eigen::VectorXd, double> linf_epigraph_nonneg(Eigen::VectorXd s, double t) {
  const double theta = l1_epigraph_threshold(s, -t);
  if (theta < 0) return {Eigen::VectorXd::Zero(s.size()), 0.0};
  const double max = s.size() ? s.maxCoeff() : 0.0;
  if (max <= t) return {std::move(s), t};
  s = s.cwiseMin(theta);
  return {std::move(s), theta};
}

inline std::pair<Eigen::VectorXd, double> l1_epigraph_nonneg(Eigen::VectorXd s, double t) {
  const double theta = l1_epigraph_threshold(s, t);
  if (theta < 0) return {std::move(s), t};
  s = (s.array() - theta).cwiseMax(0.0).matrix();
  return {std::move(s), t + theta};
}

}  // namespace detail

/// Euclidean projection onto {(x, t) : ||x||_inf <= t}, via the Moreau
/// decomposition against the l1 epigraph. Complex entries are clipped in
/// modulus.
template <class Scalar>
EpigraphPoint<Scalar> project_epigraph_linf(DenseTensor<Scalar> x, double t) {
  const auto a = detail::moduli(x.data());
  // P_K(v) = v + P_{epi l1}(-v)
  const double theta = detail::l1_epigraph_threshold(a, -t);
  if (theta < 0) {
    // -v already in epi l1, so v is in the polar cone of K.
    x.data().setZero();
    return {std::move(x), 0.0};
  }
  if (a.size() == 0 || a.maxCoeff() <= t) return {std::move(x), t};
  detail::clip_moduli(x.data(), theta);
  return {std::move(x), theta};
}

/// Euclidean projection onto the l1-norm epigraph.
template <class Scalar>
EpigraphPoint<Scalar> project_epigraph_l1(DenseTensor<Scalar> x, double t) {
  const double theta = detail::l1_epigraph_threshold(detail::moduli(x.data()), t);
  if (theta < 0) return {std::move(x), t};
  detail::soft_threshold_inplace(x.data(), theta);
  return {std::move(x), t + theta};
}

namespace detail {

template <class Scalar, class ProjectSpectrum>
EpigraphPoint<Scalar> project_matricized(const DenseTensor<Scalar>& x, double t,
                                         const Bipartition& b, ProjectSpectrum&& project) {
  auto m = matricize(x, b);
  auto dec = svd(m);
  auto [s, t_new] = project(dec.singular_values, t);
  // Only the directions whose singular value moved need to be touched.
  Eigen::VectorXd delta = dec.singular_values - s;
  m.as_matrix() -= dec.U * delta.cast<Scalar>().asDiagonal() * dec.V.adjoint();
  return {dematricize(m, b, x.shape()), t_new};
}

}  // namespace detail

/// Projection onto {(X, t) : ||X||_op <= t} for the b-matricization of X.
template <class Scalar>
EpigraphPoint<Scalar> project_epigraph_spectral(const DenseTensor<Scalar>& x, double t,
                                                const Bipartition& b) {
  return detail::project_matricized(x, t, b, detail::linf_epigraph_nonneg);
}

template <class Scalar>
EpigraphPoint<Scalar> project_epigraph_spectral(const DenseTensor<Scalar>& x, double t) {
  return project_epigraph_spectral(x, t, Bipartition{0});
}

/// Projection onto {(X, t) : ||X||_* <= t} for the b-matricization of X.
template <class Scalar>
EpigraphPoint<Scalar> project_epigraph_nuclear(const DenseTensor<Scalar>& x, double t,
                                               const Bipartition& b) {
  return detail::project_matricized(x, t, b, detail::l1_epigraph_nonneg);
}

/// Projection onto the epigraph of the atom's norm.
template <class Scalar>
EpigraphPoint<Scalar> project_atom_epigraph(const DenseTensor<Scalar>& x, double t, const NormAtom& a) {
  a.check(x);
  if (a.kind() == NormAtom::Kind::EntrywiseL1) return project_epigraph_l1(x, t);
  return project_epigraph_nuclear(x, t, a.bipartition());
}

/// Projection onto the epigraph of the atom's dual norm.
template <class Scalar>
EpigraphPoint<Scalar> project_atom_dual_epigraph(const DenseTensor<Scalar>& x, double t,
                                                 const NormAtom& a) {
  a.check(x);
  if (a.kind() == NormAtom::Kind::EntrywiseL1) return project_epigraph_linf(x, t);
  return project_epigraph_spectral(x, t, a.bipartition());
}

}  // namespace simstruct
