#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/linalg.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"
#include "simstruct/solver/splitting.hpp"

namespace simstruct {

/// Distance from g to the cone generated by the subdifferential of a
/// composite regularizer at x0.
///
/// Sum mode: the cone is { tau * sum_i lambda_i s_i : s_i in d||x0||_(i), tau >= 0 }.
/// Max mode: the Minkowski sum of the cones of d||x0||_(i) over the atoms
/// whose weighted norm is maximal at x0 (all of them for optimal weights).
template <class Scalar>
struct ConeDistanceProblem {
  DenseTensor<Scalar> g;
  DenseTensor<Scalar> x0;
  CompositeRegularizer reg;
};

template <class Scalar>
struct ConeDistanceResult {
  double distance = 0.0;
  SolveReport report;
  /// The cone point closest to g.
  DenseTensor<Scalar> projection;
};

/// Atoms whose weighted norm attains the maximum at x0 (all atoms in Sum mode).
template <class Scalar>
std::vector<std::size_t> active_atoms(const DenseTensor<Scalar>& x0, const CompositeRegularizer& reg) {
  std::vector<std::size_t> active;
  const auto norms = atom_norms(x0, reg.atoms());
  double top = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) top = std::max(top, reg.weights()[i] * norms[i]);
  for (std::size_t i = 0; i < norms.size(); ++i)
    if (reg.mode() == CompositeRegularizer::Mode::Sum || reg.weights()[i] * norms[i] >= top * (1 - 1e-9))
      active.push_back(i);
  return active;
}

namespace detail {

/// argmin_{t >= 0} sum_j (a_j - t)_+^2 + w (t - c)^2 for moduli a_j >= 0.
inline double weighted_clip_level(Eigen::VectorXd a, double c, double w) {
  std::sort(a.data(), a.data() + a.size(), std::greater<>());
  double prefix = 0.0;
  for (Index k = 0; k <= a.size(); ++k) {
    const double t = (w * c + prefix) / (w + static_cast<double>(k));
    if (k == a.size() || t >= a[k]) return std::max(t, 0.0);
    prefix += a[k];
  }
  return 0.0;
}

/// The subdifferential of a decomposable atom at x0 is E + {W in T^perp : ||W||° <= 1}.
/// Its cone is C = { t E + W : W in T^perp, ||W||° <= t }; `project` is the
/// Euclidean projection of (y, s) onto C viewed as a set of pairs (t E + W, t).
template <class Scalar>
class AtomFace {
 public:
  using Vector = typename DenseTensor<Scalar>::Vector;
  using M = ColMatrix<Scalar>;

  AtomFace(const NormAtom& atom, const DenseTensor<Scalar>& x0, double rank_tol = 1e-9)
      : atom_(atom), E_(x0.shape()) {
    if (atom.kind() == NormAtom::Kind::EntrywiseL1) {
      const double top = x0.data().cwiseAbs().maxCoeff();
      for (Index i = 0; i < x0.size(); ++i) {
        const double mag = std::abs(x0[i]);
        if (mag > rank_tol * top) {
          E_[i] = x0[i] / mag;
          ++dim_;
        } else {
          off_.push_back(i);
        }
      }
    } else {
      const auto m = matricize(x0, atom.bipartition());
      auto dec = full_svd(m.as_matrix());
      const Index r = numerical_rank(dec.singular_values, rank_tol);
      dim_ = r;
      U_ = dec.U.leftCols(r);
      V_ = dec.V.leftCols(r);
      Uperp_ = dec.U.rightCols(dec.U.cols() - r);
      Vperp_ = dec.V.rightCols(dec.V.cols() - r);
      DenseTensor<Scalar> e(m.shape());
      e.as_matrix() = U_ * V_.adjoint();
      E_ = dematricize(e, atom.bipartition(), x0.shape());
    }
    if (dim_ == 0) throw DegenerateSignal("atom " + atom.name() + " vanishes at x0");
  }

  const DenseTensor<Scalar>& E() const { return E_; }

  void project(DenseTensor<Scalar>& y, double& t) const {
    const double w = 1.0 + static_cast<double>(dim_);
    const double c = (t + real_inner(E_, y)) / w;
    if (atom_.kind() == NormAtom::Kind::EntrywiseL1) {
      Eigen::VectorXd a(static_cast<Index>(off_.size()));
      for (std::size_t j = 0; j < off_.size(); ++j) a[j] = std::abs(y[off_[j]]);
      t = weighted_clip_level(std::move(a), c, w);
      Vector out = t * E_.data();
      for (Index i : off_) {
        const double mag = std::abs(y[i]);
        out[i] = mag > t ? y[i] * (t / mag) : y[i];
      }
      y.data() = std::move(out);
      return;
    }
    auto m = matricize(y, atom_.bipartition());
    M inner = Uperp_.adjoint() * m.as_matrix() * Vperp_;
    Eigen::VectorXd sig;
    M Ui, Vi;
    if (inner.size()) {
      auto dec = svd(inner);
      sig = dec.singular_values;
      Ui = std::move(dec.U);
      Vi = std::move(dec.V);
    }
    t = weighted_clip_level(sig, c, w);
    M W = M::Zero(inner.rows(), inner.cols());
    if (inner.size()) W = Ui * sig.cwiseMin(t).template cast<Scalar>().asDiagonal() * Vi.adjoint();
    m.as_matrix() = t * (U_ * V_.adjoint()) + Uperp_ * W * Vperp_.adjoint();
    y = dematricize(m, atom_.bipartition(), y.shape());
  }

 private:
  NormAtom atom_;
  DenseTensor<Scalar> E_;
  Index dim_ = 0;
  std::vector<Index> off_;
  M U_, V_, Uperp_, Vperp_;
};

}  // namespace detail

template <class Scalar>
ConeDistanceResult<Scalar> solve_cone_distance(const ConeDistanceProblem<Scalar>& p,
                                               const SolverOptions& opts = SolverOptions::distance_defaults()) {
  using Point = BlockPoint<Scalar>;
  const auto& reg = p.reg;
  p.g.require_same_shape(p.x0);
  if (p.x0.shape() != reg.shape()) throw ShapeMismatch("regularizer shape does not match x0");
  const double x0_norm = p.x0.frobenius_norm();
  if (!(x0_norm > 0)) throw DegenerateSignal("cone distance: x0 = 0");
  const DenseTensor<Scalar> x0 = (1.0 / x0_norm) * p.x0;

  const auto active = active_atoms(x0, reg);
  const auto k = static_cast<Index>(active.size());
  std::vector<detail::AtomFace<Scalar>> faces;
  for (auto i : active) faces.emplace_back(reg.atoms()[i], x0);

  // Sum mode ties the scales: t = lambda * tau, i.e. t in span(lambda).
  const bool tied = reg.mode() == CompositeRegularizer::Mode::Sum && k > 1;
  Eigen::VectorXd lambda(k);
  for (Index i = 0; i < k; ++i) lambda[i] = reg.weights()[active[i]];
  lambda /= lambda.norm();

  ConeDistanceResult<Scalar> result;
  const double g_norm = p.g.frobenius_norm();
  if (g_norm == 0.0) {
    result.projection = DenseTensor<Scalar>(p.g.shape());
    return result;
  }
  const DenseTensor<Scalar> g = (1.0 / g_norm) * p.g;
  const double kd = static_cast<double>(k);

  // Smooth block: 1/2 ||g - sum_i y_i||^2 with t restricted to span(lambda).
  DenseTensor<Scalar> Y(x0.shape());
  auto prox_f = [&](const Point& v, double rho) {
    Y.data().setZero();
    for (const auto& b : v.x) Y.data() += b.data();
    Y.data() = (kd * g.data() + rho * Y.data()) / (kd + rho);
    Point out = v;
    for (auto& b : out.x) b.data() += (g.data() - Y.data()) / rho;
    if (tied) out.t = lambda * lambda.dot(v.t);
    return out;
  };
  auto prox_g = [&](const Point& v, double) {
    Point out = v;
    for (Index i = 0; i < k; ++i) faces[i].project(out.x[i], out.t[i]);
    return out;
  };
  auto cone_point = [&](const Point& w) {
    DenseTensor<Scalar> sum(x0.shape());
    for (const auto& b : w.x) sum.data() += b.data();
    return sum;
  };
  auto objective = [&](const Point&, const Point& w) {
    return 0.5 * (g.data() - cone_point(w).data()).squaredNorm();
  };

  auto run = douglas_rachford(Point::zeros(x0.shape(), static_cast<std::size_t>(k)), prox_f, prox_g,
                              objective, opts);
  auto proj = cone_point(run.w);
  result.distance = g_norm * (g.data() - proj.data()).norm();
  result.projection = g_norm * proj;
  result.report = run.report;
  result.report.objective = 0.5 * result.distance * result.distance;
  return result;
}

}  // namespace simstruct
