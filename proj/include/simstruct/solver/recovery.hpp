#pragma once

#include <cmath>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/measurement.hpp"
#include "simstruct/regularizers.hpp"
#include "simstruct/solver/polish.hpp"
#include "simstruct/solver/projections.hpp"
#include "simstruct/solver/splitting.hpp"

namespace simstruct {

template <class Scalar>
struct RecoveryResult {
  DenseTensor<Scalar> x;
  SolveReport report;
  bool polished = false;
};

/// Solves min ||x||_reg subject to A(x) = y.
///
/// Both modes keep one copy x_i per atom and split between the consensus
/// set {x_i = x, A(x) = y} (an affine projection) and the atoms:
///   Sum: prox of lambda_i ||.||_(i) on each copy.
///   Max: min t s.t. mu_i ||x_i||_(i) <= t, i.e. projections onto the
///        epigraphs (x_i, s_i) with s_i = t / mu_i.
/// Data are rescaled internally so the least-norm solution has unit norm and
/// unit regularizer value.
template <class Scalar>
RecoveryResult<Scalar> solve_recovery(const GaussianMeasurementMap<Scalar>& A,
                                      const typename GaussianMeasurementMap<Scalar>::Vector& y,
                                      const CompositeRegularizer& reg,
                                      const SolverOptions& opts = SolverOptions::recovery_defaults()) {
  using Point = BlockPoint<Scalar>;
  opts.validate();
  if (reg.shape() != A.domain()) throw ShapeMismatch("regularizer and measurement map disagree on shape");
  if (y.size() != A.rows()) throw ShapeMismatch("measurement vector has the wrong length");

  RecoveryResult<Scalar> out;
  const DenseTensor<Scalar> least = A.least_norm(y);
  const double scale = least.frobenius_norm();
  if (!(scale > 0) || A.rows() >= A.dimension()) {
    // y = 0, or A is injective and the feasible set is a single point.
    out.x = least;
    out.report.primal_residual = (A.apply(least) - y).norm() / std::max(1.0, y.norm());
    return out;
  }
  const typename GaussianMeasurementMap<Scalar>::Vector ys = y / scale;
  const DenseTensor<Scalar> start = (1.0 / scale) * least;
  const double weight_scale = 1.0 / composite_norm(start, reg);
  std::vector<double> w(reg.weights());
  for (auto& v : w) v *= weight_scale;
  const auto& atoms = reg.atoms();
  const std::size_t k = atoms.size();
  const double kd = static_cast<double>(k);
  const bool max_mode = reg.mode() == CompositeRegularizer::Mode::Max;

  DenseTensor<Scalar> mean(A.domain());
  auto consensus = [&](const Point& v) {
    mean.data().setZero();
    for (const auto& b : v.x) mean.data() += b.data();
    mean.data() /= kd;
    return A.affine_project(ys, mean);
  };

  Point init;
  init.x.assign(k, start);
  init.t = Eigen::VectorXd::Zero(max_mode ? static_cast<Index>(k) : 0);
  if (max_mode)
    for (std::size_t i = 0; i < k; ++i) init.t[i] = atom_norm(start, atoms[i]);

  double inv_sq = 0.0;
  for (double mu : w) inv_sq += 1.0 / (mu * mu);

  auto prox_f = [&](const Point& v, double rho) {
    Point p;
    p.x.assign(k, consensus(v));
    if (max_mode) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += v.t[i] / w[i];
      const double t = (s - 1.0 / rho) / inv_sq;
      p.t.resize(static_cast<Index>(k));
      for (std::size_t i = 0; i < k; ++i) p.t[i] = t / w[i];
    }
    return p;
  };
  auto prox_g = [&](const Point& v, double rho) {
    Point p;
    p.x.reserve(k);
    p.t = v.t;
    for (std::size_t i = 0; i < k; ++i) {
      if (max_mode) {
        auto e = project_atom_epigraph(v.x[i], v.t[i], atoms[i]);
        p.x.push_back(std::move(e.x));
        p.t[i] = e.t;
      } else {
        p.x.push_back(prox_atom(v.x[i], atoms[i], w[i] / rho));
      }
    }
    return p;
  };
  auto objective = [&](const Point& z, const Point&) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double term = w[i] * atom_norm(z.x.front(), atoms[i]);
      acc = max_mode ? std::max(acc, term) : acc + term;
    }
    return acc;
  };

  auto run = douglas_rachford(std::move(init), prox_f, prox_g, objective, opts);
  DenseTensor<Scalar> x = std::move(run.z.x.front());
  out.report = run.report;
  if (opts.polish && out.report.status != SolveStatus::NumericalFailure) {
    DenseTensor<Scalar> refined = polish(x, A, ys, &reg);
    out.polished = !(refined == x);
    x = std::move(refined);
  }
  out.x = scale * x;
  out.report.objective = composite_norm(out.x, reg);
  return out;
}

}  // namespace simstruct
