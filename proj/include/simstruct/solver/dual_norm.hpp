#pragma once

#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"
#include "simstruct/solver/projections.hpp"
#include "simstruct/solver/splitting.hpp"

namespace simstruct {

struct DualNormResult {
  double value = 0.0;
  SolveReport report;
};

/// Dual norm of a composite regularizer, as an infimum over decompositions
/// y = sum_i x_i:
///   Max(mu):    inf sum_i ||x_i||°_(i) / mu_i
///   Sum(lambda): inf max_i ||x_i||°_(i) / lambda_i
/// The value is evaluated at a decomposition that sums to y exactly, so it is
/// an upper bound that tightens with the tolerance.
template <class Scalar>
DualNormResult composite_dual_norm_report(const DenseTensor<Scalar>& y, const CompositeRegularizer& reg,
                                          double tolerance = 1e-7) {
  using Point = BlockPoint<Scalar>;
  if (y.shape() != reg.shape()) throw ShapeMismatch("dual norm: shape mismatch");
  const auto& atoms = reg.atoms();
  const std::size_t k = atoms.size();
  DualNormResult out;
  const double scale = y.frobenius_norm();
  if (scale == 0.0) return out;
  if (k == 1) {
    out.value = atom_dual_norm(y, atoms[0]) / reg.weights()[0];
    return out;
  }
  const DenseTensor<Scalar> ys = (1.0 / scale) * y;
  const bool max_mode = reg.mode() == CompositeRegularizer::Mode::Max;
  const double kd = static_cast<double>(k);
  Eigen::VectorXd w(static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) w[i] = reg.weights()[i];

  auto value_of = [&](const Point& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double term = atom_dual_norm(z.x[i], atoms[i]) / w[i];
      acc = max_mode ? acc + term : std::max(acc, term);
    }
    return acc;
  };

  DenseTensor<Scalar> S(y.shape());
  auto prox_f = [&](const Point& v, double rho) {
    S.data() = -ys.data();
    for (const auto& b : v.x) S.data() += b.data();
    Point p = v;
    for (auto& b : p.x) b.data() -= S.data() / kd;
    if (max_mode) {
      p.t = v.t - w.cwiseInverse() / rho;
    } else {
      const double tau = (w.dot(v.t) - 1.0 / rho) / w.squaredNorm();
      p.t = w * tau;
    }
    return p;
  };
  auto prox_g = [&](const Point& v, double) {
    Point p;
    p.t.resize(static_cast<Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      auto e = project_atom_dual_epigraph(v.x[i], v.t[i], atoms[i]);
      p.x.push_back(std::move(e.x));
      p.t[i] = e.t;
    }
    return p;
  };
  auto objective = [&](const Point& z, const Point&) { return value_of(z); };

  Point start = Point::zeros(y.shape(), k);
  for (auto& b : start.x) b.data() = ys.data() / kd;
  SolverOptions opts;
  opts.primal_tolerance = tolerance;
  opts.dual_tolerance = tolerance;
  opts.polish = false;
  auto run = douglas_rachford(std::move(start), prox_f, prox_g, objective, opts);
  out.report = run.report;
  out.value = scale * value_of(run.z);
  return out;
}

template <class Scalar>
double composite_dual_norm(const DenseTensor<Scalar>& y, const CompositeRegularizer& reg, double tolerance = 1e-7) {
  auto r = composite_dual_norm_report(y, reg, tolerance);
  if (!r.report.converged()) throw NumericalFailure("dual norm: solver stopped with status " + to_string(r.report.status));
  return r.value;
}

}  // namespace simstruct
