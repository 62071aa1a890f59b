#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"

namespace simstruct {

struct SolverOptions {
  int max_iterations = 20000;
  /// Tolerance on the consensus gap ||z - w||, relative to 1 + iterate size.
  double primal_tolerance = 1e-6;
  /// Tolerance on the fixed-point change rho ||w - w_prev||.
  double dual_tolerance = 1e-6;
  /// Initial penalty / step parameter rho.
  double step = 1.0;
  /// Over-relaxation factor alpha in (0, 2).
  double relaxation = 1.0;
  /// Residual-balancing updates of rho during the first half of the run.
  bool adaptive_step = true;
  /// Restricted least-squares refinement of recovery solutions.
  bool polish = true;

  static SolverOptions distance_defaults() {
    SolverOptions o;
    o.primal_tolerance = 1e-7;
    o.dual_tolerance = 1e-7;
    o.polish = false;
    return o;
  }
  static SolverOptions recovery_defaults() { return SolverOptions{}; }

  void validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(primal_tolerance > 0) || !(dual_tolerance > 0)) throw ConfigError("tolerances must be > 0");
    if (!(step > 0)) throw ConfigError("step must be > 0");
    if (!(relaxation > 0 && relaxation < 2)) throw ConfigError("relaxation must lie in (0, 2)");
  }
};

enum class SolveStatus { Converged, IterationCap, NumericalFailure };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationCap: return "iteration-cap";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct SolveReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Converged;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// Iterate of a splitting method: k tensor blocks plus k real scalars.
template <class Scalar>
struct BlockPoint {
  std::vector<DenseTensor<Scalar>> x;
  Eigen::VectorXd t;

  static BlockPoint zeros(const Shape& shape, std::size_t k) {
    return {std::vector<DenseTensor<Scalar>>(k, DenseTensor<Scalar>(shape)), Eigen::VectorXd::Zero(k)};
  }

  double squared_norm() const {
    double acc = t.squaredNorm();
    for (const auto& b : x) acc += b.squared_norm();
    return acc;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  bool all_finite() const {
    if (!t.allFinite()) return false;
    return std::all_of(x.begin(), x.end(), [](const auto& b) { return b.all_finite(); });
  }

  /// this = a * p + b * q
  void assign_combination(double a, const BlockPoint& p, double b, const BlockPoint& q) {
    x.resize(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (x[i].shape() != p.x[i].shape()) x[i] = DenseTensor<Scalar>(p.x[i].shape());
      x[i].data() = a * p.x[i].data() + b * q.x[i].data();
    }
    t = a * p.t + b * q.t;
  }

  friend double distance(const BlockPoint& p, const BlockPoint& q) {
    double acc = (p.t - q.t).squaredNorm();
    for (std::size_t i = 0; i < p.x.size(); ++i) acc += (p.x[i].data() - q.x[i].data()).squaredNorm();
    return std::sqrt(acc);
  }
};

/// Result of a two-block splitting run; `z` is the iterate satisfying the
/// smooth/affine block, `w` the one satisfying the cone/prox block.
template <class Point>
struct SplittingResult {
  Point z;
  Point w;
  SolveReport report;
};

/// Douglas-Rachford splitting in its ADMM form for min f(z) + g(w) s.t. z = w:
///
///   z     = prox_f(w - u, rho)
///   zr    = alpha z + (1 - alpha) w
///   w_new = prox_g(zr + u, rho)
///   u    += zr - w_new
///
/// `prox_f(v, rho)` and `prox_g(v, rho)` return argmin h(p) + rho/2 ||p - v||^2.
/// `objective(z, w)` is sampled periodically; non-finite values or runaway
/// iterates stop the run with NumericalFailure.
template <class Point, class ProxF, class ProxG, class Objective>
SplittingResult<Point> douglas_rachford(Point start, ProxF&& prox_f, ProxG&& prox_g,
                                        Objective&& objective, const SolverOptions& opts) {
  opts.validate();
  constexpr int kMonitorEvery = 25;
  constexpr int kAdaptEvery = 20;
  constexpr double kBalance = 10.0;
  constexpr double kDivergence = 1e8;

  double rho = opts.step;
  const double alpha = opts.relaxation;
  Point w = std::move(start);
  Point u = w;
  u.assign_combination(0.0, w, 0.0, w);
  Point z = w, zr = w, shifted = w;
  const double scale0 = 1.0 + w.norm();

  SplittingResult<Point> out;
  SolveReport& rep = out.report;
  rep.status = SolveStatus::IterationCap;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    shifted.assign_combination(1.0, w, -1.0, u);
    z = prox_f(shifted, rho);
    zr.assign_combination(alpha, z, 1.0 - alpha, w);
    shifted.assign_combination(1.0, zr, 1.0, u);
    Point w_new = prox_g(shifted, rho);
    u.assign_combination(1.0, u, 1.0, zr);
    u.assign_combination(1.0, u, -1.0, w_new);

    const double r = distance(z, w_new);
    const double s = rho * distance(w_new, w);
    w = std::move(w_new);
    rep.iterations = it;

    const double size = std::max(z.norm(), w.norm());
    const double r_scaled = r / (1.0 + size);
    const double s_scaled = s / (1.0 + rho * u.norm());
    rep.primal_residual = r_scaled;
    rep.dual_residual = s_scaled;

    if (!std::isfinite(r) || !std::isfinite(s) || size > kDivergence * scale0) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    if (it % kMonitorEvery == 0) {
      const double obj = objective(z, w);
      if (!std::isfinite(obj)) {
        rep.status = SolveStatus::NumericalFailure;
        break;
      }
    }
    if (r_scaled <= opts.primal_tolerance && s_scaled <= opts.dual_tolerance) {
      rep.status = SolveStatus::Converged;
      break;
    }
    if (opts.adaptive_step && it % kAdaptEvery == 0 && it < opts.max_iterations / 2) {
      const double rp = r_scaled / opts.primal_tolerance;
      const double rd = s_scaled / opts.dual_tolerance;
      if (rp > kBalance * rd) {
        rho *= 2.0;
        u.assign_combination(0.5, u, 0.0, u);
      } else if (rd > kBalance * rp) {
        rho *= 0.5;
        u.assign_combination(2.0, u, 0.0, u);
      }
    }
  }
  rep.objective = objective(z, w);
  if (!std::isfinite(rep.objective)) rep.status = SolveStatus::NumericalFailure;
  out.z = std::move(z);
  out.w = std::move(w);
  return out;
}

}  // namespace simstruct
