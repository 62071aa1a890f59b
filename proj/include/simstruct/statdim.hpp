#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "simstruct/core/errors.hpp"
#include "simstruct/core/linalg.hpp"
#include "simstruct/core/parallel.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/regularizers.hpp"
#include "simstruct/solver/cone_distance.hpp"

namespace simstruct {

/// Monte-Carlo estimate of a statistical dimension E dist^2(g, cone).
struct StatDimEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  /// Samples that entered the mean.
  std::size_t count = 0;
  std::size_t requested = 0;
  std::size_t failures = 0;
  std::uint64_t seed = 0;
  /// Squared distance per sample, NaN where the solver failed.
  std::vector<double> samples;

  /// More than 5% failed samples invalidates the estimate.
  bool valid() const { return count >= 2 && failures * 20 <= requested; }
};

/// Mean, unbiased standard deviation and standard error of the finite values.
inline StatDimEstimate summarize_samples(std::vector<double> samples, std::uint64_t seed) {
  StatDimEstimate e;
  e.seed = seed;
  e.requested = samples.size();
  double sum = 0.0;
  for (double s : samples) {
    if (std::isfinite(s)) {
      sum += s;
      ++e.count;
    } else {
      ++e.failures;
    }
  }
  if (e.count) e.mean = sum / static_cast<double>(e.count);
  if (e.count >= 2) {
    double ss = 0.0;
    for (double s : samples)
      if (std::isfinite(s)) ss += (s - e.mean) * (s - e.mean);
    e.stddev = std::sqrt(ss / static_cast<double>(e.count - 1));
    e.std_error = e.stddev / std::sqrt(static_cast<double>(e.count));
  }
  e.samples = std::move(samples);
  return e;
}

/// Draws N real Gaussian g_k (seeded by stream k of `seed`) and averages
/// dist^2(g_k, cone of the subdifferential of reg at x0).
inline StatDimEstimate estimate_statdim(const RealTensor& x0, const CompositeRegularizer& reg, std::size_t N,
                                        std::uint64_t seed,
                                        const SolverOptions& opts = SolverOptions::distance_defaults(),
                                        unsigned threads = 1) {
  if (N < 2) throw ConfigError("statdim needs N >= 2 samples");
  if (!(x0.frobenius_norm() > 0)) throw DegenerateSignal("statdim: x0 = 0");
  auto samples = parallel_map(N, threads, [&](std::size_t k) {
    auto g = sample_gaussian<double>(x0.shape(), stream_seed(seed, k));
    auto res = solve_cone_distance<double>({std::move(g), x0, reg}, opts);
    if (!res.report.converged()) return std::numeric_limits<double>::quiet_NaN();
    return res.distance * res.distance;
  });
  return summarize_samples(std::move(samples), seed);
}

namespace detail {

/// Minimizes a convex function on [0, hi] given its nondecreasing derivative.
template <class Derivative>
double minimize_by_derivative(Derivative&& df, double hi) {
  if (df(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  while (df(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (df(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// dist(g, cone of the l1 subdifferential at x0), by a one-dimensional search
/// over the cone scale tau.
template <class Scalar>
double closed_form_l1_cone_distance(const DenseTensor<Scalar>& g, const DenseTensor<Scalar>& x0) {
  g.require_same_shape(x0);
  const double top = x0.data().cwiseAbs().maxCoeff();
  if (!(top > 0)) throw DegenerateSignal("l1 cone distance: x0 = 0");
  std::vector<double> on;   // Re(conj(sign x0_i) g_i) on the support
  std::vector<double> off;  // |g_i| off the support
  double on_sq = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double mag = std::abs(x0[i]);
    if (mag > 0) {
      on.push_back(std::real(std::conj(x0[i] / mag) * g[i]));
      on_sq += std::norm(g[i]);
    } else {
      off.push_back(std::abs(g[i]));
    }
  }
  auto f = [&](double tau) {
    double v = on_sq;
    for (double c : on) v += -2.0 * tau * c + tau * tau;
    for (double a : off) v += std::pow(std::max(a - tau, 0.0), 2);
    return v;
  };
  auto df = [&](double tau) {
    double v = 0.0;
    for (double c : on) v += tau - c;
    for (double a : off) v -= std::max(a - tau, 0.0);
    return v;
  };
  const double hi = 10.0 * g.frobenius_norm() * std::sqrt(static_cast<double>(g.size())) + 1e-300;
  const double tau = detail::minimize_by_derivative(df, hi);
  return std::sqrt(std::max(f(tau), 0.0));
}

/// dist(G, cone of the nuclear-norm subdifferential at X0). With
/// X0 = U S V^H, subgradients are tau (U V^H + W) with ||W|| <= 1 acting on
/// the orthogonal complements of the row and column spaces.
template <class Scalar>
double closed_form_nuclear_cone_distance(const DenseTensor<Scalar>& g, const DenseTensor<Scalar>& x0) {
  g.require_same_shape(x0);
  using M = ColMatrix<Scalar>;
  const M X = x0.as_matrix();
  const M G = g.as_matrix();
  const auto dec = svd(X);
  const Index r = numerical_rank(dec.singular_values, 1e-9);
  if (r == 0) throw DegenerateSignal("nuclear cone distance: X0 = 0");
  const M U = dec.U.leftCols(r);
  const M V = dec.V.leftCols(r);
  const M E = U * V.adjoint();
  const M PU = M::Identity(X.rows(), X.rows()) - U * U.adjoint();
  const M PV = M::Identity(X.cols(), X.cols()) - V * V.adjoint();
  const M Gperp = PU * G * PV;
  const M Gt = G - Gperp;
  const double c = std::real((E.adjoint() * Gt).trace());
  const double t_sq = Gt.squaredNorm();
  const Eigen::VectorXd sig = singular_values(Gperp);
  const double rd = static_cast<double>(r);
  auto f = [&](double tau) {
    double v = t_sq - 2.0 * tau * c + tau * tau * rd;
    for (Index j = 0; j < sig.size(); ++j) v += std::pow(std::max(sig[j] - tau, 0.0), 2);
    return v;
  };
  auto df = [&](double tau) {
    double v = tau * rd - c;
    for (Index j = 0; j < sig.size(); ++j) v -= std::max(sig[j] - tau, 0.0);
    return v;
  };
  const double L = std::sqrt(static_cast<double>(std::min(X.rows(), X.cols())));
  const double tau = detail::minimize_by_derivative(df, 10.0 * G.norm() * L + 1e-300);
  return std::sqrt(std::max(f(tau), 0.0));
}

}  // namespace simstruct
