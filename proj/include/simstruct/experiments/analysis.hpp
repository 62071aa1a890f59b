#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "simstruct/core/errors.hpp"
#include "simstruct/experiments/phase.hpp"

namespace simstruct {

/// P(success | m) = 1 / (1 + exp(-(intercept + slope * m))).
struct LogisticFit {
  double intercept = 0.0;
  double slope = 0.0;
  int iterations = 0;

  double probability(double m) const { return 1.0 / (1.0 + std::exp(-(intercept + slope * m))); }
  /// m at which the fitted success probability is 1/2.
  double midpoint() const { return -intercept / slope; }
};

/// Binomial logistic regression by Newton's method (IRLS). A small ridge
/// term on the standardized slope keeps the fit finite for perfectly
/// separated data, where it places the midpoint between the last failing
/// and the first succeeding m.
inline LogisticFit fit_logistic(const std::vector<double>& m, const std::vector<int>& successes,
                                const std::vector<int>& trials, double ridge = 1e-3) {
  const std::size_t n = m.size();
  if (n < 2 || successes.size() != n || trials.size() != n) throw ConfigError("logistic fit needs >= 2 matching points");
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : m) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  if (!(sd > 0)) throw ConfigError("logistic fit needs distinct m values");

  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  LogisticFit fit;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d grad(0.0, -ridge * beta[1]);
    Eigen::Matrix2d H;
    H << 0.0, 0.0, 0.0, ridge;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (m[i] - mean) / sd;
      const double p = 1.0 / (1.0 + std::exp(-(beta[0] + beta[1] * x)));
      const double k = static_cast<double>(trials[i]);
      const double r = static_cast<double>(successes[i]) - k * p;
      const double w = k * p * (1.0 - p);
      grad += Eigen::Vector2d(r, r * x);
      H += w * Eigen::Matrix2d{{1.0, x}, {x, x * x}};
    }
    H.diagonal().array() += 1e-12;
    const Eigen::Vector2d step = H.ldlt().solve(grad);
    beta += step;
    fit.iterations = it + 1;
    if (step.norm() < 1e-12 * (1.0 + beta.norm())) break;
  }
  fit.slope = beta[1] / sd;
  fit.intercept = beta[0] - beta[1] * mean / sd;
  return fit;
}

/// Logistic fit of the bins with secondary parameter s.
inline LogisticFit fit_phase_bins(const std::vector<BinResult>& bins, Index s) {
  std::vector<double> m;
  std::vector<int> k, t;
  for (const auto& b : bins) {
    if (b.s != s) continue;
    m.push_back(static_cast<double>(b.m));
    k.push_back(b.successes);
    t.push_back(b.trials);
  }
  return fit_logistic(m, k, t);
}

}  // namespace simstruct
