#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "simstruct/core/parallel.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/experiments/config.hpp"
#include "simstruct/experiments/regularizer_spec.hpp"
#include "simstruct/measurement.hpp"
#include "simstruct/regularizers.hpp"
#include "simstruct/signals.hpp"
#include "simstruct/solver/recovery.hpp"

namespace simstruct {

/// Outcome of all trials in one (m, s) cell of a phase grid.
struct BinResult {
  Index m = 0;
  Index s = 0;
  int trials = 0;
  int successes = 0;
  double mean_rel_err = 0.0;
  double mean_iters = 0.0;
  /// Trials whose solver stopped without converging (iteration cap or NumericalFailure).
  int failures = 0;

  double success_rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct PhaseResult {
  std::vector<BinResult> bins;
  int failures = 0;
};

template <class Scalar>
struct GreedyResult {
  DenseTensor<Scalar> x;
  /// (lambda_nuclear, lambda_l1) before each solve, plus the final update.
  std::vector<std::array<double, 2>> weights;
  std::vector<SolveReport> reports;
};

/// Iteratively reweighted Sum recovery with the nuclear norm and l1 norm:
/// start from lambda_nuc = ||A^H y||_linf and lambda_l1 = ||A^H y||_op (swapped
/// with `swap_init`), then set lambda = 1 / ||X^(t)|| after every solve.
template <class Scalar>
GreedyResult<Scalar> greedy_weights_recover(const GaussianMeasurementMap<Scalar>& A,
                                            const typename GaussianMeasurementMap<Scalar>::Vector& y, int T,
                                            const SolverOptions& opts = SolverOptions::recovery_defaults(),
                                            bool swap_init = false) {
  if (T < 1) throw ConfigError("greedy iterations must be >= 1");
  const Shape& shape = A.domain();
  const NormAtom nuc = NormAtom::nuclear(shape);
  const NormAtom l1 = NormAtom::l1(shape);
  const auto back = A.adjoint(y);
  double lam_nuc = atom_dual_norm(back, l1);
  double lam_l1 = atom_dual_norm(back, nuc);
  if (swap_init) std::swap(lam_nuc, lam_l1);
  if (!(lam_nuc > 0) || !(lam_l1 > 0)) throw DegenerateSignal("greedy weights: A^H y vanishes");

  GreedyResult<Scalar> out;
  out.weights.push_back({lam_nuc, lam_l1});
  for (int t = 0; t < T; ++t) {
    CompositeRegularizer reg(CompositeRegularizer::Mode::Sum, {nuc, l1}, {lam_nuc, lam_l1});
    auto res = solve_recovery(A, y, reg, opts);
    out.reports.push_back(res.report);
    const double a = atom_norm(res.x, nuc);
    const double b = atom_norm(res.x, l1);
    if (!(a > 0) || !(b > 0)) throw DegenerateSignal("greedy weights: iterate " + std::to_string(t + 1) + " vanishes");
    lam_nuc = 1.0 / a;
    lam_l1 = 1.0 / b;
    out.weights.push_back({lam_nuc, lam_l1});
    out.x = std::move(res.x);
  }
  return out;
}

struct TrialOutcome {
  double rel_err = 0.0;
  int iterations = 0;
  bool success = false;
  bool failed = false;
};

/// Seeds of one trial: the signal depends on (s, trial) and the map on
/// (s, trial) only, so every m sees the same signal and nested maps.
inline std::uint64_t signal_seed(std::uint64_t base, Index s, int trial) {
  return stream_seed(base, {0, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(trial)});
}
inline std::uint64_t map_seed(std::uint64_t base, Index s, int trial) {
  return stream_seed(base, {1, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(trial)});
}

template <class Scalar>
DenseTensor<Scalar> phase_signal(const PhaseGridConfig& cfg, Index s, int trial) {
  const auto seed = signal_seed(cfg.seed, s, trial);
  if (cfg.model == "sparse_lowrank")
    return sample_sparse_lowrank<Scalar>({cfg.n, cfg.n, cfg.r, s, s, cfg.field}, seed);
  return sample_rank1_tensor<Scalar>({Shape(static_cast<std::size_t>(cfg.order), s), cfg.field}, seed);
}

/// ||X - X0|| / ||X|| (or / ||X0||), infinite for a zero denominator.
template <class Scalar>
double relative_error(const DenseTensor<Scalar>& x, const DenseTensor<Scalar>& x0, SuccessDenominator d) {
  const double den = d == SuccessDenominator::Recon ? x.frobenius_norm() : x0.frobenius_norm();
  const double num = (x.data() - x0.data()).norm();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

template <class Scalar>
TrialOutcome run_phase_trial(const PhaseGridConfig& cfg, const RegularizerSpec& spec, Index m, Index s, int trial) {
  const auto x0 = phase_signal<Scalar>(cfg, s, trial);
  const GaussianMeasurementMap<Scalar> A(m, x0.shape(), map_seed(cfg.seed, s, trial));
  const auto y = A.apply(x0);
  TrialOutcome o;
  DenseTensor<Scalar> x;
  try {
    if (cfg.method == "greedy") {
      auto g = greedy_weights_recover(A, y, cfg.greedy_iterations, cfg.solver, cfg.swap_greedy_init);
      for (const auto& r : g.reports) {
        o.iterations += r.iterations;
        o.failed = o.failed || !r.converged();
      }
      x = std::move(g.x);
    } else {
      auto res = solve_recovery(A, y, spec.resolve(x0.shape(), &x0), cfg.solver);
      o.iterations = res.report.iterations;
      o.failed = !res.report.converged();
      x = std::move(res.x);
    }
  } catch (const DegenerateSignal&) {
    // m = 0 or a vanishing iterate: nothing was recovered.
    x = DenseTensor<Scalar>(x0.shape());
  } catch (const NumericalFailure&) {
    o.failed = true;
    x = DenseTensor<Scalar>(x0.shape());
  }
  o.rel_err = relative_error(x, x0, cfg.denominator);
  o.success = o.rel_err <= cfg.threshold;
  return o;
}

/// Runs every (m, s, trial) of the grid; bins are ordered by s, then m.
inline PhaseResult run_phase_transition(const PhaseGridConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const auto spec = parse_regularizer_spec(cfg.regularizer);
  const std::size_t nm = cfg.m_values.size();
  const std::size_t per_bin = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = cfg.s_values.size() * nm * per_bin;
  auto outcomes = parallel_map(total, threads, [&](std::size_t idx) {
    const std::size_t bin = idx / per_bin;
    const int trial = static_cast<int>(idx % per_bin);
    const Index s = cfg.s_values[bin / nm];
    const Index m = cfg.m_values[bin % nm];
    return cfg.field == Field::Real ? run_phase_trial<double>(cfg, spec, m, s, trial)
                                    : run_phase_trial<std::complex<double>>(cfg, spec, m, s, trial);
  });
  PhaseResult out;
  for (std::size_t bin = 0; bin < cfg.s_values.size() * nm; ++bin) {
    BinResult b;
    b.s = cfg.s_values[bin / nm];
    b.m = cfg.m_values[bin % nm];
    b.trials = cfg.trials;
    double err = 0.0, iters = 0.0;
    for (std::size_t t = 0; t < per_bin; ++t) {
      const auto& o = outcomes[bin * per_bin + t];
      b.successes += o.success;
      b.failures += o.failed;
      err += o.rel_err;
      iters += o.iterations;
    }
    b.mean_rel_err = err / cfg.trials;
    b.mean_iters = iters / cfg.trials;
    out.failures += b.failures;
    out.bins.push_back(b);
  }
  return out;
}

}  // namespace simstruct
