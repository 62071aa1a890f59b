#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "simstruct/core/parallel.hpp"
#include "simstruct/core/random.hpp"
#include "simstruct/experiments/regularizer_spec.hpp"
#include "simstruct/measurement.hpp"
#include "simstruct/signals.hpp"
#include "simstruct/statdim.hpp"

namespace simstruct {

/// Statistical-dimension sweep over a side length n for one signal model.
struct StatDimSweepConfig {
  /// "sparse_lowrank" (n x n, rank r, (s, s)-sparse) or "rank1_tensor" (order L, all sides n).
  std::string signal = "sparse_lowrank";
  /// Named families (`max`, `sum`, `l1`, `nuc` for matrices; `hosvd`, `tt`,
  /// `b2`, `b3`, `square_deal` for tensors) or regularizer specs.
  std::vector<std::string> families = {"sum", "max"};
  std::vector<Index> n_values = {15, 20, 25};
  Index s = 4;
  Index r = 1;
  int order = 4;
  std::size_t N = 100;
  std::uint64_t seed = 1;
  SolverOptions solver = SolverOptions::distance_defaults();
};

struct StatDimRow {
  std::string family;
  Index n = 0;
  Index s = 0;
  Index r = 0;
  std::size_t N = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t failures = 0;
};

/// Regularizer spec of a named family on a signal of the given order.
inline RegularizerSpec family_spec(const std::string& family, int order) {
  auto nuclear_family = [&](const BipartitionSet& set) {
    RegularizerSpec spec;
    for (const auto& b : set.parts()) {
      std::vector<int> modes;
      for (int m : b.modes()) modes.push_back(m + 1);
      spec.atoms.push_back({NormAtom::Kind::Nuclear, modes, std::nullopt});
    }
    return spec;
  };
  if (family == "max") return parse_regularizer_spec("max(l1=auto, nuc=auto)");
  if (family == "sum") return parse_regularizer_spec("sum(l1=auto, nuc=auto)");
  if (family == "l1") return parse_regularizer_spec("l1=1");
  if (family == "nuc") return parse_regularizer_spec("nuc=1");
  if (family == "hosvd") return nuclear_family(BipartitionSet::hosvd(order));
  if (family == "tt") return nuclear_family(BipartitionSet::tensor_train(order));
  if (family == "b2") return nuclear_family(BipartitionSet::b2());
  if (family == "b3") return nuclear_family(BipartitionSet::b3());
  if (family == "square_deal") return nuclear_family(BipartitionSet::square_deal());
  return parse_regularizer_spec(family);
}

inline std::uint64_t sweep_signal_seed(std::uint64_t base, Index n, Index s) {
  return stream_seed(base, {2, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s)});
}
inline std::uint64_t sweep_sample_seed(std::uint64_t base, Index n, Index s) {
  return stream_seed(base, {3, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s)});
}

/// Real signal of a sweep point.
inline RealTensor sweep_signal(const StatDimSweepConfig& cfg, Index n) {
  const auto seed = sweep_signal_seed(cfg.seed, n, cfg.s);
  if (cfg.signal == "sparse_lowrank") return sample_sparse_lowrank<double>({n, n, cfg.r, cfg.s, cfg.s, Field::Real}, seed);
  if (cfg.signal == "rank1_tensor")
    return sample_rank1_tensor<double>({Shape(static_cast<std::size_t>(cfg.order), n), Field::Real}, seed);
  throw ConfigError("signal must be 'sparse_lowrank' or 'rank1_tensor'");
}

/// One row per (n, family). Every family at a given n sees the same signal
/// and the same Gaussian samples.
inline std::vector<StatDimRow> run_statdim_sweep(const StatDimSweepConfig& cfg, unsigned threads = 1) {
  if (cfg.families.empty() || cfg.n_values.empty()) throw ConfigError("statdim sweep needs families and n values");
  const bool tensor = cfg.signal == "rank1_tensor";
  std::vector<StatDimRow> rows;
  for (Index n : cfg.n_values) {
    if (!tensor && (cfg.s < 1 || cfg.s > n)) throw ConfigError("sparsity must lie in 1..n");
    const auto x0 = sweep_signal(cfg, n);
    for (const auto& family : cfg.families) {
      const auto reg = family_spec(family, x0.order()).resolve(x0.shape(), &x0);
      const auto est = estimate_statdim(x0, reg, cfg.N, sweep_sample_seed(cfg.seed, n, cfg.s), cfg.solver, threads);
      rows.push_back({family, n, tensor ? 0 : cfg.s, tensor ? 1 : cfg.r, est.requested, est.mean, est.std_error, est.failures});
    }
  }
  return rows;
}

struct RipRow {
  Index m = 0;
  std::size_t samples = 0;
  double median_dev = 0.0;
  double max_dev = 0.0;
};

/// For each m: `maps` independent Gaussian maps, each probed with `samples`
/// model elements; reports the median and maximum deviation over maps.
template <class Scalar>
std::vector<RipRow> run_rip_study(const SparseLowRankModel& model, const std::vector<Index>& m_values, int maps,
                                  std::size_t samples, std::uint64_t seed, unsigned threads = 1) {
  model.validate();
  if (maps < 1 || samples < 1) throw ConfigError("rip study needs maps >= 1 and samples >= 1");
  std::vector<RipRow> rows;
  for (Index m : m_values) {
    if (m < 1) throw ConfigError("rip study needs m >= 1");
    auto devs = parallel_map(static_cast<std::size_t>(maps), threads, [&](std::size_t j) {
      const GaussianMeasurementMap<Scalar> A(m, model.shape(), stream_seed(seed, {4, static_cast<std::uint64_t>(m), j}));
      return empirical_rip_deviation(A, model, samples, stream_seed(seed, {5, static_cast<std::uint64_t>(m), j}));
    });
    std::sort(devs.begin(), devs.end());
    const std::size_t k = devs.size();
    const double median = k % 2 ? devs[k / 2] : 0.5 * (devs[k / 2 - 1] + devs[k / 2]);
    rows.push_back({m, samples, median, devs.back()});
  }
  return rows;
}

}  // namespace simstruct
