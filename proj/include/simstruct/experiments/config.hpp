#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "simstruct/core/errors.hpp"
#include "simstruct/core/tensor.hpp"
#include "simstruct/experiments/regularizer_spec.hpp"
#include "simstruct/solver/splitting.hpp"

namespace simstruct {

enum class SuccessDenominator { Recon, Signal };

inline std::string to_string(SuccessDenominator d) { return d == SuccessDenominator::Recon ? "recon" : "signal"; }

inline SuccessDenominator parse_success_denominator(const std::string& s) {
  if (s == "recon") return SuccessDenominator::Recon;
  if (s == "signal") return SuccessDenominator::Signal;
  throw ConfigError("success denominator must be 'recon' or 'signal', got '" + s + "'");
}

inline Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw ConfigError("field must be 'real' or 'complex', got '" + s + "'");
}

/// One phase-transition experiment: a grid over the number of measurements
/// m and a secondary parameter (the sparsity s of sparse+low-rank matrices,
/// or the local dimension n of product tensors).
struct PhaseGridConfig {
  /// "sparse_lowrank" or "rank1_tensor".
  std::string model = "sparse_lowrank";
  /// Matrix side length (sparse_lowrank).
  Index n = 20;
  Index r = 1;
  /// Tensor order (rank1_tensor).
  int order = 4;
  std::vector<Index> m_values;
  std::vector<Index> s_values;
  std::string regularizer = "max(l1=auto, nuc=auto)";
  /// "convex" (solve once with the regularizer) or "greedy" (iterated Sum weights).
  std::string method = "convex";
  int greedy_iterations = 3;
  bool swap_greedy_init = false;
  int trials = 10;
  double threshold = 1e-5;
  std::uint64_t seed = 1;
  Field field = Field::Complex;
  SuccessDenominator denominator = SuccessDenominator::Recon;
  SolverOptions solver = SolverOptions::recovery_defaults();
  /// Largest tolerated number of trials whose solver did not converge; negative
  /// means unlimited.
  int failure_budget = -1;

  void validate() const {
    if (model != "sparse_lowrank" && model != "rank1_tensor")
      throw ConfigError("model must be 'sparse_lowrank' or 'rank1_tensor'");
    if (method != "convex" && method != "greedy") throw ConfigError("method must be 'convex' or 'greedy'");
    if (method == "greedy" && model != "sparse_lowrank") throw ConfigError("greedy weights need the sparse_lowrank model");
    if (greedy_iterations < 1) throw ConfigError("greedy_iterations must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!(threshold > 0)) throw ConfigError("threshold must be > 0");
    if (m_values.empty() || s_values.empty()) throw ConfigError("m_values and s_values must be nonempty");
    for (Index m : m_values)
      if (m < 0) throw ConfigError("m_values must be >= 0");
    if (model == "sparse_lowrank") {
      if (n < 1 || r < 1) throw ConfigError("n and r must be >= 1");
      for (Index s : s_values)
        if (s < 1 || s > n) throw ConfigError("sparsity values must lie in 1..n");
    } else {
      if (order < 2 || order > kMaxOrder) throw ConfigError("tensor order must be in 2..8");
      for (Index s : s_values)
        if (s < 1) throw ConfigError("local dimensions must be >= 1");
    }
    parse_regularizer_spec(regularizer);
    solver.validate();
  }
};

inline void to_json(nlohmann::json& j, const SolverOptions& o) {
  j = {{"max_iterations", o.max_iterations}, {"primal_tolerance", o.primal_tolerance},
       {"dual_tolerance", o.dual_tolerance},  {"step", o.step},
       {"relaxation", o.relaxation},          {"adaptive_step", o.adaptive_step},
       {"polish", o.polish}};
}

inline void from_json(const nlohmann::json& j, SolverOptions& o) {
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.primal_tolerance = j.value("primal_tolerance", o.primal_tolerance);
  o.dual_tolerance = j.value("dual_tolerance", o.dual_tolerance);
  o.step = j.value("step", o.step);
  o.relaxation = j.value("relaxation", o.relaxation);
  o.adaptive_step = j.value("adaptive_step", o.adaptive_step);
  o.polish = j.value("polish", o.polish);
}

inline void to_json(nlohmann::json& j, const PhaseGridConfig& c) {
  j = {{"model", c.model},
       {"n", c.n},
       {"r", c.r},
       {"order", c.order},
       {"m_values", c.m_values},
       {"s_values", c.s_values},
       {"regularizer", c.regularizer},
       {"method", c.method},
       {"greedy_iterations", c.greedy_iterations},
       {"swap_greedy_init", c.swap_greedy_init},
       {"trials", c.trials},
       {"threshold", c.threshold},
       {"seed", c.seed},
       {"field", to_string(c.field)},
       {"success_denominator", to_string(c.denominator)},
       {"solver", c.solver},
       {"failure_budget", c.failure_budget}};
}

inline void from_json(const nlohmann::json& j, PhaseGridConfig& c) {
  static const char* known[] = {"model",  "n",           "r",         "order",     "m_values",
                                "s_values", "regularizer", "method",  "greedy_iterations",
                                "swap_greedy_init", "trials", "threshold", "seed", "field",
                                "success_denominator", "solver", "failure_budget"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config field '" + key + "'");
  }
  c.model = j.value("model", c.model);
  c.n = j.value("n", c.n);
  c.r = j.value("r", c.r);
  c.order = j.value("order", c.order);
  c.m_values = j.value("m_values", c.m_values);
  c.s_values = j.value("s_values", c.s_values);
  c.regularizer = j.value("regularizer", c.regularizer);
  c.method = j.value("method", c.method);
  c.greedy_iterations = j.value("greedy_iterations", c.greedy_iterations);
  c.swap_greedy_init = j.value("swap_greedy_init", c.swap_greedy_init);
  c.trials = j.value("trials", c.trials);
  c.threshold = j.value("threshold", c.threshold);
  c.seed = j.value("seed", c.seed);
  if (j.contains("field")) c.field = parse_field(j.at("field").get<std::string>());
  if (j.contains("success_denominator"))
    c.denominator = parse_success_denominator(j.at("success_denominator").get<std::string>());
  if (j.contains("solver")) c.solver = j.at("solver").get<SolverOptions>();
  c.failure_budget = j.value("failure_budget", c.failure_budget);
}

/// Reads a JSON config; type errors and unknown fields become ConfigError.
inline PhaseGridConfig load_phase_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    auto j = nlohmann::json::parse(in, nullptr, true, true);
    auto c = j.get<PhaseGridConfig>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

}  // namespace simstruct
