// Command-line front end: statistical dimension sweeps, recovery runs,
// phase grids, lower bounds, RIP studies and greedy weight iteration.

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "simstruct/simstruct.hpp"

namespace fs = std::filesystem;
using namespace simstruct;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  std::string config;
  bool seed_given = false;
};

std::vector<Index> range(Index lo, Index hi, Index step) {
  std::vector<Index> v;
  for (Index x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

/// A config file may be a plain PhaseGridConfig or a manifest written by an
/// earlier run, in which case its "config" member is used.
PhaseGridConfig load_config_or_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    auto j = json::parse(in, nullptr, true, true);
    if (j.is_object() && j.contains("command") && j.contains("config")) j = j.at("config");
    auto c = j.get<PhaseGridConfig>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void write_manifest(const Globals& g, const std::string& command, const json& config, const json& solver,
                    const Timer& timer, const std::string& started) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = g.seed;
  m.solver = solver;
  m.threads = g.threads;
  m.wall_seconds = timer.seconds();
  m.started_at = started;
  emit_manifest(m, fs::path(g.out) / (command + "_manifest.json"));
}

void say(const std::string& s) { std::cout << s << "\n"; }

// ---------------------------------------------------------------- statdim

struct StatDimArgs {
  StatDimSweepConfig cfg;
  std::vector<Index> n_values;
};

int run_statdim(const Globals& g, StatDimArgs a) {
  if (!g.config.empty()) throw ConfigError("statdim takes its parameters from flags, not --config");
  const Timer timer;
  const auto started = utc_timestamp();
  auto cfg = a.cfg;
  cfg.seed = g.seed;
  if (!a.n_values.empty()) cfg.n_values = a.n_values;
  if (cfg.N < 2) throw ConfigError("--N must be >= 2");
  for (const auto& f : cfg.families) family_spec(f, cfg.order);
  const auto rows = run_statdim_sweep(cfg, g.threads);
  emit_csv(statdim_table(rows), fs::path(g.out) / "statdim.csv");
  write_text(fs::path(g.out) / "statdim.svg", statdim_svg(rows));
  json jc = {{"signal", cfg.signal}, {"families", cfg.families}, {"n_values", cfg.n_values}, {"s", cfg.s},
             {"r", cfg.r},           {"order", cfg.order},       {"N", cfg.N},                {"seed", cfg.seed}};
  write_manifest(g, "statdim", jc, cfg.solver, timer, started);
  bool ok = true;
  for (const auto& r : rows) {
    std::printf("%-12s n=%-3lld mean=%.4f stderr=%.4f failures=%zu\n", r.family.c_str(), static_cast<long long>(r.n),
                r.mean, r.std_error, r.failures);
    ok = ok && r.failures * 20 <= r.N;
  }
  return ok ? kExitOk : kExitBudget;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
  Index n = 20, r = 1, s = 4, m = 80;
  std::string regularizer = "max(l1=auto, nuc=auto)";
  std::string field = "complex";
};

template <class Scalar>
json recover_once(const Globals& g, const RecoverArgs& a) {
  const auto spec = parse_regularizer_spec(a.regularizer);
  const auto x0 = sample_sparse_lowrank<Scalar>({a.n, a.n, a.r, a.s, a.s, parse_field(a.field)}, signal_seed(g.seed, a.s, 0));
  const GaussianMeasurementMap<Scalar> A(a.m, x0.shape(), map_seed(g.seed, a.s, 0));
  const auto reg = spec.resolve(x0.shape(), &x0);
  const auto res = solve_recovery(A, A.apply(x0), reg);
  const double err = relative_error(res.x, x0, SuccessDenominator::Recon);
  return {{"regularizer", reg.describe()},
          {"status", to_string(res.report.status)},
          {"iterations", res.report.iterations},
          {"polished", res.polished},
          {"rel_err", err},
          {"success", err <= 1e-5}};
}

int run_recover(const Globals& g, const RecoverArgs& a) {
  if (!g.config.empty()) throw ConfigError("recover takes its parameters from flags, not --config");
  const Timer timer;
  const auto started = utc_timestamp();
  const json result = parse_field(a.field) == Field::Real ? recover_once<double>(g, a)
                                                           : recover_once<std::complex<double>>(g, a);
  write_text(fs::path(g.out) / "recover.json", result.dump(2) + "\n");
  json jc = {{"n", a.n}, {"r", a.r}, {"s", a.s}, {"m", a.m}, {"regularizer", a.regularizer}, {"field", a.field}};
  write_manifest(g, "recover", jc, SolverOptions::recovery_defaults(), timer, started);
  say(result.dump(2));
  return result.at("status") == "numerical-failure" ? kExitBudget : kExitOk;
}

// ---------------------------------------------------------------- phase / greedy

struct PhaseArgs {
  bool paper_scale = false;
  std::optional<std::string> denominator;
  bool swap_init = false;
  std::optional<int> trials;
  std::optional<std::string> regularizer;
  std::optional<std::string> field;
  std::vector<Index> m_values, s_values;
};

PhaseGridConfig phase_config(const Globals& g, const PhaseArgs& a, bool greedy) {
  PhaseGridConfig c;
  if (!g.config.empty()) {
    c = load_config_or_manifest(g.config);
  } else {
    // Desk-scale grid; --paper-scale restores n = 30 with 20 runs per bin.
    c.n = a.paper_scale ? 30 : 20;
    c.trials = a.paper_scale ? 20 : 10;
    c.s_values = a.paper_scale ? range(1, 15, 1) : std::vector<Index>{2, 4, 6, 8, 10};
    c.m_values = a.paper_scale ? range(10, 400, 10) : range(20, 240, 20);
    c.seed = g.seed;
    if (greedy) {
      c.method = "greedy";
      c.regularizer = "sum(l1=auto, nuc=auto)";
    }
  }
  if (g.seed_given) c.seed = g.seed;
  if (a.denominator) c.denominator = parse_success_denominator(*a.denominator);
  if (a.swap_init) c.swap_greedy_init = true;
  if (a.trials) c.trials = *a.trials;
  if (a.regularizer) c.regularizer = *a.regularizer;
  if (a.field) c.field = parse_field(*a.field);
  if (!a.m_values.empty()) c.m_values = a.m_values;
  if (!a.s_values.empty()) c.s_values = a.s_values;
  if (greedy && c.method != "greedy") throw ConfigError("the greedy command needs method \"greedy\" in its config");
  c.validate();
  return c;
}

int run_phase(const Globals& g, const PhaseArgs& a, bool greedy) {
  const Timer timer;
  const auto started = utc_timestamp();
  const auto cfg = phase_config(g, a, greedy);
  const std::string name = greedy ? "greedy" : "phase";
  const auto result = run_phase_transition(cfg, g.threads);
  emit_csv(phase_table(result.bins), fs::path(g.out) / (name + ".csv"));
  write_text(fs::path(g.out) / (name + ".svg"), phase_svg(result.bins));
  json jc = cfg;
  write_manifest(g, name, jc, cfg.solver, timer, started);
  for (Index s : cfg.s_values) {
    try {
      const auto fit = fit_phase_bins(result.bins, s);
      std::printf("s=%-3lld 50%% success at m = %.1f\n", static_cast<long long>(s), fit.midpoint());
    } catch (const Error&) {
    }
  }
  std::printf("solver failures: %d\n", result.failures);
  if (cfg.failure_budget >= 0 && result.failures > cfg.failure_budget) {
    std::fprintf(stderr, "solver-failure budget exceeded: %d > %d\n", result.failures, cfg.failure_budget);
    return kExitBudget;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  Index n1 = 30, n2 = 30, r = 1, s1 = 5, s2 = 5;
  std::optional<double> m;
  bool sample = false;
};

int run_bounds(const Globals& g, const BoundsArgs& a) {
  if (!g.config.empty()) throw ConfigError("bounds takes its parameters from flags, not --config");
  json out;
  const double kappa = sparse_lowrank_kappa(a.n1, a.n2, a.r, a.s1, a.s2);
  out["sparse_lowrank_kappa"] = kappa;
  if (a.m) {
    try {
      out["success_prob_upper"] = success_prob_upper(*a.m, kappa);
    } catch (const BoundNotApplicable& e) {
      out["success_prob_upper"] = nullptr;
      out["note"] = e.what();
    }
  }
  if (a.sample) {
    const auto x0 = sample_sparse_lowrank<double>({a.n1, a.n2, a.r, a.s1, a.s2, Field::Real}, g.seed);
    const auto rep = bound_report(x0, {NormAtom::l1(x0.shape()), NormAtom::nuclear(x0.shape())});
    out["sample"] = {{"atoms", rep.atoms},   {"lipschitz", rep.lipschitz}, {"f_ranks", rep.f_ranks},
                     {"kappas", rep.kappas}, {"kappa", rep.kappa},         {"cos_theta", rep.cos_theta}};
  }
  write_text(fs::path(g.out) / "bounds.json", out.dump(2) + "\n");
  say(out.dump(2));
  return kExitOk;
}

// ---------------------------------------------------------------- rip

struct RipArgs {
  Index n = 20, r = 1, s = 4;
  std::vector<Index> m_values = {40, 80, 160, 320};
  int maps = 10;
  std::size_t samples = 200;
  std::string field = "real";
};

int run_rip(const Globals& g, const RipArgs& a) {
  if (!g.config.empty()) throw ConfigError("rip takes its parameters from flags, not --config");
  const Timer timer;
  const auto started = utc_timestamp();
  const Field field = parse_field(a.field);
  const SparseLowRankModel model{a.n, a.n, a.r, a.s, a.s, field};
  const auto rows = field == Field::Real
                        ? run_rip_study<double>(model, a.m_values, a.maps, a.samples, g.seed, g.threads)
                        : run_rip_study<std::complex<double>>(model, a.m_values, a.maps, a.samples, g.seed, g.threads);
  emit_csv(rip_table(rows), fs::path(g.out) / "rip.csv");
  json jc = {{"n", a.n}, {"r", a.r}, {"s", a.s}, {"m_values", a.m_values}, {"maps", a.maps},
             {"samples", a.samples}, {"field", a.field}};
  write_manifest(g, "rip", jc, json::object(), timer, started);
  for (const auto& r : rows)
    std::printf("m=%-4lld median=%.4f max=%.4f\n", static_cast<long long>(r.m), r.median_dev, r.max_dev);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simstruct: simultaneously structured signal recovery experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Base seed of all random streams")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON phase-grid config or run manifest");

  StatDimArgs sd;
  auto* c_statdim = app.add_subcommand("statdim", "Monte-Carlo statistical dimension sweep");
  c_statdim->add_option("--signal", sd.cfg.signal, "sparse_lowrank or rank1_tensor")->capture_default_str();
  c_statdim->add_option("--families", sd.cfg.families, "max, sum, l1, nuc, hosvd, tt, b2, b3, square_deal, or a spec")
      ->delimiter(';');
  c_statdim->add_option("--n", sd.n_values, "Side lengths");
  c_statdim->add_option("--s", sd.cfg.s, "Row/column sparsity")->capture_default_str();
  c_statdim->add_option("--r", sd.cfg.r, "Rank")->capture_default_str();
  c_statdim->add_option("--order", sd.cfg.order, "Tensor order")->capture_default_str();
  c_statdim->add_option("--N", sd.cfg.N, "Gaussian samples per point")->capture_default_str();

  RecoverArgs rc;
  auto* c_recover = app.add_subcommand("recover", "Recover one sparse and low-rank matrix");
  c_recover->add_option("--n", rc.n)->capture_default_str();
  c_recover->add_option("--r", rc.r)->capture_default_str();
  c_recover->add_option("--s", rc.s)->capture_default_str();
  c_recover->add_option("--m", rc.m, "Number of measurements")->capture_default_str();
  c_recover->add_option("--regularizer", rc.regularizer)->capture_default_str();
  c_recover->add_option("--field", rc.field, "real or complex")->capture_default_str();

  PhaseArgs ph;
  auto add_phase_flags = [](CLI::App* c, PhaseArgs& a) {
    c->add_flag("--paper-scale", a.paper_scale, "n = 30 with 20 runs per bin");
    c->add_option("--success-denominator", a.denominator, "recon (default) or signal");
    c->add_flag("--swap-greedy-init", a.swap_init, "Swap the initial greedy weights");
    c->add_option("--trials", a.trials, "Trials per bin");
    c->add_option("--regularizer", a.regularizer);
    c->add_option("--field", a.field, "real or complex");
    c->add_option("--m", a.m_values, "Measurement counts");
    c->add_option("--s", a.s_values, "Sparsity values");
  };
  auto* c_phase = app.add_subcommand("phase", "Phase-transition grid over (m, s)");
  add_phase_flags(c_phase, ph);
  PhaseArgs gr;
  auto* c_greedy = app.add_subcommand("greedy", "Phase grid with iteratively reweighted Sum recovery");
  add_phase_flags(c_greedy, gr);

  BoundsArgs bd;
  auto* c_bounds = app.add_subcommand("bounds", "Lower bounds on the number of measurements");
  c_bounds->add_option("--n1", bd.n1)->capture_default_str();
  c_bounds->add_option("--n2", bd.n2)->capture_default_str();
  c_bounds->add_option("--r", bd.r)->capture_default_str();
  c_bounds->add_option("--s1", bd.s1)->capture_default_str();
  c_bounds->add_option("--s2", bd.s2)->capture_default_str();
  c_bounds->add_option("--m", bd.m, "Evaluate the success-probability bound at m");
  c_bounds->add_flag("--sample", bd.sample, "Also report the bound for one sampled signal");

  RipArgs rp;
  auto* c_rip = app.add_subcommand("rip", "Empirical restricted isometry deviation");
  c_rip->add_option("--n", rp.n)->capture_default_str();
  c_rip->add_option("--r", rp.r)->capture_default_str();
  c_rip->add_option("--s", rp.s)->capture_default_str();
  c_rip->add_option("--m", rp.m_values);
  c_rip->add_option("--maps", rp.maps)->capture_default_str();
  c_rip->add_option("--samples", rp.samples)->capture_default_str();
  c_rip->add_option("--field", rp.field)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? kExitOk : kExitConfig;
  }

  g.seed_given = app.count("--seed") > 0;
  try {
    fs::create_directories(g.out);
    if (*c_statdim) return run_statdim(g, sd);
    if (*c_recover) return run_recover(g, rc);
    if (*c_phase) return run_phase(g, ph, false);
    if (*c_greedy) return run_phase(g, gr, true);
    if (*c_bounds) return run_bounds(g, bd);
    if (*c_rip) return run_rip(g, rp);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidModel& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidBipartition& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
