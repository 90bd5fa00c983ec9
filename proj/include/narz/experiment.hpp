#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "narz/flux.hpp"
#include "narz/grid.hpp"
#include "narz/kernel.hpp"
#include "narz/solver.hpp"

namespace narz {

/// Config-driven experiment description. Loadable from TOML (subset) or the
/// equivalent JSON; builtin named configs cover the standard study set.
struct ExperimentConfig {
  std::string kind = "custom";  ///< blowup-local | global-nonlocal | threshold-figure |
                                ///< consistency | custom
  std::string name = "experiment";
  std::string out_dir = "out";
  long long seed = 0;
  double resolution_scale = 1.0;

  ModelVariant variant = ModelVariant::NonlocalARZ;

  double J = 1.0;
  std::optional<double> rho_M;

  std::string kernel_kind = "uniform";  ///< uniform | truncated-exponential | zero
  double kernel_eps = 1.0;

  Grid grid{-10.0, 10.0, 2000};

  std::string preset = "gaussian-bump";
  nlohmann::json preset_params = nlohmann::json::object();
  std::string initial_csv;  ///< alternative to preset

  SolverConfig solver;

  std::vector<double> trace_seeds;
  double comparison_tol = 1e-2;

  std::vector<double> c_etas;  ///< threshold-figure: curves to build
  bool expect_rho_star = false;
  int consistency_steps = 100;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  FluxModel make_flux() const;
  Kernel make_kernel() const;
  Grid scaled_grid() const;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string details;
};

struct ExperimentResult {
  bool ok = false;
  std::vector<CheckResult> checks;
  nlohmann::json summary;
  std::filesystem::path out_dir;
};

/// Load a config from a .toml or .json file.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Frozen experiment definitions ("blowup-local", "global-nonlocal",
/// "comparison-seeds", "threshold-figure", "consistency", and the
/// "max-principles-<preset>-<variant>" family).
std::vector<std::string> builtin_config_names();
ExperimentConfig builtin_config(const std::string& name);

/// Execute the pipeline (init, validate, thresholds, solve, trace, verify)
/// and write artifacts under cfg.out_dir. Module errors surface as exceptions.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Fan configs out over a worker pool (capped by NONLOCAL_ARZ_THREADS).
std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentConfig>& cfgs);

/// Time by which a velocity drop of the given (negative) slope must steepen
/// into a shock in the local second-order model: 1/|u0_prime_min|.
double blowup_time_bound(double u0_prime_min);

}  // namespace narz
