#pragma once

#include <optional>
#include <string>
#include <vector>

#include "narz/flux.hpp"
#include "narz/kernel.hpp"
#include "narz/state.hpp"

namespace narz {

/// The four model variants. The first-order ones freeze the velocity offset
/// at zero; the local ones force the slowdown factor to one.
enum class ModelVariant { LWR, FirstOrderNonlocal, LocalARZ, NonlocalARZ };

bool variant_uses_psi(ModelVariant v);
bool variant_uses_nonlocal(ModelVariant v);
const char* variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

struct SolverConfig {
  double cfl = 0.4;        ///< must be <= 0.9
  double t_end = 1.0;
  int spatial_order = 2;   ///< 1 or 2 (minmod-limited reconstruction)
  double d_max = 1e3;      ///< density-gradient cap for shock detection
  int snapshot_every = 0;  ///< steps between stored snapshots; 0 = ends only
  bool limiter = true;     ///< false: unlimited central slopes (order 2 only)
  bool trace_support = false;  ///< keep per-step frames for characteristic tracing
  int frame_every = 1;         ///< steps between stored trace frames
};

enum class RunOutcome { Completed, GradientBlowup, InvariantBreach, TruncatedSupport };
const char* outcome_name(RunOutcome o);

/// Per-step diagnostics recorded by run().
struct StepMonitors {
  double t = 0.0;
  double mass = 0.0;
  double rho_min = 0.0, rho_max = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double min_dpsi_dx = 0.0;
  double max_abs_drho_dx = 0.0;
  double sup_F = 0.0;        ///< sup of dpsi/dx / rho over cells with rho > 0.05
  double ux_lower_margin = 0.0;  ///< min(du/dx) - lower bound; >= -tol expected
};

struct RunReport {
  RunOutcome outcome = RunOutcome::Completed;
  double t_final = 0.0;
  double t_detect = 0.0;  ///< detection time for gradient blowup
  double max_drho_dx_over_time = 0.0;
  double criterion_integral = 0.0;  ///< time integral of the sup density gradient
  double mass_drift_rel = 0.0;
  double min_dpsi_dx_over_time = 0.0;
  double max_sup_F_over_time = 0.0;
  int invariant_breaches = 0;  ///< steps with a 1x tolerance breach
  std::string note;
  std::vector<StepMonitors> monitors;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> rho, u, psi, rho_tilde, d_rho_dx;
};

/// Slim per-step frame kept when trace support is requested.
struct TraceFrame {
  double t = 0.0;
  std::vector<double> rho, u, slowdown, psi;
};

struct RunResult {
  RunReport report;
  std::vector<Snapshot> snapshots;
  std::optional<Snapshot> pre_blowup;
  std::vector<TraceFrame> frames;
  TrafficState final_state;
};

/// Largest stable time step: cfl * dx over the fastest of the transport speed
/// and the density characteristic speed.
double stable_dt(const TrafficState& state, ModelVariant variant, const FluxModel& model,
                 const SolverConfig& config);

/// One strong-stability-preserving RK3 step of the semi-discretization:
/// conservative local Lax-Friedrichs update for the density, upwind transport
/// for the offset; the look-ahead fields are recomputed after every stage.
TrafficState step(const TrafficState& state, ModelVariant variant, const Kernel& kernel,
                  const FluxModel& model, double dt, const SolverConfig& config);

/// Advance to t_end with monitors; stops early on gradient blowup past d_max,
/// an invariant breach beyond 10x tolerance, or loss of compact support.
RunResult run(const TrafficState& initial, ModelVariant variant, const Kernel& kernel,
              const FluxModel& model, const SolverConfig& config);

/// Build a snapshot (with central-difference density gradient) from a state.
Snapshot make_snapshot(const TrafficState& state);

}  // namespace narz
