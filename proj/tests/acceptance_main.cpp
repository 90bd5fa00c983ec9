// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Each criterion pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "narz/experiment.hpp"
#include "narz/phase_plane.hpp"
#include "narz/presets.hpp"
#include "narz/simd.hpp"
#include "narz/solver.hpp"
#include "narz/state.hpp"
#include "narz/thresholds.hpp"

using namespace narz;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
    ++index;
    std::string detail;
    bool pass = false;
    auto start = std::chrono::steady_clock::now();
    try {
      pass = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", index,
                name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

struct Executed {
  RunResult result;
  ValidationSummary validation;
};

Executed execute(const ExperimentConfig& cfg) {
  FluxModel flux = cfg.make_flux();
  Kernel kernel = cfg.make_kernel();
  Grid grid = cfg.scaled_grid();
  auto [rho0, u0] = build_preset(cfg.preset, cfg.preset_params, flux, kernel, cfg.variant, grid);
  Kernel sk = variant_uses_nonlocal(cfg.variant) ? kernel : Kernel::zero();
  TrafficState st = build_initial_state(rho0, u0, flux, sk, grid);
  AssumptionReport rep = compute_F0_G0(st);
  Executed out{run(st, cfg.variant, kernel, flux, cfg.solver),
               validate_assumptions(st, rep, flux)};
  return out;
}

bool check_from_summary(const ExperimentResult& r, const std::string& name, std::string& out) {
  for (const auto& c : r.checks) {
    if (c.name == name) {
      out += c.details;
      return c.pass;
    }
  }
  out += "check " + name + " missing";
  return false;
}

}  // namespace

int main() {
  Harness h;
  std::printf("simd backend: %s\n", simd::backend_name(simd::active_backend()));

  h.criterion("first-order threshold curve matches the closed form (J = 1, 2, 3)",
              [](std::string& detail) {
                double worst = 0.0;
                for (double J : {1.0, 2.0, 3.0}) {
                  FluxModel m = FluxModel::pipes(J);
                  ThresholdCurve c = solve_threshold_ode(ThresholdCurve::Kind::Sigma, m, 0.0);
                  for (int i = 0; i <= 2000; ++i) {
                    double r = m.rho_c() * i / 2000.0;
                    worst = std::max(worst, std::fabs(c.eval(r) - r * (1 - r) / J));
                  }
                }
                detail = "max error " + std::to_string(worst);
                return worst <= 1e-6;
              });

  h.criterion("second-order curve with zero constant collapses to first-order",
              [](std::string& detail) {
                double worst = 0.0;
                for (double J : {1.0, 2.0}) {
                  FluxModel m = FluxModel::pipes(J);
                  ThresholdCurve c = solve_threshold_ode(ThresholdCurve::Kind::Eta, m, 0.0);
                  for (int i = 0; i <= 2000; ++i) {
                    double r = m.rho_c() * i / 2000.0;
                    worst = std::max(worst, std::fabs(c.eval(r) - r * (1 - r) / J));
                  }
                }
                detail = "max error " + std::to_string(worst);
                return worst <= 1e-6;
              });

  h.criterion("second-order curves stay below first-order; the fixture dives",
              [](std::string& detail) {
                FluxModel m = FluxModel::pipes(2.0);
                ThresholdCurve sigma = sigma_closed_form(m);
                bool below = true;
                for (double C : {0.0, 0.1, 1.0}) {
                  ThresholdCurve eta = solve_threshold_ode(ThresholdCurve::Kind::Eta, m, C);
                  for (std::size_t i = 0; i < eta.rho.size(); ++i)
                    below = below && eta.value[i] <= sigma.eval(eta.rho[i]) + 1e-9;
                }
                ThresholdCurve fix = solve_threshold_ode(ThresholdCurve::Kind::Eta, m, 2.0);
                bool dives = fix.rho_star.has_value() && *fix.rho_star < m.rho_c();
                if (fix.rho_star) detail = "dive at rho = " + std::to_string(*fix.rho_star);
                return below && dives;
              });

  h.criterion("look-ahead derivative identity at N = 4000, halving at order 2",
              [](std::string& detail) {
                // Differentiate the computed look-ahead mass with a 4th-order
                // stencil so the measurement isolates the quadrature error of
                // the field itself (a 2nd-order stencil would add its own
                // h^2/6 truncation on top and land at 1.25e-5 here).
                auto err_at = [](int n) {
                  Grid g(-10.0, 10.0, n);
                  std::vector<double> rho(g.n);
                  for (int i = 0; i < g.n; ++i) {
                    double v = std::exp(-g.x(i) * g.x(i));
                    rho[i] = v < 1e-13 ? 0.0 : v;
                  }
                  auto f = compute_rho_tilde(rho, Kernel::uniform(), g);
                  const auto& rt = f.rho_tilde;
                  double worst = 0.0;
                  for (int i = 2; i + 2 < g.n; ++i) {
                    double dc = (-rt[i + 2] + 8.0 * rt[i + 1] - 8.0 * rt[i - 1] + rt[i - 2]) /
                                (12.0 * g.dx());
                    worst = std::max(worst, std::fabs(dc + rho[i]));
                  }
                  return worst;
                };
                double e1 = err_at(4000);
                double e2 = err_at(8000);
                detail = "error " + std::to_string(e1) + ", refinement ratio " +
                         std::to_string(e1 / e2);
                return e1 <= 1e-5 && e1 / e2 >= 2.0;
              });

  h.criterion("field bounds and mass for 5 presets x 4 variants over t = 10",
              [](std::string& detail) {
                const char* presets[] = {"gaussian-bump", "smoothed-plateau", "riemann-smoothed",
                                         "exp-rise-bump", "double-bump"};
                const ModelVariant variants[] = {ModelVariant::LWR,
                                                 ModelVariant::FirstOrderNonlocal,
                                                 ModelVariant::LocalARZ,
                                                 ModelVariant::NonlocalARZ};
                int bad = 0;
                for (const char* p : presets) {
                  for (ModelVariant v : variants) {
                    ExperimentConfig cfg = builtin_config(
                        std::string("max-principles-") + p + "-" + variant_name(v));
                    FluxModel flux = cfg.make_flux();
                    Executed ex = execute(cfg);
                    const RunReport& rep = ex.result.report;
                    bool ok = ex.validation.all_pass() &&
                              rep.outcome == RunOutcome::Completed &&
                              rep.mass_drift_rel <= 1e-8 &&
                              rep.min_dpsi_dx_over_time >= -1e-3;
                    for (const auto& m : rep.monitors)
                      ok = ok && m.rho_min >= -1e-6 && m.rho_max <= flux.rho_M() + 1e-3 &&
                           m.u_min >= -1e-3 && m.u_max <= 1.0 + 1e-3;
                    if (!ok) {
                      ++bad;
                      detail += std::string(p) + "/" + variant_name(v) + " ";
                    }
                  }
                }
                if (bad == 0) detail = "20/20 runs clean";
                return bad == 0;
              });

  ExperimentResult blowup_res;
  h.criterion("local second-order model shocks by the predicted time",
              [&](std::string& detail) {
                ExperimentConfig cfg = builtin_config("blowup-local");
                cfg.out_dir = "acceptance_out/blowup-local";
                blowup_res = run_experiment(cfg);
                bool ok = blowup_res.ok;
                double t_detect = blowup_res.summary["run"].value("t_detect", 1e9);
                ok = ok && t_detect <= 2.5;
                detail = "t_detect = " + std::to_string(t_detect);
                for (const auto& c : blowup_res.checks)
                  if (!c.pass) detail += " | " + c.name + ": " + c.details;
                return ok;
              });

  h.criterion("nonlocal model with subcritical data stays smooth to t = 50",
              [](std::string& detail) {
                ExperimentConfig cfg = builtin_config("global-nonlocal");
                cfg.out_dir = "acceptance_out/global-nonlocal";
                ExperimentResult r = run_experiment(cfg);
                std::string d;
                bool ok = check_from_summary(r, "outcome-completed", d) &&
                          check_from_summary(r, "subcritical-data", d) &&
                          check_from_summary(r, "gradient-bounded", d) &&
                          check_from_summary(r, "decay-envelope", d);
                detail = d;
                return ok;
              });

  ExperimentResult cmp_res;
  h.criterion("phase-plane samples stay below the threshold curve on 8 seeds",
              [&](std::string& detail) {
                ExperimentConfig cfg = builtin_config("comparison-seeds");
                cfg.out_dir = "acceptance_out/comparison-seeds";
                cmp_res = run_experiment(cfg);
                return check_from_summary(cmp_res, "comparison-principle", detail);
              });

  h.criterion("variant degenerations agree to 1e-12 over 100 steps",
              [](std::string& detail) {
                ExperimentConfig cfg = builtin_config("consistency");
                cfg.out_dir = "acceptance_out/consistency";
                ExperimentResult r = run_experiment(cfg);
                for (const auto& c : r.checks) detail += c.details + " | ";
                return r.ok;
              });

  h.criterion("mediant bound holds on 10^4 random instances", [](std::string& detail) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> num(-100.0, 100.0);
    std::uniform_real_distribution<double> den(1e-6, 100.0);
    int fails = 0;
    for (int i = 0; i < 10000; ++i) {
      double a0 = num(rng), a1 = num(rng), b0 = den(rng), b1 = den(rng);
      if (!(mediant_lower_bound(a0, a1, b0, b1) <= (a0 + a1) / (b0 + b1))) ++fails;
    }
    detail = std::to_string(fails) + " failures";
    return fails == 0;
  });

  h.criterion("offset-slope sup norm is transported, not amplified",
              [&](std::string& detail) {
                return check_from_summary(cmp_res, "offset-slope-transport", detail);
              });

  std::printf("%d of %d criteria failed\n", h.failures, h.index);
  return h.failures;
}
