#include "narz/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "narz/errors.hpp"
#include "narz/nonlocal.hpp"
#include "narz/state.hpp"

namespace narz {

namespace {

double get(const nlohmann::json& p, const char* key, double fallback) {
  if (p.contains(key)) return p.at(key).get<double>();
  return fallback;
}

std::vector<double> shape_on_grid(const std::function<double(double)>& f, const Grid& grid) {
  std::vector<double> rho(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double v = f(grid.x(i));
    rho[i] = v < 1e-12 ? 0.0 : v;  // exact vacuum outside the support
  }
  return rho;
}

double logistic(double y) { return 1.0 / (1.0 + std::exp(-y)); }

// Cosine taper rising from exactly 0 at x = a - e to exactly 1 at x = a.
double ramp_up(double x, double a, double e) {
  if (x <= a - e) return 0.0;
  if (x >= a) return 1.0;
  return 0.5 * (1.0 + std::cos(M_PI * (a - x) / e));
}

double ramp_down(double x, double b, double e) { return ramp_up(-x, -b, e); }

std::function<double(double)> make_shape(const std::string& name, const nlohmann::json& p) {
  if (name == "gaussian-bump" || name == "blowup-bump") {
    double A = get(p, "amplitude", 0.25);
    double x0 = get(p, "center", 0.0);
    double s = get(p, "width", 2.0);
    return [A, x0, s](double x) { return A * std::exp(-((x - x0) / s) * ((x - x0) / s)); };
  }
  if (name == "smoothed-plateau") {
    double A = get(p, "height", 0.4);
    double a = get(p, "left", -4.0);
    double b = get(p, "right", 4.0);
    double e = get(p, "edge", 1.5);
    return [A, a, b, e](double x) { return A * ramp_up(x, a, e) * ramp_down(x, b, e); };
  }
  if (name == "riemann-smoothed") {
    double rl = get(p, "rho_left", 0.4);
    double rr = get(p, "rho_right", 0.1);
    double xs = get(p, "step_pos", 0.0);
    double ws = get(p, "step_width", 1.0);
    double a = get(p, "left", -8.0);
    double b = get(p, "right", 8.0);
    double e = get(p, "edge", 1.5);
    return [=](double x) {
      double step = rr + (rl - rr) * 0.5 * (1.0 - std::tanh((x - xs) / ws));
      return step * ramp_up(x, a, e) * ramp_down(x, b, e);
    };
  }
  if (name == "exp-rise-bump") {
    double A = get(p, "amplitude", 0.35);
    double c = get(p, "rise_rate", 0.5);
    double r = get(p, "fall_rate", 1.0);
    double a = get(p, "rise_pos", -4.0);
    double b = get(p, "fall_pos", 4.0);
    return [=](double x) { return A * logistic(c * (x - a)) * logistic(r * (b - x)); };
  }
  if (name == "double-bump") {
    double A1 = get(p, "amplitude1", 0.3), x1 = get(p, "center1", -5.0),
           s1 = get(p, "width1", 2.0);
    double A2 = get(p, "amplitude2", 0.2), x2 = get(p, "center2", 5.0), s2 = get(p, "width2", 2.5);
    return [=](double x) {
      return A1 * std::exp(-((x - x1) / s1) * ((x - x1) / s1)) +
             A2 * std::exp(-((x - x2) / s2) * ((x - x2) / s2));
    };
  }
  throw InvalidParameter("unknown initial-data preset: " + name);
}

struct BuiltData {
  std::vector<double> rho0, u0;
  double min_u0_prime = 0.0;
};

BuiltData assemble(const std::vector<double>& rho0, double c0, double c1, const FluxModel& model,
                   const Kernel& kernel, ModelVariant variant, const Grid& grid) {
  const int n = grid.n;
  const double dx = grid.dx();

  // Upstream mass M and total mass m by cumulative trapezoid.
  std::vector<double> M(n, 0.0);
  for (int i = 1; i < n; ++i) M[i] = M[i - 1] + 0.5 * dx * (rho0[i - 1] + rho0[i]);
  const double m = M[n - 1];

  BuiltData out;
  out.rho0 = rho0;
  out.u0.resize(n);

  NonlocalFields nl;
  if (variant_uses_nonlocal(variant)) {
    nl = compute_rho_tilde(rho0, kernel, grid);
  } else {
    nl.slowdown.assign(n, 1.0);
  }

  const double K = -(c0 * m + 0.5 * c1 * m * m);
  const bool with_psi = variant_uses_psi(variant);
  for (int i = 0; i < n; ++i) {
    double psi = with_psi ? c0 * M[i] + 0.5 * c1 * M[i] * M[i] + K : 0.0;
    out.u0[i] = psi + model.U(rho0[i]) * nl.slowdown[i];
  }

  std::vector<double> du = central_diff(out.u0, dx);
  out.min_u0_prime = *std::min_element(du.begin(), du.end());
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"gaussian-bump", "smoothed-plateau", "riemann-smoothed",
          "exp-rise-bump", "double-bump",      "blowup-bump"};
}

std::pair<std::vector<double>, std::vector<double>> build_preset(
    const std::string& name, const nlohmann::json& params, const FluxModel& model,
    const Kernel& kernel, ModelVariant variant, const Grid& grid) {
  const double c0 = get(params, "psi_c0", 0.0);
  const double c1 = get(params, "psi_c1", 0.0);
  if (c0 < 0.0 || c1 < 0.0)
    throw InvalidParameter("preset: psi_c0 and psi_c1 must be nonnegative");

  if (name != "blowup-bump") {
    auto shape = make_shape(name, params);
    auto data = assemble(shape_on_grid(shape, grid), c0, c1, model, kernel, variant, grid);
    return {std::move(data.rho0), std::move(data.u0)};
  }

  // blowup-bump: solve for the gaussian amplitude that makes the steepest
  // velocity drop hit target_u0_prime (bisection; the drop grows with A).
  const double target = get(params, "target_u0_prime", -0.5);
  if (!(target < 0.0)) throw InvalidParameter("blowup-bump: target_u0_prime must be negative");
  nlohmann::json p = params;
  auto min_up_for = [&](double A) {
    p["amplitude"] = A;
    auto shape = make_shape("blowup-bump", p);
    return assemble(shape_on_grid(shape, grid), c0, c1, model, kernel, variant, grid)
        .min_u0_prime;
  };
  double lo = 0.01, hi = 0.85;
  if (min_up_for(hi) > target)
    throw InvalidParameter("blowup-bump: target slope not reachable with amplitude <= 0.85");
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (min_up_for(mid) > target ? lo : hi) = mid;
  }
  p["amplitude"] = 0.5 * (lo + hi);
  auto shape = make_shape("blowup-bump", p);
  auto data = assemble(shape_on_grid(shape, grid), c0, c1, model, kernel, variant, grid);
  return {std::move(data.rho0), std::move(data.u0)};
}

}  // namespace narz
