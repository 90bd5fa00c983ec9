#include "narz/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "narz/errors.hpp"
#include "narz/ode.hpp"

namespace narz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shape-preserving cubic tangents (weighted harmonic means of the secants).
std::vector<double> pchip_tangents(const std::vector<double>& x, const std::vector<double>& v) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    del[i] = (v[i + 1] - v[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = del[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (del[i - 1] * del[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return s;
  };
  d[0] = end_slope(h[0], h[1], del[0], del[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& v,
                  const std::vector<double>& d, double q) {
  const std::size_t n = x.size();
  if (q <= x.front()) return v.front() + d.front() * (q - x.front());
  if (q >= x.back()) return v.back() + d.back() * (q - x.back());
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    (x[mid] <= q ? lo : hi) = mid;
  }
  const double h = x[hi] - x[lo];
  const double s = (q - x[lo]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * v[lo] + (s3 - 2 * s2 + s) * h * d[lo] +
         (-2 * s3 + 3 * s2) * v[hi] + (s3 - s2) * h * d[hi];
}

}  // namespace

void ThresholdCurve::finalize() {
  if (tangent.size() != rho.size()) {
    tangent = pchip_tangents(rho, value);
    if (!tangent.empty()) tangent[0] = slope_at_zero;
    return;
  }
  // Builders supplied exact tangents; clamp them to the shape-preserving
  // range so the interpolant cannot overshoot between samples.
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double dl = i > 0 ? (value[i] - value[i - 1]) / (rho[i] - rho[i - 1]) : 0.0;
    double dr = i + 1 < rho.size() ? (value[i + 1] - value[i]) / (rho[i + 1] - rho[i]) : 0.0;
    if (i == 0) dl = dr;
    if (i + 1 == rho.size()) dr = dl;
    if (dl * dr <= 0.0) continue;  // extremum between samples: keep the exact slope
    double lim = 3.0 * std::min(std::fabs(dl), std::fabs(dr));
    if (tangent[i] * dl < 0.0)
      tangent[i] = 0.0;
    else if (std::fabs(tangent[i]) > lim)
      tangent[i] = std::copysign(lim, tangent[i]);
  }
}

double ThresholdCurve::eval(double rho_query) const {
  if (rho_star && rho_query >= *rho_star) return -kInf;
  return pchip_eval(rho, value, tangent, rho_query);
}

ThresholdCurve sigma_closed_form(const FluxModel& model) {
  if (!model.is_pipes())
    throw UnsupportedModel("sigma_closed_form: only the (1-rho)^J family has a closed form");
  const double J = model.J();
  ThresholdCurve c;
  c.kind = ThresholdCurve::Kind::Sigma;
  c.rho_c = model.rho_c();
  c.slope_at_zero = 1.0 / J;
  const int n = 2048;
  c.rho.resize(n);
  c.value.resize(n);
  c.tangent.resize(n);
  c.branch.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double r = c.rho_c * i / (n - 1);
    c.rho[i] = r;
    c.value[i] = r * (1.0 - r) / J;
    c.tangent[i] = (1.0 - 2.0 * r) / J;
  }
  c.finalize();
  return c;
}

double sigma_rhs(const FluxModel& model, double rho, double s) {
  if (!(rho > 0.0)) throw InvalidParameter("sigma_rhs: rho must be positive (Taylor start)");
  const double f = model.f(rho);
  if (!(f > 0.0)) throw InvalidParameter("sigma_rhs: f(rho) must be positive");
  const double fp = model.fprime(rho);
  const double fpp = model.fsecond(rho);
  return (fpp * s * s + (2.0 * rho * fp + f) * s + rho * rho * f) / (rho * f);
}

double eta_rhs(const FluxModel& model, double rho, double y, double C_eta) {
  if (!(rho > 0.0)) throw InvalidParameter("eta_rhs: rho must be positive (Taylor start)");
  const double f = model.f(rho);
  if (!(f > 0.0)) throw InvalidParameter("eta_rhs: f(rho) must be positive");
  const double quad = sigma_rhs(model, rho, y) - C_eta * rho * rho / f;
  return std::min(quad, 3.0 * y / rho);
}

ThresholdCurve solve_threshold_ode(ThresholdCurve::Kind kind, const FluxModel& model,
                                   double C_eta, const ThresholdOpts& opts) {
  if (kind == ThresholdCurve::Kind::Sigma && C_eta != 0.0)
    throw InvalidParameter("solve_threshold_ode: sigma takes C_eta = 0");
  if (!(C_eta >= 0.0)) throw InvalidParameter("solve_threshold_ode: C_eta must be >= 0");

  const double fp0 = model.fprime(0.0);
  const double fpp0 = model.fsecond(0.0);
  if (!(fpp0 < 0.0) || !(fp0 > 0.0))
    throw InvalidParameter("solve_threshold_ode: flux must satisfy f'(0) > 0, f''(0) < 0");
  const double slope0 = -2.0 * fp0 / fpp0;
  const double rho_end = model.rho_c();

  ode::Options oopts;
  oopts.rtol = opts.rtol;
  oopts.atol = 1e-14;
  oopts.h_min = 1e-15;
  const double cap = opts.cap;
  oopts.stop_event = [cap](double, std::span<const double> y) { return y[0] < -cap; };

  auto rhs = [&](double r, std::span<const double> y, std::span<double> dy) {
    dy[0] = (kind == ThresholdCurve::Kind::Sigma) ? sigma_rhs(model, r, y[0])
                                                  : eta_rhs(model, r, y[0], C_eta);
  };

  // For a concave flux the right endpoint has f(rho_c) = 0; stop a hair short
  // and let the dense tabulation carry the last sample (the curve itself is
  // smooth through the endpoint).
  const double rho_stop = rho_end * (1.0 - 1e-9);
  const double y_start = slope0 * opts.delta0;
  ode::Solution sol = ode::integrate(rhs, opts.delta0, rho_stop, std::span(&y_start, 1), oopts);

  ThresholdCurve c;
  c.kind = kind;
  c.C_eta = C_eta;
  c.rho_c = rho_end;
  c.slope_at_zero = slope0;
  if (sol.event_hit) c.rho_star = sol.event_t;

  auto slope_of = [&](double r, double v) {
    if (r < opts.delta0) return slope0;
    r = std::min(r, rho_stop);  // f vanishes at rho_c for a concave flux
    return (kind == ThresholdCurve::Kind::Sigma) ? sigma_rhs(model, r, v)
                                                 : eta_rhs(model, r, v, C_eta);
  };

  const double rho_last = sol.event_hit ? sol.event_t : rho_end;
  const int n = opts.samples;
  for (int i = 0; i < n; ++i) {
    double r = rho_end * i / (n - 1);
    if (r > rho_last) break;
    double v;
    if (r <= 0.0)
      v = 0.0;
    else if (r < opts.delta0)
      v = slope0 * r;
    else
      v = sol.eval1(std::min(r, rho_stop));
    c.rho.push_back(r);
    c.value.push_back(v);
    c.tangent.push_back(slope_of(r, v));
  }
  if (sol.event_hit) {
    c.rho.push_back(sol.event_t);
    c.value.push_back(-cap);
    c.tangent.push_back(slope_of(sol.event_t, -cap));
  }

  c.branch.assign(c.rho.size(), 0);
  if (kind == ThresholdCurve::Kind::Eta) {
    for (std::size_t i = 1; i < c.rho.size(); ++i) {
      double r = c.rho[i], y = c.value[i];
      double f = model.f(r);
      if (!(f > 0.0)) continue;
      double quad = sigma_rhs(model, r, y) - C_eta * r * r / f;
      c.branch[i] = (3.0 * y / r < quad) ? 1 : 0;
    }
  }
  c.finalize();

  if (opts.self_check) {
    ThresholdOpts halved = opts;
    halved.delta0 = opts.delta0 / 2.0;
    halved.self_check = false;
    ThresholdCurve fine = solve_threshold_ode(kind, model, C_eta, halved);
    double mid = rho_end / 2.0;
    if (!c.rho_star || mid < *c.rho_star) {
      double a = c.eval(mid), b = fine.eval(mid);
      if (std::fabs(a - b) >= 1e-7)
        throw InvariantBreach("threshold solve: Taylor-start self-check failed");
    }
  }
  return c;
}

double eta_constant_from_data(const AssumptionReport& report, const Kernel& kernel) {
  if (!report.a5)
    throw UndefinedConstant("eta constant: offset growth diagnostics (a5) failed");
  return report.sup_G0 * std::exp(report.mass * kernel.w0);
}

Classification classify_initial_data(const TrafficState& state, const ThresholdCurve& curve,
                                     double slope_tol, double eps_vac) {
  const std::size_t n = state.rho.size();
  const std::vector<double> drho = central_diff(state.rho, state.grid.dx());

  Classification cls;
  cls.supercritical.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = state.rho[i];
    if (r < eps_vac) continue;  // vacuum cells carry no dynamics
    bool super = false;
    if (r > curve.rho_c + 1e-12)
      super = true;
    else if (curve.rho_star && r >= *curve.rho_star)
      super = true;  // curve is -infinity there; no slope passes
    else if (drho[i] > curve.eval(r) + slope_tol)
      super = true;
    if (super) {
      cls.supercritical[i] = 1;
      cls.all_subcritical = false;
      if (cls.first_supercritical < 0) cls.first_supercritical = static_cast<int>(i);
    }
  }
  return cls;
}

}  // namespace narz
