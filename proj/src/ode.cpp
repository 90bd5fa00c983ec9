#include "narz/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "narz/errors.hpp"

namespace narz::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

void hermite(const Knot& a, const Knot& b, double t, std::span<double> out) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * a.y[i] + h10 * h * a.f[i] + h01 * b.y[i] + h11 * h * b.f[i];
}

}  // namespace

void Solution::eval(double t, std::span<double> y) const {
  const bool fwd = knots.back().t >= knots.front().t;
  auto past = [fwd](double a, double b) { return fwd ? a >= b : a <= b; };

  if (past(knots.front().t, t)) {
    std::copy(knots.front().y.begin(), knots.front().y.end(), y.begin());
    return;
  }
  if (past(t, knots.back().t)) {
    std::copy(knots.back().y.begin(), knots.back().y.end(), y.begin());
    return;
  }
  std::size_t lo = 0, hi = knots.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (past(t, knots[mid].t))
      lo = mid;
    else
      hi = mid;
  }
  hermite(knots[lo], knots[hi], t, y);
}

double Solution::eval1(double t) const {
  double v;
  eval(t, std::span<double>(&v, 1));
  return v;
}

Solution integrate(const Rhs& rhs, double t0, double t1, std::span<const double> y0,
                   const Options& opts) {
  const std::size_t n = y0.size();
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  if (span == 0.0) throw InvalidParameter("ode: empty interval");

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  double t = t0;
  double h = opts.h_init != 0.0 ? std::fabs(opts.h_init) : span / 100.0;
  h = std::min(h, span);

  Solution sol;
  rhs(t, y, k1);
  sol.knots.push_back({t, y, k1});

  auto stage = [&](const std::vector<double>& base, double hh,
                   std::initializer_list<std::pair<const std::vector<double>*, double>> terms,
                   std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (auto& [k, c] : terms) acc += c * (*k)[i];
      out[i] = base[i] + hh * acc;
    }
  };

  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    if (dir * (t + dir * h - t1) > 0.0) h = std::fabs(t1 - t);
    const double hs = dir * h;

    stage(y, hs, {{&k1, A21}}, ytmp);
    rhs(t + C2 * hs, ytmp, k2);
    stage(y, hs, {{&k1, A31}, {&k2, A32}}, ytmp);
    rhs(t + C3 * hs, ytmp, k3);
    stage(y, hs, {{&k1, A41}, {&k2, A42}, {&k3, A43}}, ytmp);
    rhs(t + C4 * hs, ytmp, k4);
    stage(y, hs, {{&k1, A51}, {&k2, A52}, {&k3, A53}, {&k4, A54}}, ytmp);
    rhs(t + C5 * hs, ytmp, k5);
    stage(y, hs, {{&k1, A61}, {&k2, A62}, {&k3, A63}, {&k4, A64}, {&k5, A65}}, ytmp);
    rhs(t + hs, ytmp, k6);
    stage(y, hs, {{&k1, B1}, {&k3, B3}, {&k4, B4}, {&k5, B5}, {&k6, B6}}, ynew);
    rhs(t + hs, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double y4 = y[i] + hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                               E7 * k7[i]);
      double sc = opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      double e = (ynew[i] - y4) / sc;
      err += e * e;
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      t += hs;
      y = ynew;
      k1 = k7;
      sol.knots.push_back({t, y, k1});

      if (opts.stop_event && opts.stop_event(t, y)) {
        // Locate the first crossing inside the last step by bisection on the
        // dense interpolant.
        const Knot& a = sol.knots[sol.knots.size() - 2];
        const Knot& b = sol.knots.back();
        double lo = a.t, hi = b.t;
        std::vector<double> ymid(n);
        for (int it = 0; it < 80 && std::fabs(hi - lo) > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
          double mid = 0.5 * (lo + hi);
          hermite(a, b, mid, ymid);
          if (opts.stop_event(mid, ymid))
            hi = mid;
          else
            lo = mid;
        }
        hermite(a, b, hi, ymid);
        sol.event_hit = true;
        sol.event_t = hi;
        sol.event_y = ymid;
        return sol;
      }

      if (dir * (t - t1) >= 0.0 || std::fabs(t - t1) < 1e-14 * span) return sol;
      h *= std::clamp(0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2), 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < opts.h_min)
        throw OdeFailure("ode: step-size underflow at t = " + std::to_string(t));
    }
  }
  throw OdeFailure("ode: step budget exhausted at t = " + std::to_string(t));
}

}  // namespace narz::ode
