#include "narz/flux.hpp"

#include <algorithm>
#include <cmath>

#include "narz/errors.hpp"

namespace narz {

FluxModel FluxModel::pipes(double J) { return pipes(J, J == 1.0 ? 1.0 : 0.99); }

FluxModel FluxModel::pipes(double J, double rho_M) {
  if (!(J >= 1.0)) throw InvalidParameter("pipes flux: J must be >= 1");
  if (!(rho_M > 0.0 && rho_M <= 1.0)) throw InvalidParameter("pipes flux: rho_M must be in (0,1]");
  FluxModel m;
  m.u_ = [J](double r) { return std::pow(1.0 - r, J); };
  m.up_ = [J](double r) { return -J * std::pow(1.0 - r, J - 1.0); };
  m.upp_ = [J](double r) { return J * (J - 1.0) * std::pow(1.0 - r, J - 2.0); };
  m.rho_m_ = rho_M;
  m.is_pipes_ = true;
  m.j_ = J;
  m.rho_c_ = 2.0 / (J + 1.0);
  m.validate_and_finish();
  return m;
}

FluxModel FluxModel::custom(Fn U, Fn Uprime, Fn Usecond, double rho_M) {
  if (!(rho_M > 0.0 && rho_M <= 1.0)) throw InvalidParameter("custom flux: rho_M must be in (0,1]");
  FluxModel m;
  m.u_ = std::move(U);
  m.up_ = std::move(Uprime);
  m.upp_ = std::move(Usecond);
  m.rho_m_ = rho_M;

  // f'' sign change on (0,1), if any, gives the inflection point.
  auto fpp = [&m](double r) { return m.fsecond(r); };
  const int n = 2000;
  double rc = 1.0;
  double prev_r = 1e-9;
  double prev_v = fpp(prev_r);
  for (int i = 1; i <= n; ++i) {
    double r = static_cast<double>(i) / n * (1.0 - 2e-9) + 1e-9;
    double v = fpp(r);
    if (prev_v < 0.0 && v >= 0.0) {
      double lo = prev_r, hi = r;
      while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (fpp(mid) < 0.0 ? lo : hi) = mid;
      }
      rc = 0.5 * (lo + hi);
      break;
    }
    prev_r = r;
    prev_v = v;
  }
  m.rho_c_ = rc;
  m.validate_and_finish();
  return m;
}

void FluxModel::validate_and_finish() {
  if (std::fabs(u_(0.0) - 1.0) > 1e-9) throw InvalidParameter("flux: U(0) must be 1");
  if (std::fabs(u_(1.0)) > 1e-9) throw InvalidParameter("flux: U(1) must be 0");
  const int n = 512;
  double sup_u = 0.0, sup_up = 0.0;
  for (int i = 0; i <= n; ++i) {
    double r = rho_m_ * i / n;
    if (r > 1e-9 && r < 1.0 - 1e-9 && !(up_(r) < 0.0))
      throw InvalidParameter("flux: U' must be negative on (0,1)");
    sup_u = std::max(sup_u, std::fabs(u_(r)));
    sup_up = std::max(sup_up, std::fabs(up_(r)));
  }
  c1_norm_ = sup_u + sup_up;
}

double blowup_beta(const FluxModel& model) {
  if (model.is_pipes()) return 1.0 / model.J();

  // ratio(rho) = rho U''/U' tends to 0 at rho = 0, so some beta > 0 exists.
  auto ok = [&model](double r) {
    return r * model.Usecond(r) / model.Uprime(r) >= -1.0;
  };
  const int n = 4096;
  double last_good = 1.0 / n;
  for (int i = 1; i <= n; ++i) {
    double r = static_cast<double>(i) / n;
    if (r > model.rho_M()) break;
    if (!ok(r)) {
      double lo = last_good, hi = r;
      while (hi - lo > 1e-8) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    last_good = r;
  }
  return std::min(1.0, model.rho_M());
}

}  // namespace narz
