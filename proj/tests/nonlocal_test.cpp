#include <cmath>
#include <vector>

#include <doctest.h>

#include "narz/errors.hpp"
#include "narz/nonlocal.hpp"

using narz::compute_rho_tilde;
using narz::Grid;
using narz::Kernel;

namespace {

std::vector<double> gaussian(const Grid& g, double A, double s) {
  std::vector<double> rho(g.n);
  for (int i = 0; i < g.n; ++i) {
    double v = A * std::exp(-(g.x(i) / s) * (g.x(i) / s));
    rho[i] = v < 1e-14 ? 0.0 : v;
  }
  return rho;
}

// O(N^2) reference quadrature of the look-ahead integral.
std::vector<double> direct_quadrature(const std::vector<double>& rho, const Kernel& k,
                                      const Grid& g) {
  const int n = g.n;
  const double dx = g.dx();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = i; j < n; ++j) {
      double term = k.w((j - i) * dx) * rho[j];
      s += (j == i || j == n - 1) ? 0.5 * term : term;
    }
    out[i] = s * dx;
  }
  return out;
}

}  // namespace

TEST_CASE("vacuum profile gives trivial fields") {
  Grid g(-1.0, 1.0, 64);
  std::vector<double> rho(64, 0.0);
  auto f = compute_rho_tilde(rho, Kernel::uniform(), g);
  for (int i = 0; i < g.n; ++i) {
    CHECK(f.rho_tilde[i] == 0.0);
    CHECK(f.slowdown[i] == 1.0);
  }
}

TEST_CASE("upstream cells see the full remaining mass") {
  Grid g(-2.0, 2.0, 256);
  std::vector<double> rho(g.n, 0.0);
  for (int i = 0; i < g.n; ++i)
    if (g.x(i) >= 0.0 && g.x(i) < 1.0) rho[i] = 1.0;
  // keep the right boundary clear
  auto f = compute_rho_tilde(rho, Kernel::uniform(), g);
  const double m = narz::trapezoid_mass(rho, g.dx());
  CHECK(f.rho_tilde[0] == doctest::Approx(m).epsilon(1e-12));
  CHECK(m == doctest::Approx(1.0).epsilon(2 * g.dx()));
}

TEST_CASE("suffix accumulation matches direct quadrature (uniform)") {
  Grid g(-9.0, 9.0, 512);
  auto rho = gaussian(g, 0.7, 1.2);
  auto fast = compute_rho_tilde(rho, Kernel::uniform(), g);
  auto slow = direct_quadrature(rho, Kernel::uniform(), g);
  for (int i = 0; i < g.n; ++i) CHECK(std::fabs(fast.rho_tilde[i] - slow[i]) <= 1e-12);
}

TEST_CASE("windowed quadrature matches direct quadrature (truncated exponential)") {
  Grid g(-8.0, 8.0, 256);
  auto rho = gaussian(g, 0.5, 1.0);
  Kernel k = Kernel::truncated_exponential(0.5);
  auto fast = compute_rho_tilde(rho, k, g);
  auto slow = direct_quadrature(rho, k, g);
  for (int i = 0; i < g.n; ++i) CHECK(std::fabs(fast.rho_tilde[i] - slow[i]) <= 1e-12);
}

TEST_CASE("derivative identity for the uniform kernel") {
  // Central differences of the computed look-ahead mass reproduce -rho at
  // second order.
  auto err_at = [](int n) {
    Grid g(-10.0, 10.0, n);
    auto rho = gaussian(g, 1.0, 1.0);
    auto f = compute_rho_tilde(rho, Kernel::uniform(), g);
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      double dc = (f.rho_tilde[i + 1] - f.rho_tilde[i - 1]) / (2.0 * g.dx());
      worst = std::max(worst, std::fabs(dc + rho[i]));
    }
    return worst;
  };
  double e1 = err_at(1000);
  double e2 = err_at(2000);
  CHECK(e1 <= 2e-4);
  CHECK(e1 / e2 >= 3.0);  // second order

  // The stored derivative field uses the identity directly.
  Grid g(-10.0, 10.0, 500);
  auto rho = gaussian(g, 1.0, 1.0);
  auto f = compute_rho_tilde(rho, Kernel::uniform(), g);
  for (int i = 0; i < g.n; ++i) CHECK(f.d_rho_tilde_dx[i] == -rho[i]);
}

TEST_CASE("bounds: look-ahead mass and slowdown stay in their ranges") {
  Grid g(-10.0, 10.0, 400);
  auto rho = gaussian(g, 0.9, 1.5);
  const double m = narz::trapezoid_mass(rho, g.dx());
  for (const Kernel& k : {Kernel::uniform(), Kernel::truncated_exponential(1.0)}) {
    auto f = compute_rho_tilde(rho, k, g);
    for (int i = 0; i < g.n; ++i) {
      CHECK(f.rho_tilde[i] >= 0.0);
      CHECK(f.rho_tilde[i] <= m * k.w0 + 1e-8 + 10 * g.dx() * g.dx());
      CHECK(f.slowdown[i] <= 1.0);
      CHECK(f.slowdown[i] >= std::exp(-m * k.w0) - 1e-8);
    }
  }
}

TEST_CASE("zero kernel gives exact unit slowdown") {
  Grid g(-2.0, 2.0, 64);
  std::vector<double> rho(g.n, 0.4);  // support may touch the boundary here
  auto f = compute_rho_tilde(rho, Kernel::zero(), g);
  for (int i = 0; i < g.n; ++i) {
    CHECK(f.rho_tilde[i] == 0.0);
    CHECK(f.slowdown[i] == 1.0);
  }
}

TEST_CASE("occupied right boundary is rejected") {
  Grid g(-2.0, 2.0, 64);
  std::vector<double> rho(g.n, 0.0);
  rho[g.n - 1] = 0.1;
  CHECK_THROWS_AS(compute_rho_tilde(rho, Kernel::uniform(), g), narz::TruncatedSupport);
}

TEST_CASE("interaction integral: structure and signs") {
  Grid g(-4.0, 4.0, 300);
  auto rho = gaussian(g, 0.5, 1.0);
  std::vector<double> u(g.n);

  SUBCASE("uniform kernel: identically zero") {
    for (int i = 0; i < g.n; ++i) u[i] = 0.3 + 0.01 * g.x(i);
    auto I = narz::interaction_integral(rho, u, Kernel::uniform(), g);
    for (double v : I) CHECK(v == 0.0);
  }

  SUBCASE("constant velocity: zero") {
    std::fill(u.begin(), u.end(), 0.7);
    auto I = narz::interaction_integral(rho, u, Kernel::truncated_exponential(0.8), g);
    for (double v : I) CHECK(std::fabs(v) <= 1e-14);
  }

  SUBCASE("increasing velocity: nonpositive everywhere") {
    std::fill(rho.begin(), rho.end(), 0.5);
    for (int i = 0; i < g.n; ++i) u[i] = 0.2 + 0.05 * (g.x(i) + 4.0);
    auto I = narz::interaction_integral(rho, u, Kernel::truncated_exponential(0.8), g);
    for (double v : I) CHECK(v <= 1e-14);
  }

  SUBCASE("at the running maximum of u the velocity cannot rise") {
    // u has its maximum in the interior; the drift term -U e^{-rt} I at the
    // argmax must be <= 0, i.e. I >= 0 there.
    for (int i = 0; i < g.n; ++i) u[i] = 0.8 - 0.005 * (g.x(i) + 4.0) * (g.x(i) + 4.0);
    auto I = narz::interaction_integral(rho, u, Kernel::truncated_exponential(0.8), g);
    int argmax = 0;
    for (int i = 1; i < g.n; ++i)
      if (u[i] > u[argmax]) argmax = i;
    CHECK(I[argmax] >= -1e-14);
  }
}
