#include <doctest.h>

#include "oracles.hpp"
#include "suites.hpp"

#include <cmath>

using namespace porecrys;

TEST_CASE("brinkman oracle: mean flux, matching at the wall, stiff walls") {
  const double a = 1e-5, b = 3e-5, mu = 1e-3, ub = 2e-3;
  for (double lam : {1e9, 1e12, 1.8e17}) {
    CAPTURE(lam);
    // period mean by midpoint quadrature
    const int n = 200000;
    const double L = 2 * (a + b);
    double s = 0;
    for (int i = 0; i < n; ++i) s += oracle::brinkman_channel(-L / 2 + (i + 0.5) * L / n, a, b, lam, mu, ub);
    CHECK(s / n == doctest::Approx(ub).epsilon(1e-4));
    const double in = oracle::brinkman_channel(a * (1 - 1e-9), a, b, lam, mu, ub);
    const double out = oracle::brinkman_channel(a * (1 + 1e-9), a, b, lam, mu, ub);
    CHECK(std::isfinite(out));
    CHECK(in == doctest::Approx(out).epsilon(1e-6));
    CHECK(oracle::brinkman_channel(0, a, b, lam, mu, ub) > in);
    // folded into the period and symmetric about the fluid centre
    CHECK(oracle::brinkman_channel(0.3 * a + L, a, b, lam, mu, ub) ==
          doctest::Approx(oracle::brinkman_channel(-0.3 * a, a, b, lam, mu, ub)));
  }
  // plane Poiseuille mean when the walls are rigid: u_centre = 1.5·ū_fluid
  const double lam = 1e20, u0 = oracle::brinkman_channel(0, a, b, lam, mu, ub);
  CHECK(u0 == doctest::Approx(1.5 * ub * (a + b) / a).epsilon(1e-3));
}

TEST_CASE("convergence order of an exact power law") {
  CHECK(oracle::convergence_order({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}) == doctest::Approx(2.0));
  CHECK_THROWS(oracle::convergence_order({0.1}, {1.0}));
}

TEST_CASE("box oracle: crystal plus precipitate plus carbonate is constant") {
  oracle::Box box;
  box.k.v_molar = 0.03693;
  const Eigen::Vector4d y0{0.6, 0.6, 0, 0};
  const auto y = box.integrate(y0, 0.01, 1000);
  CHECK(y[1] + y[2] + y[3] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(y[0] < 0.6);
  CHECK(y[0] == doctest::Approx(0.6 - box.k.v_molar * y[3]).epsilon(1e-10));
}

TEST_CASE("report helpers") {
  validation::Check c{"4", "name", true, "detail"};
  CHECK(validation::format_line(c).rfind("PASS  [4] name: detail", 0) == 0);
  const auto j = validation::to_json({c, {"5", "x", false, "y"}});
  CHECK_FALSE(j["passed"].get<bool>());
  CHECK(j["checks"].size() == 2);
  CHECK_THROWS(validation::run_suite("nope", {}));
}
