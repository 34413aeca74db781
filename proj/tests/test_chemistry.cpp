#include <doctest.h>

#include "porecrys/chemistry.hpp"
#include "porecrys/operators.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace porecrys;

namespace {

PorosityField slab_x(int n, double h, int solid_cells, double eps0 = 0.05) {
  PorosityField e(Grid({n, n, n}, h), eps0, 1.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < solid_cells; ++i) e.eps(i, j, k) = eps0;
  return e;
}

PorosityField random_geometry(int n, double h, unsigned seed, double eps0 = 0.05) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  PorosityField e(Grid({n, n, n}, h), eps0, 1.0);
  for (Index m = 0; m < e.grid().size(); ++m) {
    const double r = u(rng);
    e.eps[m] = r < 0.3 ? eps0 : (r < 0.4 ? 0.5 : 1.0);
  }
  return e;
}

Chemistry make_chem(const Grid& g, bool hold, double Kc = 1e3) {
  KineticConstants k;
  k.K_c = Kc;
  ChemOptions o;
  o.hold_calcium = hold;
  o.area_policy = AreaPolicy::Fixed;
  return Chemistry(k, AttachmentSpec{}, o, make_pse_kernel(g.h, g.h));
}

}  // namespace

TEST_CASE("tst rate: equilibrium, far-from-equilibrium reduction, pure dissolution") {
  KineticConstants k;
  k.K1 = 3e-3;
  k.K2 = 2e-5;
  const double aca = 0.1, aco3 = k.K_eq / aca;
  CHECK(tst_rate(1e-7, 1e-5, aca, aco3, k) == doctest::Approx(0).scale(1));

  k.K1 = k.K2 = 0;
  k.K_minus3 = k.K3 / k.K_eq;
  for (double ratio : {1e3, 1e4, 1e6}) {
    const double a_co3 = ratio * k.K_eq / aca;
    // ε = 1, γ = 1 so activities equal concentrations
    KineticConstants kk = k;
    kk.gamma_Ca = kk.gamma_CO3 = 1;
    const double tst = tst_rate(0, 0, aca, a_co3, k);
    const double prec = precipitation_rate(aca, a_co3, 1.0, k.A_s, kk);
    CHECK(std::abs(tst / prec - 1) <= 1e-3);
  }

  k.K1 = 3e-3;
  k.K2 = 2e-5;
  const double r = tst_rate(1e-7, 1e-5, 0, 1.0, k);
  CHECK(r == doctest::Approx(-k.A_s * (k.K1 * 1e-7 + k.K2 * 1e-5 + k.K3)).epsilon(1e-14));
  CHECK(r < 0);
}

TEST_CASE("precipitation rate: paper constants, zero carbonate, bilinearity, intrinsic activities") {
  KineticConstants k;
  const double r = precipitation_rate(100.0, 1.0, 1.0, 8300, k);
  CHECK(r == doctest::Approx(199.0 * 8300 * 0.1 * 0.001).epsilon(1e-14));
  CHECK(precipitation_rate(100.0, 0.0, 1.0, 8300, k) == 0.0);
  CHECK(precipitation_rate(200.0, 2.0, 1.0, 8300, k) == doctest::Approx(4 * r).epsilon(1e-14));
  // superficial C = εC̃ with the same intrinsic values: rate per bulk volume scales with ε
  CHECK(precipitation_rate(50.0, 0.5, 0.5, 8300, k) == doctest::Approx(0.5 * r).epsilon(1e-14));

  const Grid g({4, 4, 4}, 1e-5);
  PorosityField e(g, 0.05, 1.0);
  ScalarField<double> ca(g, 100.0), co3(g, 1.0);
  const auto f = precipitation_rate(ca, co3, e, 8300, k);
  CHECK((f.data - r).abs().maxCoeff() == 0.0);
}

TEST_CASE("dimensionless numbers at the reference constants") {
  KineticConstants k;
  const auto d = dimensionless_numbers(1e-3, 2e-11, 1e-9, k);
  CHECK(d.Pe == doctest::Approx(4.47).epsilon(0.01 / 4.47));
  CHECK(d.Da_prec == doctest::Approx(33.034).epsilon(1e-4));
  CHECK(d.Da_crys == doctest::Approx(20.0).epsilon(1e-12));
  k.K_c = 1e2;
  CHECK(dimensionless_numbers(1e-3, 2e-11, 1e-9, k).Da_crys == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(dimensionless_numbers(1e-3, 0, 1e-9, k), ParameterError);
}

TEST_CASE("henry law") {
  CHECK(henry_concentration(0, 29.41) == 0.0);
  CHECK(henry_concentration(2.96e-2, 29.41) == doctest::Approx(1.0e-3).epsilon(0.01));
  CHECK(henry_concentration(29.41, 29.41) == 1.0);
  CHECK_THROWS_AS(henry_concentration(-1, 29.41), ParameterError);
}

TEST_CASE("attachment probability anchors") {
  const Grid g({8, 8, 8}, 1e-5);
  AttachmentSpec spec;
  PorosityField fluid(g, 0.05, 1.0);
  CHECK(attachment_probability(fluid, spec).max_abs() == 0.0);

  PorosityField solid(g, 0.05, 0.05);
  const auto ps = attachment_probability(solid, spec);
  for (Index n = 0; n < g.size(); ++n) CHECK(ps[n] == doctest::Approx(2 * 0.05 * 0.05).epsilon(1e-12));

  // planar sharp interface: solid at i < 4
  auto e = slab_x(8, 1e-5, 4);
  Index clamped = -1;
  const auto p = attachment_probability(e, spec, &clamped);
  CHECK(clamped == 0);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j) {
      CHECK(p(4, j, k) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
      CHECK(p(5, j, k) == doctest::Approx(0.0).scale(1));
      // last solid node: 1 − (1 + 2ε₀)/3, times ε₀²
      CHECK(p(3, j, k) == doctest::Approx(2 / 0.95 * (1 - 1.1 / 3) * 0.0025).epsilon(1e-12));
    }
  // the peak sits on the first fluid node
  CHECK(p.max_abs() == doctest::Approx(2.0 / 3.0));

  AttachmentSpec dist;
  dist.norm = AttachmentNorm::DistributionOverDomain;
  CHECK(attachment_probability(e, dist).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("attachment probability stays near interfaces on random geometries") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto e = random_geometry(12, 1e-5, seed);
    const Grid& g = e.grid();
    const auto p = attachment_probability(e, AttachmentSpec{});
    // nodes whose W-stencil sees an ε jump of at least 0.1
    std::vector<char> iface(size_t(g.size()), 0);
    for (int k = 0; k < 12; ++k)
      for (int j = 0; j < 12; ++j)
        for (int i = 0; i < 12; ++i) {
          double lo = 2, hi = -1;
          for (int c = -1; c <= 1; ++c)
            for (int b = -1; b <= 1; ++b)
              for (int a = -1; a <= 1; ++a) {
                const double v = e.eps[g.index_wrapped(i + a, j + b, k + c)];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
              }
          iface[size_t(g.index(i, j, k))] = hi - lo >= 0.1;
        }
    for (int k = 0; k < 12; ++k)
      for (int j = 0; j < 12; ++j)
        for (int i = 0; i < 12; ++i) {
          if (p(i, j, k) <= 0.1) continue;
          bool near = false;
          for (int c = -2; c <= 2 && !near; ++c)
            for (int b = -2; b <= 2 && !near; ++b)
              for (int a = -2; a <= 2 && !near; ++a) near = iface[size_t(g.index_wrapped(i + a, j + b, k + c))];
          CHECK(near);
        }
    CHECK(p.data.minCoeff() >= 0.0);
    CHECK(p.data.maxCoeff() <= 1.0);
  }
}

TEST_CASE("crystallization rate") {
  const Grid g({4, 4, 4}, 1e-5);
  KineticConstants k;
  ScalarField<double> cp(g, 1.0), pad(g, 2.0 / 3.0);
  CHECK(crystallization_rate(cp, pad, k)[7] == doctest::Approx(666.6666666666667).epsilon(1e-14));
  ScalarField<double> zero(g, 0.0);
  CHECK(crystallization_rate(cp, zero, k).max_abs() == 0.0);
}

TEST_CASE("porosity update: no-op, direct formula, clog refund") {
  const Grid g({4, 4, 4}, 1e-5);
  KineticConstants k;
  ChemState s(PorosityField(g, 0.05, 0.5), 0.0, 0.0, k.A_s);
  ScalarField<double> d(g, 0.0);
  auto before = s.eps.eps.data;
  update_porosity(s, d, k);
  CHECK((s.eps.eps.data - before).abs().maxCoeff() == 0.0);

  d[0] = 0.1 / k.v_molar;
  update_porosity(s, d, k);
  CHECK(s.eps[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.C_crystal[0] == doctest::Approx(0.1 / k.v_molar).epsilon(1e-14));

  // ε = ε₀ + vδ, increment 2δ
  const double delta = 3.0;
  s.eps.eps[5] = 0.05 + k.v_molar * delta;
  s.C_precip[5] = 10.0;
  const double ca0 = s.C_precip[5] + s.C_crystal[5];
  ScalarField<double> d2(g, 0.0);
  d2[5] = 2 * delta;
  // the caller has already moved 2δ out of the precipitate pool
  s.C_precip[5] -= 2 * delta;
  const auto u = update_porosity(s, d2, k);
  CHECK(s.eps[5] == 0.05);
  CHECK(s.C_crystal[5] == doctest::Approx(delta).epsilon(1e-12));
  CHECK(u.refunded == doctest::Approx(delta * g.cell_volume()).epsilon(1e-12));
  CHECK(u.clogged == 1);
  CHECK(s.C_precip[5] + s.C_crystal[5] == doctest::Approx(ca0).epsilon(1e-14));

  ScalarField<double> neg(g, 0.0);
  neg[1] = -1;
  CHECK_THROWS_AS(update_porosity(s, neg, k), Error);
}

TEST_CASE("specific area estimate") {
  const double h = 1e-4;
  PorosityField u(Grid({16, 16, 16}, h), 0.05, 0.7);
  CHECK(estimate_specific_area(u) == 0.0);

  // a periodic slab has two planar interfaces
  auto e = slab_x(16, h, 8);
  CHECK(estimate_specific_area(e) == doctest::Approx(2 * 0.95 / (16 * h)).epsilon(1e-12));

  const int n = 64;
  const Grid g({n, n, n}, h);
  const double r = 16 * h, c = 32 * h;
  PorosityField sph(g, 0.05, 1.0);
  for (Index m = 0; m < g.size(); ++m) {
    const auto q = g.coords(m);
    const double x = g.x(q[0], 0) - c, y = g.x(q[1], 1) - c, z = g.x(q[2], 2) - c;
    if (x * x + y * y + z * z <= r * r) sph.eps[m] = 0.05;
  }
  const double exact = 4 * std::numbers::pi * r * r * 0.95 / g.volume();
  CHECK(std::abs(estimate_specific_area(sph) / exact - 1) < 0.1);
}

TEST_CASE("reaction step: identity without sources, bulk fluid never crystallizes") {
  const Grid g({8, 8, 8}, 5.6e-6);
  auto chem = make_chem(g, true);
  ChemState s(PorosityField(g, 0.05, 1.0), 0.0, 0.0, 8300);
  s.C_Ca.data.setZero();
  const auto snap = s.C_CO3.data;
  chem.step(s, 1e-4);
  CHECK(s.C_CO3.data.isApprox(snap));
  CHECK(s.C_precip.max_abs() == 0.0);

  ChemState f(PorosityField(g, 0.05, 1.0), 1.0, 100.0, 8300);
  chem.initialize(f);
  for (int i = 0; i < 5; ++i) chem.step(f, 0.5 * chem.stable_dt(f));
  CHECK(f.C_precip.data.minCoeff() > 0);
  CHECK(f.C_crystal.max_abs() == 0.0);
  CHECK(f.eps.eps.data.minCoeff() == 1.0);
}

TEST_CASE("closed box conserves calcium and keeps crystal and porosity monotone") {
  auto e = random_geometry(12, 5.6e-6, 7);
  auto chem = make_chem(e.grid(), false);
  ChemState s(e, 1.0, 100.0, 8300);
  chem.initialize(s);
  const double ca0 = s.calcium_total();
  double clipped = 0;
  for (int it = 0; it < 100; ++it) {
    const auto crys = s.C_crystal.data;
    const auto eps = s.eps.eps.data;
    const auto rep = chem.step(s, chem.stable_dt(s));
    clipped += rep.clipped_ca + rep.clipped_precip;
    CHECK((s.C_crystal.data >= crys).all());
    CHECK((s.eps.eps.data <= eps).all());
  }
  CHECK(s.C_crystal.max_abs() > 0);
  CHECK(std::abs(s.calcium_total() - clipped - ca0) <= 1e-9 * ca0);
  CHECK(s.eps.eps.data.minCoeff() >= 0.05);
}

TEST_CASE("reaction step refuses a destabilizing dt") {
  auto e = random_geometry(8, 5.6e-6, 3);
  auto chem = make_chem(e.grid(), true);
  ChemState s(e, 1.0, 100.0, 8300);
  chem.initialize(s);
  CHECK_THROWS_AS(chem.step(s, 100 * chem.stable_dt(s)), StabilityError);
}
