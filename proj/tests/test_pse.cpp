#include <doctest.h>

#include "porecrys/pse.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace porecrys;
using std::numbers::pi;

namespace {

Grid box(int n) { return Grid({n, n, n}, 2 * pi / n, {-pi, -pi, -pi}); }

// brute-force lattice sums, written without the kernel code
struct Moments {
  double g1, g2;
};
Moments lattice_moments(double ratio, int rc, int p) {
  Moments m{0, 0};
  for (int c = -rc; c <= rc; ++c)
    for (int b = -rc; b <= rc; ++b)
      for (int a = -rc; a <= rc; ++a) {
        if (!a && !b && !c) continue;
        const double x = a * ratio, y = b * ratio, z = c * ratio;
        const double th = 1.0 / (1.0 + std::pow(std::sqrt(x * x + y * y + z * z), p));
        m.g1 += x * x * x * x * th * ratio * ratio * ratio;
        m.g2 += x * x * y * y * th * ratio * ratio * ratio;
      }
  return m;
}

double rms(const Eigen::ArrayXd& a) { return std::sqrt(a.square().mean()); }

}  // namespace

TEST_CASE("moments match golden lattice sums") {
  auto k = make_pse_kernel(0.1, 0.1);
  CHECK(k.offsets.size() == 124);
  CHECK(k.gamma1 == doctest::Approx(1.3773441747358184).epsilon(1e-13));
  CHECK(k.gamma2 == doctest::Approx(0.17921274778745355).epsilon(1e-13));
  CHECK(k.c0 == doctest::Approx(1.6692659544821309).epsilon(1e-13));
  CHECK(k.c1 == doctest::Approx(0.1723464487297077).epsilon(1e-13));
  // isotropic reduction: c0 − 3c1 = 2/(γ1 + 2γ2)
  CHECK(k.isotropic_factor() == doctest::Approx(2 / (k.gamma1 + 2 * k.gamma2)).epsilon(1e-14));

  auto k3 = make_pse_kernel(0.1, 0.1, 10, 3);
  CHECK(k3.gamma1 == doctest::Approx(1.3976035968749305).epsilon(1e-13));
  auto k2h = make_pse_kernel(0.1, 0.2, 10, 4);
  CHECK(k2h.gamma1 == doctest::Approx(0.9267305343335828).epsilon(1e-13));
  CHECK(k2h.gamma2 == doctest::Approx(0.3071761230158616).epsilon(1e-13));
}

TEST_CASE("moments are independent of the axis pair and agree with direct sums") {
  auto k = make_pse_kernel(1.0, 1.0, 8, 2);
  const auto m = lattice_moments(1.0, 2, 8);
  double gz = 0, gyz = 0;
  for (const auto& o : k.offsets) {
    const double th = k.theta(std::sqrt(o.s2));
    gz += std::pow(o.s[2], 4) * th;
    gyz += o.s[1] * o.s[1] * o.s[2] * o.s[2] * th;
  }
  CHECK(k.gamma1 == doctest::Approx(m.g1).epsilon(1e-14));
  CHECK(k.gamma2 == doctest::Approx(m.g2).epsilon(1e-14));
  CHECK(gz == doctest::Approx(m.g1).epsilon(1e-14));
  CHECK(gyz == doctest::Approx(m.g2).epsilon(1e-14));
}

TEST_CASE("off-diagonal correction vanishes when gamma1 = 3 gamma2") {
  PseKernel k;
  k.gamma2 = 0.25;
  k.gamma1 = 0.75;
  CHECK(k.h_factor() == 0.0);
  k.gamma1 = 1.0;
  CHECK(k.h_factor() != 0.0);
}

TEST_CASE("degenerate kernels are rejected") {
  CHECK_THROWS_AS(make_pse_kernel(1.0, 1.0, 10, 0), KernelError);
  CHECK_THROWS_AS(make_pse_kernel(1.0, -1.0), KernelError);
}

TEST_CASE("constant field gives zero and L = I reproduces the Laplacian of sin x") {
  const Grid g = box(16);
  auto k = make_pse_kernel(g.h, g.h);
  ScalarField<double> c(g, 2.0);
  auto L = isotropic_tensor(ScalarField<double>(g, 1.0));
  CHECK(pse_apply(c, L, k).max_abs() == 0.0);

  double err[2];
  for (int r = 0; r < 2; ++r) {
    const Grid gr = box(16 << r);
    auto kr = make_pse_kernel(gr.h, gr.h);
    auto f = ScalarField<double>::from_function(gr, [](double x, double, double) { return std::sin(x); });
    auto q = pse_apply(f, isotropic_tensor(ScalarField<double>(gr, 1.0)), kr);
    err[r] = (q.data + f.data).abs().maxCoeff();
  }
  CHECK(err[0] < 0.05);
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("anisotropic path: off-diagonal tensor reproduces mixed derivatives") {
  // L = [[1, .3, 0], [.3, 1, 0], [0, 0, 1]], f = sin x sin y: div(L∇f) = −2f + 0.6 cos x cos y
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const Grid g = box(16 << r);
    auto k = make_pse_kernel(g.h, g.h);
    TensorField L = TensorField::Zero(g.size(), 6);
    L.col(0).setConstant(1);
    L.col(1).setConstant(1);
    L.col(2).setConstant(1);
    L.col(3).setConstant(0.3);
    auto f = ScalarField<double>::from_function(g, [](double x, double y, double) {
      return std::sin(x) * std::sin(y);
    });
    auto ex = ScalarField<double>::from_function(g, [](double x, double y, double) {
      return -2 * std::sin(x) * std::sin(y) + 0.6 * std::cos(x) * std::cos(y);
    });
    err[r] = (pse_apply(f, L, k).data - ex.data).abs().maxCoeff();
  }
  CHECK(err[1] < 0.02);
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("heterogeneous oracle converges at second order on small grids") {
  double e[2];
  for (int r = 0; r < 2; ++r) {
    const Grid g = box(16 << r);
    auto k = make_pse_kernel(g.h, g.h);
    auto alpha = ScalarField<double>::from_function(g, [](double x, double, double) {
      return 1 + std::cos(x) * std::cos(x);
    });
    auto f = ScalarField<double>::from_function(g, [](double x, double y, double z) {
      return std::sin(x) * std::sin(y) * std::sin(z);
    });
    auto ex = ScalarField<double>::from_function(g, [](double x, double y, double z) {
      const double fv = std::sin(x) * std::sin(y) * std::sin(z);
      return -3 * fv - 5 * std::cos(x) * std::cos(x) * fv;
    });
    auto q = pse_apply(f, isotropic_tensor(alpha), k);
    auto qi = pse_apply_isotropic(f, alpha, k);
    CHECK((q.data - qi.data).abs().maxCoeff() < 1e-10);
    e[r] = rms(q.data - ex.data);
  }
  CHECK(std::log2(e[0] / e[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("exchange is conservative and antisymmetric") {
  const Grid g({12, 10, 8}, 0.3);
  auto k = make_pse_kernel(g.h, g.h);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  ScalarField<double> f(g), eps(g);
  for (Index n = 0; n < g.size(); ++n) {
    f[n] = U(rng);
    eps[n] = 0.05 + 0.95 * U(rng);
  }
  DiffusionSpec spec{DiffusionKind::ArchieSuperficial, 1.0, 1.0};
  auto q = archie_apply(f, PorosityField(eps, 0.05), spec, k);
  const double tot = q.sum() * g.cell_volume();
  CHECK(std::abs(tot) <= 1e-10 * f.data.abs().sum() * g.cell_volume());

  // swapping the two nodes of a pair negates the exchange
  ScalarField<double> delta(g, 0.0);
  delta[g.index(3, 3, 3)] = 1.0;
  auto qd = archie_apply(delta, PorosityField(ScalarField<double>(g, 1.0), 0.05), spec, k);
  ScalarField<double> delta2(g, 0.0);
  delta2[g.index(4, 3, 3)] = 1.0;
  auto qd2 = archie_apply(delta2, PorosityField(ScalarField<double>(g, 1.0), 0.05), spec, k);
  CHECK(qd[g.index(4, 3, 3)] == qd2[g.index(3, 3, 3)]);
}

TEST_CASE("archie operator reduces to D_m times the Laplacian when eps = 1") {
  const Grid g = box(16);
  auto k = make_pse_kernel(g.h, g.h);
  auto C = ScalarField<double>::from_function(g, [](double x, double y, double z) {
    return 1 + std::sin(x) * std::cos(2 * y) * std::cos(z);
  });
  DiffusionSpec spec{DiffusionKind::ArchieSuperficial, 2.5e-9, 1.0};
  auto a = archie_apply(C, PorosityField(g, 0.05, 1.0), spec, k);
  auto b = pse_apply(C, isotropic_tensor(ScalarField<double>(g, 2.5e-9)), k);
  CHECK((a.data - b.data).abs().maxCoeff() <= 1e-12 * b.max_abs());
}

TEST_CASE("archie operator: C proportional to eps is at rest, uniform C relaxes toward it") {
  const Grid g({8, 4, 4}, 1.0);
  auto k = make_pse_kernel(g.h, g.h);
  ScalarField<double> e(g, 1.0);
  for (int kk = 0; kk < 4; ++kk)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) e(i, j, kk) = 0.05;
  PorosityField eps(e, 0.05);
  DiffusionSpec spec{DiffusionKind::ArchieSuperficial, 1.0, 1.0};

  ScalarField<double> prop = e;
  prop.data *= 3.0;
  CHECK(archie_apply(prop, eps, spec, k).max_abs() < 1e-14);

  // Uniform superficial C: intrinsic C/ε is 20x larger in the matrix, so the
  // exchange drains the solid side and feeds the fluid side.
  ScalarField<double> uni(g, 1.0);
  auto q = archie_apply(uni, eps, spec, k);
  CHECK(q(3, 1, 1) < 0);
  CHECK(q(4, 1, 1) > 0);
  CHECK(std::abs(q.sum()) < 1e-12 * q.max_abs() * double(g.size()));
}

TEST_CASE("archie operator: single solid node against a hand-computed pair exchange") {
  const Grid g({8, 8, 8}, 1.0);
  auto k = make_pse_kernel(g.h, g.h);
  ScalarField<double> e(g, 1.0);
  e(4, 4, 4) = 0.05;
  DiffusionSpec spec{DiffusionKind::ArchieSuperficial, 1.0, 1.0};
  auto q = archie_apply(ScalarField<double>(g, 1.0), PorosityField(e, 0.05), spec, k);
  // pair term: (f_l − f_k)·(a_k + a_l)·Θ(s)·|s|²·(c0 − 3c1)/2, f = C/ε, a = ε²
  const double cf = 0.5 * k.isotropic_factor();
  const double face = (1 / 0.05 - 1) * (1 + 0.05 * 0.05) * k.theta(1.0) * 1.0 * cf;
  const double edge = (1 / 0.05 - 1) * (1 + 0.05 * 0.05) * k.theta(std::sqrt(2.0)) * 2.0 * cf;
  CHECK(q(5, 4, 4) == doctest::Approx(face).epsilon(1e-13));
  CHECK(q(5, 5, 4) == doctest::Approx(edge).epsilon(1e-13));
  double drain = 0;
  for (const auto& o : k.offsets) drain += (1 - 1 / 0.05) * (1 + 0.05 * 0.05) * k.theta(std::sqrt(o.s2)) * o.s2 * cf;
  CHECK(q(4, 4, 4) == doctest::Approx(drain).epsilon(1e-13));
  CHECK(q(0, 0, 0) == 0.0);  // beyond the cutoff
}

TEST_CASE("interior maximum gives a negative operator value") {
  const Grid g = box(16);
  auto k = make_pse_kernel(g.h, g.h);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = U(rng), b = U(rng), c = U(rng);
    auto f = ScalarField<double>::from_function(g, [&](double x, double y, double z) {
      return std::exp(-a * x * x - b * y * y - c * z * z);
    });
    auto alpha = ScalarField<double>::from_function(g, [&](double x, double, double) {
      return 1 + 0.5 * std::sin(x + trial);
    });
    auto q = pse_apply_isotropic(f, alpha, k);
    CHECK(q(8, 8, 8) < 0);  // node at the origin
  }
}
