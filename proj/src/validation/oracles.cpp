#include "oracles.hpp"

#include "porecrys/errors.hpp"

#include <cmath>

namespace porecrys::oracle {

double brinkman_channel(double y, double a, double b, double lambda, double mu, double u_bar) {
  const double r = std::sqrt(lambda), L = 2 * (a + b);
  y = std::remainder(y, L);
  // unit-forcing profile: parabola in the fluid, cosh in the wall, matched
  // in value and slope at |y| = a
  const double c1 = 1 / (mu * lambda) + a / (mu * r * std::tanh(r * b));
  // c2·cosh(r(|y| − a − b)) with c2 = a/(μ r sinh(rb)), written so that large rb
  // cannot overflow: cosh(rd)/sinh(rb) for d ∈ [−b, 0]
  auto wall_shape = [&](double d) {
    d = std::abs(d);
    return (std::exp(r * (d - b)) + std::exp(-r * (d + b))) / -std::expm1(-2 * r * b);
  };
  auto unit = [&](double yy) {
    yy = std::abs(yy);
    if (yy < a) return (a * a - yy * yy) / (2 * mu) + c1;
    return 1 / (mu * lambda) + a / (mu * r) * wall_shape(yy - (a + b));
  };
  // period mean of the unit profile
  const double fluid = (2 * a * a * a / 3) / mu + 2 * a * c1;
  const double wall = 2 * b / (mu * lambda) + 2 * a / (mu * lambda);
  const double G = u_bar * L / (fluid + wall);
  return G * unit(y);
}

double convergence_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) throw ParameterError("convergence_order: need two or more points");
  const Eigen::Index n = Eigen::Index(h.size());
  Eigen::ArrayXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = std::log(h[size_t(i)]);
    y[i] = std::log(err[size_t(i)]);
  }
  const double mx = x.mean(), my = y.mean();
  return ((x - mx) * (y - my)).sum() / (x - mx).square().sum();
}

double Box::attachment(double eps) const {
  double p = 2 / (1 - eps0) * std::max(0.0, 1 - eps) * std::pow(eps, attach.m_exponent);
  return std::min(p, 1.0);
}

Eigen::Vector4d Box::rhs(const Eigen::Vector4d& y) const {
  const double eps = y[0], co3 = std::max(y[1], 0.0), cp = std::max(y[2], 0.0);
  const double ca = Ca_held * eps;
  const double rp = k.K_minus3 * A_s * k.gamma_Ca * k.gamma_CO3 * ca * co3 / eps;
  const double rc = k.K_c * attachment(eps) * cp;
  return {-k.v_molar * rc, -rp, rp - rc, rc};
}

Eigen::Vector4d Box::integrate(Eigen::Vector4d y, double t, int n) const {
  const double dt = t / n;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector4d k1 = rhs(y);
    const Eigen::Vector4d k2 = rhs(y + 0.5 * dt * k1);
    const Eigen::Vector4d k3 = rhs(y + 0.5 * dt * k2);
    const Eigen::Vector4d k4 = rhs(y + dt * k3);
    y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

}  // namespace porecrys::oracle
