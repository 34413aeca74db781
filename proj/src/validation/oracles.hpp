#pragma once

// Independent reference solutions used by the validation suites. Nothing
// here calls the solver code it is meant to check.

#include "porecrys/chemistry.hpp"

#include <Eigen/Core>

#include <vector>

namespace porecrys::oracle {

// Plane Brinkman flow −μu'' + μλu = G through a periodic stack of fluid slabs
// of half-width a separated by porous walls of half-width b (λ = K⁻¹ in the
// walls, 0 in the fluid). G is chosen so the period-mean velocity is u_bar.
// y is measured from the fluid centre and folded into the period.
double brinkman_channel(double y, double a, double b, double lambda, double mu, double u_bar);

// least-squares slope of log err against log h
double convergence_order(const std::vector<double>& h, const std::vector<double>& err);

// Uniform, flow-free box with held calcium: the reaction system collapses
// to four ODEs in (ε, C_CO3, C_precip, C_crystal), superficial units.
struct Box {
  KineticConstants k;
  AttachmentSpec attach;
  double eps0 = 0.05;
  double Ca_held = 100;
  double A_s = 8300;

  // P_ad of a uniform field: the W-convolution of a constant is the constant
  double attachment(double eps) const;
  Eigen::Vector4d rhs(const Eigen::Vector4d& y) const;
  // classical RK4 with n equal steps
  Eigen::Vector4d integrate(Eigen::Vector4d y, double t, int n) const;
};

}  // namespace porecrys::oracle
