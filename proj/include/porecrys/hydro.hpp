#pragma once

#include "porecrys/fields.hpp"

#include <functional>
#include <string>
#include <vector>

namespace porecrys {

enum class Acceleration { None, Anderson };

struct FlowParams {
  double mu = 1e-3;        // Pa·s
  double kappa_b = 2e-15;  // m²
  Vec3 u_bar{1e-3, 0, 0};  // m/s
  double dt_pseudo = 0;    // s; 0 selects μ·δt = 0.1 h²
  double tol = 1e-6;
  int max_iters = 20000;
  Acceleration accel = Acceleration::None;
  int anderson_depth = 6;

  void validate() const;
  double pseudo_step(double h) const { return dt_pseudo > 0 ? dt_pseudo : 0.1 * h * h / mu; }
};

// λ(ε) = κ_b⁻¹ (1−ε)² ε⁻²
inline double brinkman_lambda(double eps, double kappa_b) {
  return (1 - eps) * (1 - eps) / (eps * eps * kappa_b);
}

// Kozeny–Carman K_ε = κ_b ε³/(1−ε)²
inline double kozeny_carman(double eps, double kappa_b) {
  return kappa_b * eps * eps * eps / ((1 - eps) * (1 - eps));
}

struct FlowState {
  VectorField<double> u;      // zero-mean fluctuation, m/s
  VectorField<double> omega;  // 1/s
  VectorField<double> psi;    // m²/s
  Vec3 u_bar{};
  int iterations = 0;
  double residual = 0;
  std::vector<double> residual_history;

  VectorField<double> total_velocity() const;
};

VectorField<double> brinkman_step(const VectorField<double>& u, const PorosityField& eps, const FlowParams& p);
VectorField<double> vorticity_of(const VectorField<double>& u_total);
VectorField<double> diffuse_vorticity(const VectorField<double>& u, const FlowParams& p);
// ψ = (−Δ)⁻¹ω, u = ∇×ψ evaluated spectrally
VectorField<double> project(const VectorField<double>& omega, VectorField<double>* psi = nullptr);

using ResidualTrace = std::function<void(int iteration, double residual)>;

// Fixed point u ← Π D_ω Λ(u). `warm` seeds the iteration (u₀ = 0 otherwise).
FlowState solve_dbs(const PorosityField& eps, const FlowParams& p, const FlowState* warm = nullptr,
                    const ResidualTrace& trace = {});

enum class Window { Full, UpstreamQuarter };

// κ = μ|ū|²|Ω_sub| / ∫_sub (2μ D(u):D(u) + μ λ_eff(ε)/ε |u|²) on the total velocity,
// with λ_eff the drag the split scheme realises (λ itself when μδtλ is small)
double estimate_permeability(const FlowState& s, const PorosityField& eps, const FlowParams& p,
                             Window w = Window::Full);

struct Dissipation {
  double viscous = 0, drag = 0;
  double flux2 = 0;  // |mean u|²
};
Dissipation dissipation(const FlowState& s, const PorosityField& eps, const FlowParams& p, Window w);

}  // namespace porecrys
