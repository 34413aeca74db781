#pragma once

#include "porecrys/fields.hpp"
#include "porecrys/pse.hpp"

namespace porecrys {

struct KineticConstants {
  double K1 = 0, K2 = 0;             // mol·m⁻²·s⁻¹, dissolution pathways (formula only)
  double K3 = 6.6e-7;                // mol·m⁻²·s⁻¹
  double K_eq = 3.311311214825911e-9;  // 10^-8.48
  double K_minus3 = 199;             // mol·m⁻²·s⁻¹, ≈ K3/K_eq
  double K_c = 1e3;                  // s⁻¹
  double gamma_CO3 = 1e-3, gamma_Ca = 1e-3;  // m³/mol
  double v_molar = 36.93e-6;         // m³/mol
  double K_H = 29.41;                // L·atm/mol
  double A_s = 8300;                 // m⁻¹

  void validate() const;
};

enum class AttachmentNorm { PointwiseCapture, DistributionOverDomain };

struct AttachmentSpec {
  int m_exponent = 2;
  AttachmentNorm norm = AttachmentNorm::PointwiseCapture;
};

enum class AreaPolicy { Fixed, Geometric };

struct ChemOptions {
  bool hold_calcium = true;
  double Ca_held = 100;  // intrinsic mol/m³ reimposed when hold_calcium
  AreaPolicy area_policy = AreaPolicy::Geometric;
  DiffusionSpec diffusion;
  double D_precip = 0;  // m²/s, 0 → same as diffusion.D_m
  bool diffuse = true;

  double precip_diffusivity() const { return D_precip > 0 ? D_precip : diffusion.D_m; }
};

// Superficial concentrations (mol per m³ of bulk volume).
struct ChemState {
  ScalarField<double> C_CO3, C_Ca, C_precip, C_crystal;
  PorosityField eps;
  double A_s = 0;
  double area_ref = 0;  // surface estimate of the initial ε, for AreaPolicy::Geometric

  ChemState() = default;
  ChemState(const PorosityField& e, double co3, double ca, double a_s);
  const Grid& grid() const { return eps.grid(); }
  // Ca held in the three pools, mol
  double calcium_total() const;
};

// R = A_s(K1 a_H + K2 a_H2CO3 + K3)(a_Ca a_CO3/K_eq − 1)
double tst_rate(double a_H, double a_H2CO3, double a_Ca, double a_CO3, const KineticConstants& k);

// K₋₃ A_s a_Ca a_CO3 with intrinsic activities a = γC/ε, times ε back to bulk volume
inline double precipitation_rate(double ca, double co3, double eps, double A_s, const KineticConstants& k) {
  return k.K_minus3 * A_s * k.gamma_Ca * k.gamma_CO3 * ca * co3 / eps;
}
ScalarField<double> precipitation_rate(const ScalarField<double>& C_Ca, const ScalarField<double>& C_CO3,
                                       const PorosityField& eps, double A_s, const KineticConstants& k);

// P_ad = C(1 − ε*W)ε^m clamped to [0, 1]; `clamped` counts nodes pushed down from above 1
ScalarField<double> attachment_probability(const PorosityField& eps, const AttachmentSpec& spec,
                                           Index* clamped = nullptr);

ScalarField<double> crystallization_rate(const ScalarField<double>& C_precip, const ScalarField<double>& P_ad,
                                         const KineticConstants& k);

// mol/L for P in atm and K_H in L·atm/mol
double henry_concentration(double P_CO2, double K_H);

struct PorosityUpdate {
  double refunded = 0;  // mol returned to the precipitate pool
  Index clogged = 0;    // cells that reached ε₀ during this update
};

// ε ← ε − v·dC; an increment that would go below ε₀ is truncated and the
// excess stays in C_precip
PorosityUpdate update_porosity(ChemState& s, const ScalarField<double>& dC_crystal, const KineticConstants& k);

// mean |∇ε| with 2nd-order central differences, m⁻¹
double estimate_specific_area(const PorosityField& eps);

struct Dimensionless {
  double Pe = 0, Da_prec = 0, Da_crys = 0;
};
// L = √κ₀
Dimensionless dimensionless_numbers(double u_bar, double kappa0, double D_m, const KineticConstants& k);

struct ReactionReport {
  double precipitated = 0;  // mol moved into C_precip by R_prec
  double crystallized = 0;  // mol moved into C_crystal
  double refunded = 0;
  // mol added by clamping round-off negatives
  double clipped_co3 = 0, clipped_precip = 0, clipped_ca = 0;
  Index clogged = 0;
  Index pad_clamped = 0;
};

class Chemistry {
 public:
  Chemistry(const KineticConstants& k, const AttachmentSpec& a, const ChemOptions& o, const PseKernel& kernel);

  // sets A_s and the area reference from the current ε; reimposes held Ca
  void initialize(ChemState& s) const;
  // one RK2 step of the reaction-diffusion system
  ReactionReport step(ChemState& s, double dt) const;
  // largest dt meeting the explicit diffusion and reaction margins
  double stable_dt(const ChemState& s) const;

  const KineticConstants& constants() const { return k_; }
  const ChemOptions& options() const { return o_; }
  const AttachmentSpec& attachment() const { return a_; }
  const PseKernel& kernel() const { return kernel_; }

 private:
  struct Rates;
  void rates(const ChemState& s, const ScalarField<double>& co3, const ScalarField<double>& ca,
             const ScalarField<double>& cp, const PorosityField& eps, Rates& r) const;
  double area_for(const ChemState& s, const PorosityField& eps) const;

  KineticConstants k_;
  AttachmentSpec a_;
  ChemOptions o_;
  PseKernel kernel_;
};

}  // namespace porecrys
