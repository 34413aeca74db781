#include "porecrys/chemistry.hpp"

#include "porecrys/operators.hpp"

#include <cmath>
#include <limits>

namespace porecrys {

void KineticConstants::validate() const {
  if (!(K1 >= 0) || !(K2 >= 0)) throw ParameterError("kinetics: K1 and K2 must be >= 0");
  if (!(K3 >= 0)) throw ParameterError("kinetics: K3 must be >= 0");
  if (!(K_eq > 0)) throw ParameterError("kinetics: K_eq must be > 0");
  if (!(K_minus3 >= 0)) throw ParameterError("kinetics: K_minus3 must be >= 0");
  if (!(K_c >= 0)) throw ParameterError("kinetics: K_c must be >= 0");
  if (!(gamma_CO3 > 0) || !(gamma_Ca > 0)) throw ParameterError("kinetics: activity coefficients must be > 0");
  if (!(v_molar > 0)) throw ParameterError("kinetics: v_molar must be > 0");
  if (!(K_H > 0)) throw ParameterError("kinetics: K_H must be > 0");
  if (!(A_s >= 0)) throw ParameterError("kinetics: A_s must be >= 0");
}

ChemState::ChemState(const PorosityField& e, double co3, double ca, double a_s)
    : C_CO3(e.grid(), 0.0, "mol/m^3"),
      C_Ca(e.grid(), 0.0, "mol/m^3"),
      C_precip(e.grid(), 0.0, "mol/m^3"),
      C_crystal(e.grid(), 0.0, "mol/m^3"),
      eps(e),
      A_s(a_s) {
  // intrinsic inputs stored as superficial
  C_CO3.data = co3 * e.eps.data;
  C_Ca.data = ca * e.eps.data;
}

double ChemState::calcium_total() const {
  return det_sum(C_Ca.size(), [&](Index n) { return C_Ca[n] + C_precip[n] + C_crystal[n]; }) *
         grid().cell_volume();
}

double tst_rate(double a_H, double a_H2CO3, double a_Ca, double a_CO3, const KineticConstants& k) {
  return k.A_s * (k.K1 * a_H + k.K2 * a_H2CO3 + k.K3) * (a_Ca * a_CO3 / k.K_eq - 1);
}

ScalarField<double> precipitation_rate(const ScalarField<double>& C_Ca, const ScalarField<double>& C_CO3,
                                       const PorosityField& eps, double A_s, const KineticConstants& k) {
  ScalarField<double> r(eps.grid(), 0.0, "mol/m^3/s");
  for (Index n = 0; n < r.size(); ++n) r[n] = precipitation_rate(C_Ca[n], C_CO3[n], eps[n], A_s, k);
  return r;
}

ScalarField<double> attachment_probability(const PorosityField& eps, const AttachmentSpec& spec, Index* clamped) {
  if (spec.m_exponent < 0) throw ParameterError("attachment: m must be >= 0");
  const auto conv = convolve_w(eps);
  ScalarField<double> p(eps.grid(), 0.0, "1");
  for (Index n = 0; n < p.size(); ++n)
    p[n] = std::max(0.0, 1 - conv[n]) * std::pow(eps[n], spec.m_exponent);
  double c = 2 / (1 - eps.eps0);
  if (spec.norm == AttachmentNorm::DistributionOverDomain) {
    const double s = p.sum();
    c = s > 0 ? 1 / s : 0;
  }
  Index over = 0;
  for (Index n = 0; n < p.size(); ++n) {
    p[n] *= c;
    if (p[n] > 1) {
      p[n] = 1;
      ++over;
    }
  }
  if (clamped) *clamped = over;
  return p;
}

ScalarField<double> crystallization_rate(const ScalarField<double>& C_precip, const ScalarField<double>& P_ad,
                                         const KineticConstants& k) {
  ScalarField<double> r(C_precip.grid, 0.0, "mol/m^3/s");
  r.data = k.K_c * P_ad.data * C_precip.data;
  return r;
}

double henry_concentration(double P_CO2, double K_H) {
  if (!(P_CO2 >= 0)) throw ParameterError("henry: partial pressure must be >= 0");
  if (!(K_H > 0)) throw ParameterError("henry: K_H must be > 0");
  return P_CO2 / K_H;
}

PorosityUpdate update_porosity(ChemState& s, const ScalarField<double>& dC, const KineticConstants& k) {
  PorosityUpdate u;
  double refund = 0;
  for (Index n = 0; n < dC.size(); ++n) {
    if (dC[n] < 0) throw Error("update_porosity: negative crystal increment (no dissolution path)");
    if (dC[n] == 0) continue;
    const double e = s.eps.eps[n];
    const double room = std::max(0.0, (e - s.eps.eps0) / k.v_molar);
    double inc = dC[n];
    if (inc >= room) {
      if (inc > room) {
        refund += inc - room;
        s.C_precip[n] += inc - room;
      }
      inc = room;
      s.eps.eps[n] = s.eps.eps0;
      if (e > s.eps.eps0) ++u.clogged;  // cells already at ε₀ do not count again
    } else {
      s.eps.eps[n] = e - k.v_molar * inc;
    }
    s.C_crystal[n] += inc;
  }
  s.eps.clamp();
  u.refunded = refund * s.grid().cell_volume();
  return u;
}

double estimate_specific_area(const PorosityField& eps) { return gradient_magnitude_2nd(eps.eps).mean(); }

Dimensionless dimensionless_numbers(double u_bar, double kappa0, double D_m, const KineticConstants& k) {
  if (!(kappa0 > 0)) throw ParameterError("dimensionless numbers: kappa0 must be > 0");
  if (!(D_m > 0)) throw ParameterError("dimensionless numbers: D_m must be > 0");
  const double L = std::sqrt(kappa0);
  return {u_bar * L / D_m, k.K_minus3 * k.gamma_CO3 * k.A_s * kappa0 / D_m, k.K_c * kappa0 / D_m};
}

Chemistry::Chemistry(const KineticConstants& k, const AttachmentSpec& a, const ChemOptions& o, const PseKernel& kernel)
    : k_(k), a_(a), o_(o), kernel_(kernel) {
  k_.validate();
  o_.diffusion.validate();
  if (!(o_.Ca_held >= 0)) throw ParameterError("chemistry: held calcium must be >= 0");
}

double Chemistry::area_for(const ChemState& s, const PorosityField& eps) const {
  if (o_.area_policy == AreaPolicy::Fixed || !(s.area_ref > 0)) return k_.A_s;
  return k_.A_s * estimate_specific_area(eps) / s.area_ref;
}

void Chemistry::initialize(ChemState& s) const {
  s.area_ref = estimate_specific_area(s.eps);
  s.A_s = area_for(s, s.eps);
  if (o_.hold_calcium) s.C_Ca.data = o_.Ca_held * s.eps.eps.data;
}

struct Chemistry::Rates {
  ScalarField<double> co3, ca, cp, cs;  // time derivatives
  double prec = 0, crys = 0;           // integrated rates, mol/s
  Index pad_clamped = 0;
};

void Chemistry::rates(const ChemState& s, const ScalarField<double>& co3, const ScalarField<double>& ca,
                      const ScalarField<double>& cp, const PorosityField& eps, Rates& r) const {
  const Grid& g = eps.grid();
  r.co3 = ScalarField<double>(g);
  r.ca = ScalarField<double>(g);
  r.cp = ScalarField<double>(g);
  r.cs = ScalarField<double>(g);
  if (o_.diffuse) {
    const ArchieOperator D(eps.eps, o_.diffusion, kernel_);
    const double pf = o_.precip_diffusivity() / o_.diffusion.D_m;
    if (o_.hold_calcium)
      D.apply({&co3, &cp}, {&r.co3, &r.cp}, {1.0, pf});
    else
      D.apply({&co3, &ca, &cp}, {&r.co3, &r.ca, &r.cp}, {1.0, 1.0, pf});
  }
  const auto pad = attachment_probability(eps, a_, &r.pad_clamped);
  for (Index n = 0; n < g.size(); ++n) {
    const double rp = precipitation_rate(std::max(ca[n], 0.0), std::max(co3[n], 0.0), eps[n], s.A_s, k_);
    const double rc = k_.K_c * pad[n] * std::max(cp[n], 0.0);
    r.co3[n] -= rp;
    if (!o_.hold_calcium) r.ca[n] -= rp;
    r.cp[n] += rp - rc;
    r.cs[n] = rc;
  }
  const double cell = g.cell_volume();
  r.prec = det_sum(g.size(), [&](Index n) {
             return precipitation_rate(std::max(ca[n], 0.0), std::max(co3[n], 0.0), eps[n], s.A_s, k_);
           }) * cell;
  r.crys = r.cs.sum() * cell;
}

namespace {

// clamps round-off negatives; a real undershoot means dt is too large
double clip_negatives(ScalarField<double>& f, const char* name) {
  const double scale = std::max(f.max_abs(), 1e-300);
  double neg = 0;
  for (Index n = 0; n < f.size(); ++n) {
    if (f[n] >= 0) continue;
    if (f[n] < -1e-12 * scale)
      throw StabilityError(std::string("reaction_step: ") + name + " went negative (" + std::to_string(f[n]) +
                           "); reduce dt");
    neg -= f[n];
    f[n] = 0;
  }
  return neg * f.grid.cell_volume();
}

}  // namespace

ReactionReport Chemistry::step(ChemState& s, double dt) const {
  if (!(dt >= 0)) throw ParameterError("reaction_step: dt must be >= 0");
  ReactionReport rep;
  if (dt == 0) return rep;
  const Grid& g = s.grid();
  const Index N = g.size();

  Rates r1;
  rates(s, s.C_CO3, s.C_Ca, s.C_precip, s.eps, r1);

  // predictor, with ε moved by the predicted crystal
  ChemState p;
  p.eps = s.eps;
  p.A_s = s.A_s;
  p.C_CO3 = s.C_CO3;
  p.C_Ca = s.C_Ca;
  p.C_precip = s.C_precip;
  p.C_CO3.data += dt * r1.co3.data;
  p.C_precip.data += dt * r1.cp.data;
  p.eps.eps.data -= k_.v_molar * dt * r1.cs.data;
  p.eps.clamp();
  if (o_.hold_calcium)
    p.C_Ca.data = o_.Ca_held * p.eps.eps.data;
  else
    p.C_Ca.data += dt * r1.ca.data;

  Rates r2;
  rates(p, p.C_CO3, p.C_Ca, p.C_precip, p.eps, r2);

  const double h2 = 0.5 * dt;
  s.C_CO3.data += h2 * (r1.co3.data + r2.co3.data);
  s.C_precip.data += h2 * (r1.cp.data + r2.cp.data);
  if (!o_.hold_calcium) s.C_Ca.data += h2 * (r1.ca.data + r2.ca.data);
  ScalarField<double> dcs(g);
  dcs.data = h2 * (r1.cs.data + r2.cs.data);

  // the crystal increment left C_precip above; update_porosity refunds what cannot fit
  rep.clipped_co3 = clip_negatives(s.C_CO3, "C_CO3");
  rep.clipped_precip = clip_negatives(s.C_precip, "C_precip");
  if (!o_.hold_calcium) rep.clipped_ca = clip_negatives(s.C_Ca, "C_Ca");
  for (Index n = 0; n < N; ++n) dcs[n] = std::max(dcs[n], 0.0);
  const auto pu = update_porosity(s, dcs, k_);
  if (o_.hold_calcium) s.C_Ca.data = o_.Ca_held * s.eps.eps.data;
  s.A_s = area_for(s, s.eps);

  rep.precipitated = h2 * (r1.prec + r2.prec);
  rep.crystallized = dcs.sum() * g.cell_volume() - pu.refunded;
  rep.refunded = pu.refunded;
  rep.clogged = pu.clogged;
  rep.pad_clamped = std::max(r1.pad_clamped, r2.pad_clamped);
  return rep;
}

double Chemistry::stable_dt(const ChemState& s) const {
  double dt = std::numeric_limits<double>::infinity();
  if (o_.diffuse) {
    const ArchieOperator D(s.eps.eps, o_.diffusion, kernel_);
    const double pf = std::max(1.0, o_.precip_diffusivity() / o_.diffusion.D_m);
    const double rho = D.stiffness() * pf;
    if (rho > 0) dt = std::min(dt, 0.9 * 2 / rho);
  }
  const auto pad = attachment_probability(s.eps, a_);
  const double pmax = pad.max_abs();
  // intrinsic Ca sets the linear precipitation rate of CO₃
  const double camax = det_max(s.C_Ca.size(), [&](Index n) { return std::max(s.C_Ca[n], 0.0) / s.eps[n]; });
  const double co3max = det_max(s.C_CO3.size(), [&](Index n) { return std::max(s.C_CO3[n], 0.0) / s.eps[n]; });
  const double kr = k_.K_minus3 * k_.gamma_Ca * k_.gamma_CO3 * s.A_s;
  const double rate = std::max({k_.K_c * pmax, kr * camax, o_.hold_calcium ? 0.0 : kr * co3max});
  if (rate > 0) dt = std::min(dt, 0.1 / rate);
  return dt;
}

}  // namespace porecrys
