#pragma once

#include "porecrys/fields.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace porecrys {

// Stencil generator Θ(s) = 1/(1+|s|^p) on the lattice s = j·h/ξ, |j|∞ <= r_c.
// The h³ quadrature weight is folded into ξ-units as (h/ξ)³, so the moments
// are ξ-independent for ξ = h and the operator carries the 1/ξ² left over
// from (1/ξ⁷)·ξ²·h³.
struct PseKernel {
  double h = 1;
  double xi = 1;
  int p = 10;
  int cutoff = 2;
  double gamma1 = 0, gamma2 = 0, c0 = 0, c1 = 0;

  struct Offset {
    int d[3];
    double s[3];
    double s2;
    double w;  // Θ(s)·(h/ξ)³/ξ²
  };
  std::vector<Offset> offsets;

  double theta(double r) const { return 1.0 / (1.0 + std::pow(r, p)); }
  // off-diagonal factor of H: H_ij = h_factor()·L_ij
  double h_factor() const { return (gamma1 - 3 * gamma2) / (gamma2 * (gamma1 - gamma2)); }
  double isotropic_factor() const { return c0 - 3 * c1; }
};

inline PseKernel make_pse_kernel(double h, double xi, int p = 10, int cutoff = 2) {
  if (!(h > 0) || !(xi > 0)) throw KernelError("pse: h and xi must be positive");
  if (cutoff < 1) throw KernelError("pse: cutoff radius must be >= 1");
  if (p < 1) throw KernelError("pse: exponent p must be >= 1");
  PseKernel k;
  k.h = h;
  k.xi = xi;
  k.p = p;
  k.cutoff = cutoff;
  const double ratio = h / xi, vol = ratio * ratio * ratio;
  double g1 = 0, g2 = 0;
  for (int c = -cutoff; c <= cutoff; ++c)
    for (int b = -cutoff; b <= cutoff; ++b)
      for (int a = -cutoff; a <= cutoff; ++a) {
        if (a == 0 && b == 0 && c == 0) continue;
        PseKernel::Offset o{{a, b, c}, {a * ratio, b * ratio, c * ratio}, 0, 0};
        o.s2 = o.s[0] * o.s[0] + o.s[1] * o.s[1] + o.s[2] * o.s[2];
        const double th = k.theta(std::sqrt(o.s2));
        g1 += std::pow(o.s[0], 4) * th * vol;
        g2 += o.s[0] * o.s[0] * o.s[1] * o.s[1] * th * vol;
        o.w = th * vol / (xi * xi);
        k.offsets.push_back(o);
      }
  const double den = g1 * g1 + g1 * g2 - 2 * g2 * g2;
  if (!(g1 > 0) || !(g2 > 0) || !(den > 0) || !(g1 != g2))
    throw KernelError("pse: degenerate moment denominator");
  k.gamma1 = g1;
  k.gamma2 = g2;
  k.c0 = 2 * (g1 + 2 * g2) / den;
  k.c1 = 2 * g2 / den;
  return k;
}

namespace detail {

struct WrapTable {
  // idx[a][i + r] = wrapped coordinate of i + (offset) along axis a, offset in [-r, r]
  std::array<std::vector<int>, 3> t;
  int r, width;
  WrapTable(const Grid& g, int r) : r(r), width(2 * r + 1) {
    for (int a = 0; a < 3; ++a) {
      t[a].resize(size_t(g.dims[a]) * width);
      for (int i = 0; i < g.dims[a]; ++i)
        for (int o = -r; o <= r; ++o) t[a][size_t(i) * width + o + r] = g.wrap(i + o, a);
    }
  }
  int at(int a, int i, int o) const { return t[a][size_t(i) * width + o + r]; }
};

}  // namespace detail

// Symmetric 3x3 per node, stored (xx, yy, zz, xy, xz, yz).
using TensorField = Eigen::Array<double, Eigen::Dynamic, 6>;

// Q^ξ f = Σ_l (f_l − f_k) Θ M:ss w, M = (m_k + m_l)/2, m = c0 L − c1 Tr(L) I + H
template <class Scalar>
ScalarField<Scalar> pse_apply(const ScalarField<Scalar>& f, const TensorField& L, const PseKernel& k) {
  const Grid& g = f.grid;
  g.require_periodic("pse_apply");
  if (L.rows() != g.size()) throw ParameterError("pse_apply: tensor field size mismatch");
  TensorField m(g.size(), 6);
  const double hf = k.h_factor();
  for (Index n = 0; n < g.size(); ++n) {
    const double tr = L(n, 0) + L(n, 1) + L(n, 2);
    for (int d = 0; d < 3; ++d) m(n, d) = k.c0 * L(n, d) - k.c1 * tr;
    for (int d = 3; d < 6; ++d) m(n, d) = (k.c0 + hf) * L(n, d);
  }
  const detail::WrapTable wt(g, k.cutoff);
  ScalarField<Scalar> out(g);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < g.dims[2]; ++c)
    for (int b = 0; b < g.dims[1]; ++b)
      for (int a = 0; a < g.dims[0]; ++a) {
        const Index n = g.index(a, b, c);
        const double fk = double(f[n]);
        double acc = 0;
        for (const auto& o : k.offsets) {
          const Index l = g.index(wt.at(0, a, o.d[0]), wt.at(1, b, o.d[1]), wt.at(2, c, o.d[2]));
          const double* s = o.s;
          double q = 0;
          for (int d = 0; d < 3; ++d) q += 0.5 * (m(n, d) + m(l, d)) * s[d] * s[d];
          q += (m(n, 3) + m(l, 3)) * s[0] * s[1];
          q += (m(n, 4) + m(l, 4)) * s[0] * s[2];
          q += (m(n, 5) + m(l, 5)) * s[1] * s[2];
          acc += (double(f[l]) - fk) * o.w * q;
        }
        out[n] = Scalar(acc);
      }
  return out;
}

inline TensorField isotropic_tensor(const ScalarField<double>& alpha) {
  TensorField L = TensorField::Zero(alpha.size(), 6);
  for (int d = 0; d < 3; ++d) L.col(d) = alpha.data;
  return L;
}

// Isotropic specialization: weight (c0 − 3c1)/2 · (α_k + α_l)·|s|².
template <class Scalar>
ScalarField<Scalar> pse_apply_isotropic(const ScalarField<Scalar>& f, const ScalarField<double>& alpha,
                                        const PseKernel& k) {
  const Grid& g = f.grid;
  g.require_periodic("pse_apply");
  const detail::WrapTable wt(g, k.cutoff);
  const double cf = 0.5 * k.isotropic_factor();
  ScalarField<Scalar> out(g);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < g.dims[2]; ++c)
    for (int b = 0; b < g.dims[1]; ++b)
      for (int a = 0; a < g.dims[0]; ++a) {
        const Index n = g.index(a, b, c);
        const double fk = double(f[n]), ak = alpha[n];
        double acc = 0;
        for (const auto& o : k.offsets) {
          const Index l = g.index(wt.at(0, a, o.d[0]), wt.at(1, b, o.d[1]), wt.at(2, c, o.d[2]));
          acc += (double(f[l]) - fk) * (ak + alpha[l]) * o.w * o.s2;
        }
        out[n] = Scalar(cf * acc);
      }
  return out;
}

enum class DiffusionKind { IsotropicScalar, ArchieSuperficial };

struct DiffusionSpec {
  DiffusionKind kind = DiffusionKind::ArchieSuperficial;
  double D_m = 1e-9;
  double eta = 1.0;

  void validate() const {
    if (!(D_m > 0)) throw ParameterError("diffusion: D_m must be > 0");
    if (!(eta >= 0)) throw ParameterError("diffusion: eta must be >= 0");
  }
};

// Precomputed Archie pair data for a fixed ε: lets several species share the
// neighbour walk. Applies D_m·div(ε^{1+η} ∇(C/ε)).
class ArchieOperator {
 public:
  ArchieOperator(const ScalarField<double>& eps, const DiffusionSpec& spec, const PseKernel& k)
      : g_(eps.grid), k_(k), wt_(eps.grid, k.cutoff), inv_eps_(eps.data.inverse()),
        a_(eps.data.pow(1.0 + spec.eta)), scale_(spec.D_m * 0.5 * k.isotropic_factor()) {
    spec.validate();
    g_.require_periodic("archie_apply");
  }

  // out_s = D_m·Q(C_s/ε) for each species s, in one pass
  void apply(const std::vector<const ScalarField<double>*>& C,
             const std::vector<ScalarField<double>*>& out, const std::vector<double>& dscale = {}) const {
    const size_t ns = C.size();
    std::vector<Eigen::ArrayXd> f(ns);
    for (size_t s = 0; s < ns; ++s) f[s] = C[s]->data * inv_eps_;
    for (size_t s = 0; s < ns; ++s)
      if (out[s]->grid.size() != g_.size()) *out[s] = ScalarField<double>(g_);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < g_.dims[2]; ++c) {
      double acc[8];
      for (int b = 0; b < g_.dims[1]; ++b)
        for (int a = 0; a < g_.dims[0]; ++a) {
          const Index n = g_.index(a, b, c);
          const double ak = a_[n];
          for (size_t s = 0; s < ns; ++s) acc[s] = 0;
          for (const auto& o : k_.offsets) {
            const Index l = g_.index(wt_.at(0, a, o.d[0]), wt_.at(1, b, o.d[1]), wt_.at(2, c, o.d[2]));
            const double w = (ak + a_[l]) * o.w * o.s2;
            for (size_t s = 0; s < ns; ++s) acc[s] += (f[s][l] - f[s][n]) * w;
          }
          for (size_t s = 0; s < ns; ++s)
            (*out[s])[n] = scale_ * (dscale.empty() ? 1.0 : dscale[s]) * acc[s];
        }
    }
  }

  ScalarField<double> apply(const ScalarField<double>& C) const {
    ScalarField<double> out(g_);
    apply({&C}, {&out});
    return out;
  }

  // Column sums of the exchange stiffness: max_l Σ_k D·coef_kl / ε_l.
  // Explicit stepping of dC/dt = A C is stable for dt <= 2/this (Gershgorin).
  double stiffness() const {
    return det_max(g_.size(), [&](Index n) {
      const auto c = g_.coords(n);
      double s = 0;
      for (const auto& o : k_.offsets) {
        const Index l = g_.index(wt_.at(0, c[0], o.d[0]), wt_.at(1, c[1], o.d[1]), wt_.at(2, c[2], o.d[2]));
        s += (a_[n] + a_[l]) * o.w * o.s2;
      }
      return 2.0 * scale_ * s * inv_eps_[n];
    });
  }

 private:
  Grid g_;
  PseKernel k_;
  detail::WrapTable wt_;
  Eigen::ArrayXd inv_eps_, a_;
  double scale_;
};

inline ScalarField<double> archie_apply(const ScalarField<double>& C, const PorosityField& eps,
                                        const DiffusionSpec& spec, const PseKernel& k) {
  return ArchieOperator(eps.eps, spec, k).apply(C);
}

}  // namespace porecrys
