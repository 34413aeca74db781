#include "porecrys/hydro.hpp"

#include "porecrys/fft.hpp"
#include "porecrys/operators.hpp"

#include <Eigen/QR>

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace porecrys {

void FlowParams::validate() const {
  if (!(mu > 0)) throw ParameterError("flow: mu must be > 0");
  if (!(kappa_b > 0)) throw ParameterError("flow: kappa_b must be > 0");
  if (!(tol > 0)) throw ParameterError("flow: tol must be > 0");
  if (!(dt_pseudo >= 0)) throw ParameterError("flow: dt_pseudo must be > 0");
  if (max_iters < 1) throw ParameterError("flow: max_iters must be >= 1");
  if (anderson_depth < 1) throw ParameterError("flow: anderson_depth must be >= 1");
}

VectorField<double> FlowState::total_velocity() const {
  VectorField<double> t = u;
  for (int c = 0; c < 3; ++c) t.data.col(c) += u_bar[c];
  return t;
}

VectorField<double> brinkman_step(const VectorField<double>& u, const PorosityField& eps, const FlowParams& p) {
  const double mdt = p.mu * p.pseudo_step(u.grid.h);
  VectorField<double> out(u.grid, u.units);
  for (Index n = 0; n < u.size(); ++n) {
    const double damp = std::exp(-mdt * brinkman_lambda(eps[n], p.kappa_b));
    for (int c = 0; c < 3; ++c)
      out.data(n, c) = damp == 1 ? u.data(n, c) : damp * (u.data(n, c) + p.u_bar[c]) - p.u_bar[c];
  }
  return out;
}

VectorField<double> vorticity_of(const VectorField<double>& u_total) { return curl(u_total); }

VectorField<double> diffuse_vorticity(const VectorField<double>& u, const FlowParams& p) {
  VectorField<double> t = u;
  for (int c = 0; c < 3; ++c) t.data.col(c) += p.u_bar[c];
  return solve_helmholtz(curl(t), p.mu * p.pseudo_step(u.grid.h));
}

VectorField<double> project(const VectorField<double>& omega, VectorField<double>* psi) {
  VectorField<double> ps = solve_poisson(omega);
  VectorField<double> u = curl_spectral(ps);
  if (psi) *psi = std::move(ps);
  return u;
}

namespace {

using Spectrum = Fft3<double>::Spectrum;
using Complex = Fft3<double>::Complex;

// The composed map Π D_ω Λ with the FD curl, the Helmholtz and Poisson
// inverses and the spectral curl fused into one multiplier per mode.
class DbsMap {
 public:
  DbsMap(const PorosityField& eps, const FlowParams& p)
      : g_(eps.grid()), fft_(g_), ubar_(p.u_bar), damp_(g_.size()) {
    const double mdt = p.mu * p.pseudo_step(g_.h);
    mdt_ = mdt;
    for (Index n = 0; n < g_.size(); ++n) damp_[n] = std::exp(-mdt * brinkman_lambda(eps[n], p.kappa_b));
    for (int a = 0; a < 3; ++a) {
      kfd_[a].resize(size_t(g_.dims[a]));
      for (int m = 0; m < g_.dims[a]; ++m) {
        const double kh = fft_.k(a, m) * g_.h;
        kfd_[a][size_t(m)] = (8 * std::sin(kh) - std::sin(2 * kh)) / (6 * g_.h);
      }
    }
  }

  // out = G(u); also keeps the last ω̂ and ψ̂ when `keep` is set
  void apply(const Eigen::ArrayXXd& u, Eigen::ArrayXXd& out, bool keep = false) {
    const Index N = g_.size();
    Eigen::ArrayXd w(N);
    for (int c = 0; c < 3; ++c) {
      w = damp_ * (u.col(c) + ubar_[c]) - ubar_[c];
      fft_.forward(w, s_[size_t(c)]);
    }
    for (auto& x : o_) x.resize(s_[0].size());
    if (keep)
      for (auto& x : psi_) x.resize(s_[0].size());
    fft_.for_each_mode([&](Index m, int i, int j, int l) {
      const double k2 = fft_.k2(i, j, l);
      if (k2 == 0) {
        for (int c = 0; c < 3; ++c) {
          o_[size_t(c)][m] = 0;
          if (keep) psi_[size_t(c)][m] = 0;
        }
        return;
      }
      // ω̂ = i k̃ × ŵ / (1 + μδt k²)
      const Complex ax(0, kfd_[0][size_t(i)]), ay(0, kfd_[1][size_t(j)]), az(0, kfd_[2][size_t(l)]);
      const double hel = 1.0 / (1.0 + mdt_ * k2);
      const Complex wx = (ay * s_[2][m] - az * s_[1][m]) * hel;
      const Complex wy = (az * s_[0][m] - ax * s_[2][m]) * hel;
      const Complex wz = (ax * s_[1][m] - ay * s_[0][m]) * hel;
      // ψ̂ = ω̂/k², û = i k × ψ̂
      const Complex px = wx / k2, py = wy / k2, pz = wz / k2;
      const Complex bx(0, fft_.k_odd(0, i)), by(0, fft_.k_odd(1, j)), bz(0, fft_.k_odd(2, l));
      o_[0][m] = by * pz - bz * py;
      o_[1][m] = bz * px - bx * pz;
      o_[2][m] = bx * py - by * px;
      if (keep) {
        psi_[0][m] = px;
        psi_[1][m] = py;
        psi_[2][m] = pz;
      }
    });
    out.resize(N, 3);
    for (int c = 0; c < 3; ++c) fft_.inverse_inplace(o_[size_t(c)], out.col(c));
  }

  void fill_psi_omega(VectorField<double>& psi, VectorField<double>& omega) {
    psi = VectorField<double>(g_, "m^2/s");
    omega = VectorField<double>(g_, "1/s");
    std::array<Spectrum, 3> om;
    for (int c = 0; c < 3; ++c) om[size_t(c)] = psi_[size_t(c)];
    fft_.for_each_mode([&](Index m, int i, int j, int l) {
      const double k2 = fft_.k2(i, j, l);
      for (int c = 0; c < 3; ++c) om[size_t(c)][m] *= k2;
    });
    for (int c = 0; c < 3; ++c) {
      fft_.inverse_inplace(psi_[size_t(c)], psi.comp(c));
      fft_.inverse_inplace(om[size_t(c)], omega.comp(c));
    }
  }

 private:
  Grid g_;
  Fft3<double> fft_;
  Vec3 ubar_;
  Eigen::ArrayXd damp_;
  double mdt_ = 0;
  std::array<std::vector<double>, 3> kfd_;
  std::array<Spectrum, 3> s_, o_, psi_;
};

double l2(const Eigen::ArrayXXd& a) {
  return std::sqrt(det_sum(a.rows(), [&](Index n) { return a.row(n).square().sum(); }));
}

}  // namespace

FlowState solve_dbs(const PorosityField& eps, const FlowParams& p, const FlowState* warm,
                    const ResidualTrace& trace) {
  p.validate();
  const Grid& g = eps.grid();
  g.require_periodic("solve_dbs");
  DbsMap G(eps, p);
  const Index N = g.size();
  const double ubar_norm = std::sqrt(double(N)) * std::sqrt(p.u_bar[0] * p.u_bar[0] + p.u_bar[1] * p.u_bar[1] +
                                                            p.u_bar[2] * p.u_bar[2]);

  Eigen::ArrayXXd u = Eigen::ArrayXXd::Zero(N, 3), gu;
  if (warm && warm->u.grid == g && warm->u_bar == p.u_bar) u = warm->u.data;

  FlowState st;
  st.u_bar = p.u_bar;
  // Anderson history of residual and map differences, flattened
  std::deque<Eigen::VectorXd> dF, dG;
  Eigen::VectorXd f_prev, g_prev;

  bool converged = false;
  int it = 0;
  double res = 0;
  for (it = 1; it <= p.max_iters; ++it) {
    G.apply(u, gu);
    const double scale = std::max({l2(u), ubar_norm, 1e-300});
    res = l2(gu - u) / scale;
    st.residual_history.push_back(res);
    if (trace) trace(it, res);
    if (res < p.tol) {
      u = gu;
      converged = true;
      break;
    }
    if (p.accel == Acceleration::None) {
      u.swap(gu);
      continue;
    }
    Eigen::Map<const Eigen::VectorXd> gv(gu.data(), 3 * N), uv(u.data(), 3 * N);
    Eigen::VectorXd f = gv - uv;
    if (f_prev.size()) {
      dF.push_back(f - f_prev);
      dG.push_back(gv - g_prev);
      if (int(dF.size()) > p.anderson_depth) {
        dF.pop_front();
        dG.pop_front();
      }
    }
    f_prev = f;
    g_prev = gv;
    Eigen::VectorXd next = gv;
    if (!dF.empty()) {
      const Index m = Index(dF.size());
      Eigen::MatrixXd A(m, m);
      Eigen::VectorXd b(m);
      for (Index i = 0; i < m; ++i) {
        b[i] = dF[size_t(i)].dot(f);
        for (Index j = 0; j <= i; ++j) A(i, j) = A(j, i) = dF[size_t(i)].dot(dF[size_t(j)]);
      }
      const Eigen::VectorXd gamma = A.colPivHouseholderQr().solve(b);
      if (gamma.allFinite())
        for (Index i = 0; i < m; ++i) next -= gamma[i] * dG[size_t(i)];
    }
    u = Eigen::Map<Eigen::ArrayXXd>(next.data(), N, 3);
  }
  st.iterations = std::min(it, p.max_iters);
  st.residual = res;
  if (!converged)
    throw ConvergenceError("solve_dbs: no convergence after " + std::to_string(p.max_iters) +
                               " iterations (residual " + std::to_string(res) + ")",
                           res, p.max_iters);
  // one more application to recover ψ and ω of the fixed point
  G.apply(u, gu, true);
  st.u = VectorField<double>(g, "m/s");
  st.u.data = gu;
  G.fill_psi_omega(st.psi, st.omega);
  return st;
}

namespace {

// Drag coefficient the split fixed point actually applies: one Brinkman
// sub-step removes a fraction 1 − e^{−μδtλ} per pseudo-step, so stiff cells
// saturate at 1/(μδt) instead of λ. The background λ_min, which the uniform
// forcing balances exactly, carries the 1/ε of K_ε⁻¹ = λ/ε; the excess is
// counted as the scheme dissipates it, so the O(δt) leak into stiff solid
// costs what it really costs and no more.
Eigen::ArrayXd drag_coefficient(const PorosityField& eps, const FlowParams& p) {
  const Grid& g = eps.grid();
  const double mdt = p.mu * p.pseudo_step(g.h);
  Eigen::ArrayXd lam(g.size());
  for (Index n = 0; n < g.size(); ++n) lam[n] = brinkman_lambda(eps[n], p.kappa_b);
  const double lmin = lam.minCoeff();
  for (Index n = 0; n < g.size(); ++n) {
    const double x = mdt * (lam[n] - lmin);
    lam[n] = lmin / eps[n] + (x > 1e-8 ? -std::expm1(-x) / mdt : lam[n] - lmin);
  }
  return lam;
}

int window_end(const Grid& g, Window w) { return w == Window::Full ? g.dims[0] : std::max(1, g.dims[0] / 4); }

}  // namespace

Dissipation dissipation(const FlowState& s, const PorosityField& eps, const FlowParams& p, Window w) {
  const Grid& g = eps.grid();
  const auto v = s.total_velocity();
  const auto kinv = drag_coefficient(eps, p);
  std::array<VectorField<double>, 3> grad;
  for (int c = 0; c < 3; ++c) grad[size_t(c)] = gradient(v.component(c));
  const int imax = window_end(g, w);
  auto in_window = [&](Index n) { return int(n % g.dims[0]) < imax; };
  Dissipation d;
  d.viscous = det_sum(g.size(), [&](Index n) {
    if (!in_window(n)) return 0.0;
    double dd = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double e = 0.5 * (grad[size_t(a)].data(n, b) + grad[size_t(b)].data(n, a));
        dd += e * e;
      }
    return 2 * p.mu * dd;
  }) * g.cell_volume();
  d.drag = det_sum(g.size(), [&](Index n) {
    if (!in_window(n)) return 0.0;
    return p.mu * kinv[n] * v.data.row(n).square().sum();
  }) * g.cell_volume();
  const Vec3 m = v.mean();
  d.flux2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
  return d;
}

double estimate_permeability(const FlowState& s, const PorosityField& eps, const FlowParams& p, Window w) {
  const Grid& g = eps.grid();
  const double ub2 = p.u_bar[0] * p.u_bar[0] + p.u_bar[1] * p.u_bar[1] + p.u_bar[2] * p.u_bar[2];
  if (ub2 == 0) throw UndefinedPermeabilityError("estimate_permeability: zero mean flow, permeability undefined");
  const auto d = dissipation(s, eps, p, w);
  const double total = d.viscous + d.drag;
  // dissipation scaled back to the prescribed flux
  const double ratio = d.flux2 > 0 ? ub2 / d.flux2 : 0.0;
  if (!(total * ratio >= 1e-30))
    throw UndefinedPermeabilityError("estimate_permeability: dissipation vanishes, permeability undefined");
  const double vol = double(window_end(g, w)) * g.dims[1] * g.dims[2] * g.cell_volume();
  return p.mu * d.flux2 * vol / total;
}

}  // namespace porecrys
