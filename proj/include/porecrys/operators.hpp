#pragma once

#include "porecrys/fft.hpp"
#include "porecrys/fields.hpp"

namespace porecrys {

namespace detail {

// 4th-order centered first derivative along `axis` at node n
template <class Scalar, class Col>
inline Scalar d4(const Grid& g, const Col& f, int i, int j, int k, int axis) {
  std::array<int, 3> p{i, j, k};
  auto at = [&](int off) {
    auto q = p;
    q[axis] += off;
    return f(g.index_wrapped(q[0], q[1], q[2]));
  };
  return (Scalar(8) * (at(1) - at(-1)) - (at(2) - at(-2))) / Scalar(12 * g.h);
}

template <class F>
void for_each_node(const Grid& g, F&& f) {
#pragma omp parallel for schedule(static)
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j)
      for (int i = 0; i < g.dims[0]; ++i) f(i, j, k, g.index(i, j, k));
}

}  // namespace detail

template <class Scalar>
VectorField<Scalar> curl(const VectorField<Scalar>& v) {
  const Grid& g = v.grid;
  g.require_periodic("curl");
  VectorField<Scalar> out(g);
  const auto vx = v.comp(0), vy = v.comp(1), vz = v.comp(2);
  detail::for_each_node(g, [&](int i, int j, int k, Index n) {
    using detail::d4;
    out.data(n, 0) = d4<Scalar>(g, vz, i, j, k, 1) - d4<Scalar>(g, vy, i, j, k, 2);
    out.data(n, 1) = d4<Scalar>(g, vx, i, j, k, 2) - d4<Scalar>(g, vz, i, j, k, 0);
    out.data(n, 2) = d4<Scalar>(g, vy, i, j, k, 0) - d4<Scalar>(g, vx, i, j, k, 1);
  });
  return out;
}

template <class Scalar>
VectorField<Scalar> gradient(const ScalarField<Scalar>& f) {
  const Grid& g = f.grid;
  g.require_periodic("gradient");
  VectorField<Scalar> out(g);
  detail::for_each_node(g, [&](int i, int j, int k, Index n) {
    for (int a = 0; a < 3; ++a) out.data(n, a) = detail::d4<Scalar>(g, f.data, i, j, k, a);
  });
  return out;
}

template <class Scalar>
ScalarField<Scalar> divergence(const VectorField<Scalar>& v) {
  const Grid& g = v.grid;
  g.require_periodic("divergence");
  ScalarField<Scalar> out(g);
  detail::for_each_node(g, [&](int i, int j, int k, Index n) {
    Scalar s = 0;
    for (int a = 0; a < 3; ++a) s += detail::d4<Scalar>(g, v.comp(a), i, j, k, a);
    out[n] = s;
  });
  return out;
}

// 2nd-order central gradient magnitude
template <class Scalar>
ScalarField<Scalar> gradient_magnitude_2nd(const ScalarField<Scalar>& f) {
  const Grid& g = f.grid;
  g.require_periodic("gradient");
  ScalarField<Scalar> out(g);
  detail::for_each_node(g, [&](int i, int j, int k, Index n) {
    const Scalar gx = f.data[g.index_wrapped(i + 1, j, k)] - f.data[g.index_wrapped(i - 1, j, k)];
    const Scalar gy = f.data[g.index_wrapped(i, j + 1, k)] - f.data[g.index_wrapped(i, j - 1, k)];
    const Scalar gz = f.data[g.index_wrapped(i, j, k + 1)] - f.data[g.index_wrapped(i, j, k - 1)];
    out[n] = std::sqrt(gx * gx + gy * gy + gz * gz) / Scalar(2 * g.h);
  });
  return out;
}

// ε*W: separable (δ₋₁+δ₀+δ₁)/3 along each axis
template <class Scalar>
ScalarField<Scalar> convolve_w(const ScalarField<Scalar>& f) {
  const Grid& g = f.grid;
  g.require_periodic("convolve_w");
  ScalarField<Scalar> a = f, b(g);
  for (int axis = 0; axis < 3; ++axis) {
    detail::for_each_node(g, [&](int i, int j, int k, Index n) {
      std::array<int, 3> p{i, j, k}, q = p;
      p[axis] -= 1;
      q[axis] += 1;
      b[n] = (a[g.index_wrapped(p[0], p[1], p[2])] + a[n] + a[g.index_wrapped(q[0], q[1], q[2])]) /
             Scalar(3);
    });
    std::swap(a.data, b.data);
  }
  a.units = f.units;
  return a;
}

inline ScalarField<double> convolve_w(const PorosityField& e) { return convolve_w(e.eps); }

// Multiplies every mode by symbol(k²); the k = 0 mode is handled by the symbol.
template <class Scalar, class Symbol>
void apply_spectral(ScalarField<Scalar>& f, Fft3<Scalar>& fft, Symbol&& symbol) {
  typename Fft3<Scalar>::Spectrum s;
  fft.forward(f.data, s);
  fft.for_each_mode([&](Index m, int i, int j, int l) { s[m] *= symbol(fft.k2(i, j, l)); });
  fft.inverse_inplace(s, f.data);
}

// −Δ out = rhs − mean(rhs), zero-mean result
template <class Scalar>
ScalarField<Scalar> solve_poisson(const ScalarField<Scalar>& rhs) {
  rhs.grid.require_periodic("solve_poisson");
  Fft3<Scalar> fft(rhs.grid);
  ScalarField<Scalar> out = rhs;
  apply_spectral(out, fft, [](Scalar k2) { return k2 > 0 ? Scalar(1) / k2 : Scalar(0); });
  return out;
}

template <class Scalar>
VectorField<Scalar> solve_poisson(const VectorField<Scalar>& rhs) {
  VectorField<Scalar> out(rhs.grid, rhs.units);
  for (int c = 0; c < 3; ++c) out.set_component(c, solve_poisson(rhs.component(c)));
  return out;
}

// (I − coef Δ) out = rhs
template <class Scalar>
ScalarField<Scalar> solve_helmholtz(const ScalarField<Scalar>& rhs, double coef) {
  if (!(coef >= 0)) throw ParameterError("solve_helmholtz: coefficient must be >= 0");
  rhs.grid.require_periodic("solve_helmholtz");
  if (coef == 0) return rhs;
  Fft3<Scalar> fft(rhs.grid);
  ScalarField<Scalar> out = rhs;
  apply_spectral(out, fft, [&](Scalar k2) { return Scalar(1) / (Scalar(1) + Scalar(coef) * k2); });
  return out;
}

template <class Scalar>
VectorField<Scalar> solve_helmholtz(const VectorField<Scalar>& rhs, double coef) {
  VectorField<Scalar> out(rhs.grid, rhs.units);
  for (int c = 0; c < 3; ++c) out.set_component(c, solve_helmholtz(rhs.component(c), coef));
  return out;
}

// −Δ with the continuous symbol |k|²
template <class Scalar>
ScalarField<Scalar> neg_laplacian_spectral(const ScalarField<Scalar>& f) {
  Fft3<Scalar> fft(f.grid);
  ScalarField<Scalar> out = f;
  apply_spectral(out, fft, [](Scalar k2) { return k2; });
  return out;
}

// i k · v̂ evaluated back in physical space
template <class Scalar>
ScalarField<Scalar> divergence_spectral(const VectorField<Scalar>& v) {
  Fft3<Scalar> fft(v.grid);
  using C = typename Fft3<Scalar>::Complex;
  typename Fft3<Scalar>::Spectrum acc(size_t(fft.spectrum_size()), C(0)), s;
  for (int a = 0; a < 3; ++a) {
    fft.forward(v.comp(a), s);
    fft.for_each_mode([&](Index m, int i, int j, int l) {
      const int idx[3] = {i, j, l};
      acc[m] += C(0, fft.k_odd(a, idx[a])) * s[m];
    });
  }
  ScalarField<Scalar> out(v.grid);
  fft.inverse_inplace(acc, out.data);
  return out;
}

// i k × v̂ back in physical space (Nyquist dropped); divergence-free and
// zero-mean to round-off
template <class Scalar>
VectorField<Scalar> curl_spectral(const VectorField<Scalar>& v) {
  Fft3<Scalar> fft(v.grid);
  using C = typename Fft3<Scalar>::Complex;
  std::array<typename Fft3<Scalar>::Spectrum, 3> s;
  for (int a = 0; a < 3; ++a) fft.forward(v.comp(a), s[a]);
  std::array<typename Fft3<Scalar>::Spectrum, 3> o;
  for (auto& x : o) x.assign(s[0].size(), C(0));
  fft.for_each_mode([&](Index m, int i, int j, int l) {
    const C kx(0, fft.k_odd(0, i)), ky(0, fft.k_odd(1, j)), kz(0, fft.k_odd(2, l));
    o[0][m] = ky * s[2][m] - kz * s[1][m];
    o[1][m] = kz * s[0][m] - kx * s[2][m];
    o[2][m] = kx * s[1][m] - ky * s[0][m];
  });
  VectorField<Scalar> out(v.grid);
  for (int a = 0; a < 3; ++a) fft.inverse_inplace(o[a], out.comp(a));
  return out;
}

}  // namespace porecrys
