#pragma once

#include "porecrys/fields.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <vector>

namespace porecrys {

// Real-to-half-complex 3D transform built from 1D Eigen::FFT passes.
// Spectrum layout: (nx/2+1) x ny x nz, kx fastest. inverse() is normalized.
template <class Scalar>
class Fft3 {
 public:
  using Complex = std::complex<Scalar>;
  using Spectrum = std::vector<Complex>;

  explicit Fft3(const Grid& g) : g_(g), nxh_(g.dims[0] / 2 + 1) {
    g.require_periodic("fft");
    fx_.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
    for (int a = 0; a < 3; ++a) {
      const int n = g.dims[a];
      k_[a].resize(n);
      kodd_[a].resize(n);
      for (int m = 0; m < n; ++m) {
        const int s = m <= n / 2 ? m : m - n;
        k_[a][m] = Scalar(2 * std::numbers::pi * s / g.length(a));
        kodd_[a][m] = (n % 2 == 0 && m == n / 2) ? Scalar(0) : k_[a][m];
      }
    }
  }

  const Grid& grid() const { return g_; }
  Index spectrum_size() const { return Index(nxh_) * g_.dims[1] * g_.dims[2]; }
  int nxh() const { return nxh_; }

  // wavenumber of spectral index m along axis a; `odd` drops the Nyquist mode
  Scalar k(int a, int m) const { return k_[a][m]; }
  Scalar k_odd(int a, int m) const { return kodd_[a][m]; }
  Scalar k2(int i, int j, int l) const {
    return k_[0][i] * k_[0][i] + k_[1][j] * k_[1][j] + k_[2][l] * k_[2][l];
  }

  template <class In>
  void forward(const In& in, Spectrum& out) {
    const int nx = g_.dims[0], ny = g_.dims[1], nz = g_.dims[2];
    out.resize(size_t(spectrum_size()));
    rbuf_.resize(nx);
    cbuf_.resize(nxh_);
    for (int l = 0; l < nz; ++l)
      for (int j = 0; j < ny; ++j) {
        const Index base = g_.index(0, j, l);
        for (int i = 0; i < nx; ++i) rbuf_[i] = in(base + i);
        fx_.fwd(cbuf_.data(), rbuf_.data(), nx);
        std::copy(cbuf_.begin(), cbuf_.end(), out.begin() + sidx(0, j, l));
      }
    complex_pass(out, 1, false);
    complex_pass(out, 2, false);
  }

  template <class Out>
  void inverse(Spectrum spec, Out&& out) {
    inverse_inplace(spec, out);
  }

  // destroys `spec`; `out` is any writable vector expression
  template <class Out>
  void inverse_inplace(Spectrum& spec, Out&& out) {
    const int nx = g_.dims[0], ny = g_.dims[1], nz = g_.dims[2];
    complex_pass(spec, 2, true);
    complex_pass(spec, 1, true);
    rbuf_.resize(nx);
    for (int l = 0; l < nz; ++l)
      for (int j = 0; j < ny; ++j) {
        const Index s = sidx(0, j, l);
        cbuf_.assign(spec.begin() + s, spec.begin() + s + nxh_);
        fx_.inv(rbuf_.data(), cbuf_.data(), nx);
        const Index base = g_.index(0, j, l);
        for (int i = 0; i < nx; ++i) out(base + i) = rbuf_[i];
      }
  }

  Index sidx(int i, int j, int l) const { return i + Index(nxh_) * (j + Index(g_.dims[1]) * l); }

  template <class F>
  void for_each_mode(F&& f) const {
    for (int l = 0; l < g_.dims[2]; ++l)
      for (int j = 0; j < g_.dims[1]; ++j)
        for (int i = 0; i < nxh_; ++i) f(sidx(i, j, l), i, j, l);
  }

 private:
  void complex_pass(Spectrum& s, int axis, bool inv) {
    const int n = g_.dims[axis];
    const Index stride = axis == 1 ? Index(nxh_) : Index(nxh_) * g_.dims[1];
    const int outer = axis == 1 ? g_.dims[2] : g_.dims[1];
    const Index outer_stride = axis == 1 ? Index(nxh_) * g_.dims[1] : Index(nxh_);
    line_in_.resize(n);
    line_out_.resize(n);
    for (int o = 0; o < outer; ++o)
      for (int i = 0; i < nxh_; ++i) {
        const Index base = o * outer_stride + i;
        for (int m = 0; m < n; ++m) line_in_[m] = s[base + m * stride];
        if (inv)
          fc_[axis].inv(line_out_.data(), line_in_.data(), n);
        else
          fc_[axis].fwd(line_out_.data(), line_in_.data(), n);
        for (int m = 0; m < n; ++m) s[base + m * stride] = line_out_[m];
      }
  }

  Grid g_;
  int nxh_;
  std::array<std::vector<Scalar>, 3> k_, kodd_;
  Eigen::FFT<Scalar> fx_;
  std::array<Eigen::FFT<Scalar>, 3> fc_;
  std::vector<Scalar> rbuf_;
  std::vector<Complex> cbuf_, line_in_, line_out_;
};

}  // namespace porecrys
