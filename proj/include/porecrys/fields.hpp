#pragma once

#include "porecrys/errors.hpp"
#include "porecrys/parallel.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>

namespace porecrys {

using Dims = std::array<int, 3>;
using Vec3 = std::array<double, 3>;

// Uniform isotropic lattice, x fastest. Only fully periodic grids are
// accepted by the operators; the flag exists so callers can say otherwise.
struct Grid {
  Dims dims{4, 4, 4};
  double h = 1.0;
  Vec3 origin{0, 0, 0};
  std::array<bool, 3> periodic{true, true, true};

  Grid() = default;
  Grid(Dims d, double h, Vec3 origin = {0, 0, 0}) : dims(d), h(h), origin(origin) {
    for (int a = 0; a < 3; ++a)
      if (d[a] < 4) throw ParameterError("grid: every dimension must be >= 4");
    if (!(h > 0) || !std::isfinite(h)) throw ParameterError("grid: spacing must be > 0");
  }

  Index size() const { return Index(dims[0]) * dims[1] * dims[2]; }
  Index stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? Index(dims[0]) : Index(dims[0]) * dims[1];
  }
  Index index(int i, int j, int k) const {
    return i + Index(dims[0]) * (j + Index(dims[1]) * k);
  }
  Index index_wrapped(int i, int j, int k) const {
    return index(wrap(i, 0), wrap(j, 1), wrap(k, 2));
  }
  int wrap(int i, int axis) const {
    const int n = dims[axis];
    i %= n;
    return i < 0 ? i + n : i;
  }
  std::array<int, 3> coords(Index n) const {
    const int i = int(n % dims[0]);
    const Index r = n / dims[0];
    return {i, int(r % dims[1]), int(r / dims[1])};
  }
  double length(int axis) const { return dims[axis] * h; }
  double cell_volume() const { return h * h * h; }
  double volume() const { return double(size()) * cell_volume(); }
  double x(int i, int axis) const { return origin[axis] + i * h; }

  void require_periodic(const char* op) const {
    for (int a = 0; a < 3; ++a)
      if (!periodic[a])
        throw UnsupportedBoundaryError(std::string(op) + ": only periodic axes are supported");
  }

  bool operator==(const Grid& o) const {
    return dims == o.dims && h == o.h && origin == o.origin && periodic == o.periodic;
  }
};

template <class Scalar>
struct ScalarField {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  Grid grid;
  Array data;
  std::string units;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, Scalar value = Scalar(0), std::string units = {})
      : grid(g), data(Array::Constant(g.size(), value)), units(std::move(units)) {}

  Scalar& operator()(int i, int j, int k) { return data[grid.index(i, j, k)]; }
  Scalar operator()(int i, int j, int k) const { return data[grid.index(i, j, k)]; }
  Scalar& operator[](Index n) { return data[n]; }
  Scalar operator[](Index n) const { return data[n]; }
  Index size() const { return data.size(); }

  template <class F>
  static ScalarField from_function(const Grid& g, F&& f) {
    ScalarField out(g);
    for (int k = 0; k < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i)
          out(i, j, k) = Scalar(f(g.x(i, 0), g.x(j, 1), g.x(k, 2)));
    return out;
  }

  bool all_finite() const { return data.isFinite().all(); }
  double sum() const { return det_sum(size(), [&](Index n) { return double(data[n]); }); }
  double mean() const { return sum() / double(size()); }
  double max_abs() const { return det_max(size(), [&](Index n) { return std::abs(double(data[n])); }); }
};

// Components stored as columns so each one is contiguous.
template <class Scalar>
struct VectorField {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 3>;
  Grid grid;
  Array data;
  std::string units;

  VectorField() = default;
  explicit VectorField(const Grid& g, std::string units = {})
      : grid(g), data(Array::Zero(g.size(), 3)), units(std::move(units)) {}

  auto comp(int c) { return data.col(c); }
  auto comp(int c) const { return data.col(c); }
  ScalarField<Scalar> component(int c) const {
    ScalarField<Scalar> s(grid);
    s.data = data.col(c);
    s.units = units;
    return s;
  }
  void set_component(int c, const ScalarField<Scalar>& s) { data.col(c) = s.data; }
  Index size() const { return data.rows(); }

  template <class F>
  static VectorField from_function(const Grid& g, F&& f) {
    VectorField out(g);
    for (int k = 0; k < g.dims[2]; ++k)
      for (int j = 0; j < g.dims[1]; ++j)
        for (int i = 0; i < g.dims[0]; ++i) {
          const auto v = f(g.x(i, 0), g.x(j, 1), g.x(k, 2));
          const Index n = g.index(i, j, k);
          for (int c = 0; c < 3; ++c) out.data(n, c) = Scalar(v[c]);
        }
    return out;
  }

  bool all_finite() const { return data.isFinite().all(); }
  double max_abs() const {
    return det_max(size(), [&](Index n) {
      return std::max({std::abs(double(data(n, 0))), std::abs(double(data(n, 1))),
                       std::abs(double(data(n, 2)))});
    });
  }
  double max_norm() const {
    return det_max(size(), [&](Index n) { return double(data.row(n).matrix().norm()); });
  }
  double l2() const {
    return std::sqrt(det_sum(size(), [&](Index n) { return double(data.row(n).square().sum()); }));
  }
  Vec3 mean() const {
    Vec3 m{};
    for (int c = 0; c < 3; ++c)
      m[c] = det_sum(size(), [&](Index n) { return double(data(n, c)); }) / double(size());
    return m;
  }
};

// ε in [ε₀, 1]. Every mutation path should end in clamp().
struct PorosityField {
  ScalarField<double> eps;
  double eps0 = 0.05;

  PorosityField() = default;
  PorosityField(const Grid& g, double eps0, double value = 1.0) : eps(g, value), eps0(eps0) {
    check_eps0(eps0);
    clamp();
  }
  PorosityField(ScalarField<double> e, double eps0) : eps(std::move(e)), eps0(eps0) {
    check_eps0(eps0);
    clamp();
  }

  static void check_eps0(double e0) {
    if (!(e0 > 0 && e0 < 1)) throw ParameterError("eps0 must lie in (0, 1)");
  }
  const Grid& grid() const { return eps.grid; }
  void clamp() { eps.data = eps.data.max(eps0).min(1.0); }
  double operator[](Index n) const { return eps.data[n]; }
  double mean() const { return eps.mean(); }
};

}  // namespace porecrys
