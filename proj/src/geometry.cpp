#include "porecrys/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace porecrys {

namespace {

// width in cells, centred on the middle of the y axis; integer-aligned so that
// an even width on an even grid is symmetric
bool inside_slit(const Grid& g, int j, double width) {
  const double yc = 0.5 * (g.dims[1] - 1);
  return std::abs(j - yc) < 0.5 * width;
}

PorosityField channel(const Grid& g, double eps0, const GeometryParams& p) {
  const double w = p.get("width", g.dims[1]);
  if (!(w > 0)) throw ParameterError("channel: width must be > 0");
  PorosityField e(g, eps0, 1.0);
  for (Index n = 0; n < g.size(); ++n)
    if (!inside_slit(g, g.coords(n)[1], w)) e.eps[n] = eps0;
  return e;
}

PorosityField throat(const Grid& g, double eps0, const GeometryParams& p) {
  const double w = p.get("width", 0.5 * g.dims[1]);
  const double neck = p.get("neck", 4);
  const double xc = p.get("center", 0.5 * g.dims[0]);
  const double len = p.get("length", 0.25 * g.dims[0]);
  if (!(neck > 0) || !(w >= neck) || !(len > 0))
    throw ParameterError("throat: need 0 < neck <= width and length > 0");
  PorosityField e(g, eps0, 1.0);
  for (Index n = 0; n < g.size(); ++n) {
    const auto c = g.coords(n);
    // periodic distance along x to the throat centre
    double dx = std::abs(c[0] - xc);
    dx = std::min(dx, g.dims[0] - dx);
    double local = w;
    if (dx < 0.5 * len) local = neck + (w - neck) * 0.5 * (1 - std::cos(2 * std::numbers::pi * dx / len));
    if (!inside_slit(g, c[1], local)) e.eps[n] = eps0;
  }
  return e;
}

PorosityField sphere_pack(const Grid& g, double eps0, const GeometryParams& p) {
  const double r = p.get("radius", 4);
  const double s = p.get("spacing", 10);
  const double jit = p.get("jitter", 1);
  if (!(r > 0) || !(s > 0) || !(jit >= 0)) throw ParameterError("sphere-pack: need radius, spacing > 0, jitter >= 0");
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(-1, 1);
  PorosityField e(g, eps0, 1.0);
  std::array<int, 3> count;
  for (int a = 0; a < 3; ++a) count[size_t(a)] = std::max(1, int(std::floor(g.dims[a] / s)));
  for (int kc = 0; kc < count[2]; ++kc)
    for (int jc = 0; jc < count[1]; ++jc)
      for (int ic = 0; ic < count[0]; ++ic) {
        const Vec3 c{(ic + 0.5) * g.dims[0] / count[0] + jit * u(rng), (jc + 0.5) * g.dims[1] / count[1] + jit * u(rng),
                     (kc + 0.5) * g.dims[2] / count[2] + jit * u(rng)};
        const int rr = int(std::ceil(r)) + 1;
        for (int dk = -rr; dk <= rr; ++dk)
          for (int dj = -rr; dj <= rr; ++dj)
            for (int di = -rr; di <= rr; ++di) {
              const int i = int(std::floor(c[0])) + di, j = int(std::floor(c[1])) + dj, k = int(std::floor(c[2])) + dk;
              const double x = i - c[0], y = j - c[1], z = k - c[2];
              if (x * x + y * y + z * z <= r * r) e.eps[g.index_wrapped(i, j, k)] = eps0;
            }
      }
  return e;
}

PorosityField slab(const Grid& g, double eps0, const GeometryParams& p) {
  const double f = p.get("fraction", 0.5);
  if (!(f >= 0 && f <= 1)) throw ParameterError("slab: fraction must lie in [0, 1]");
  const int cut = int(std::lround(f * g.dims[0]));
  PorosityField e(g, eps0, 1.0);
  for (Index n = 0; n < g.size(); ++n)
    if (g.coords(n)[0] < cut) e.eps[n] = eps0;
  return e;
}

}  // namespace

PorosityField synthetic_geometry(const std::string& name, const Grid& g, double eps0, const GeometryParams& p) {
  PorosityField::check_eps0(eps0);
  if (name == "channel") return channel(g, eps0, p);
  if (name == "throat") return throat(g, eps0, p);
  if (name == "sphere-pack") return sphere_pack(g, eps0, p);
  if (name == "slab") return slab(g, eps0, p);
  throw ParameterError("unknown geometry '" + name + "' (channel, throat, sphere-pack, slab)");
}

double open_area(const PorosityField& eps, int i) {
  const Grid& g = eps.grid();
  Index c = 0;
  for (int k = 0; k < g.dims[2]; ++k)
    for (int j = 0; j < g.dims[1]; ++j) c += eps.eps(i, j, k) == 1.0;
  return double(c) * g.h * g.h;
}

}  // namespace porecrys
