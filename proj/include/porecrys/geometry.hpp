#pragma once

#include "porecrys/fields.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace porecrys {

// Named numeric parameters; missing keys fall back to per-generator defaults.
struct GeometryParams {
  std::map<std::string, double> values;
  std::uint64_t seed = 1;

  double get(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

// channel:     fluid slab |y − yc| < width/2 cells (default: full height → ε ≡ 1)
// throat:      slit of `width` cells narrowing to `neck` cells around x = center
//              over `length` cells with a cosine profile; extruded along z
// sphere-pack: solid spheres of `radius` cells on a lattice of `spacing`, centres
//              jittered by up to `jitter` cells
// slab:        solid for x < fraction·nx
PorosityField synthetic_geometry(const std::string& name, const Grid& g, double eps0, const GeometryParams& p = {});

// fluid cross-section area of the x = i plane, in m² (ε = 1 cells only)
double open_area(const PorosityField& eps, int i);

}  // namespace porecrys
