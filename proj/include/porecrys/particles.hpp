#pragma once

#include "porecrys/fields.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace porecrys {

enum class KernelKind { M4prime, Lambda4_2 };

struct RemeshKernel {
  KernelKind kind = KernelKind::M4prime;

  int support() const { return kind == KernelKind::M4prime ? 2 : 3; }
  const char* name() const { return kind == KernelKind::M4prime ? "M4prime" : "Lambda4_2"; }

  template <class Scalar>
  Scalar operator()(Scalar x) const {
    const Scalar a = std::abs(x);
    if (kind == KernelKind::M4prime) {
      if (a < 1) return 1 - Scalar(2.5) * a * a + Scalar(1.5) * a * a * a;
      if (a < 2) return Scalar(0.5) * (2 - a) * (2 - a) * (1 - a);
      return 0;
    }
    // Λ4,2: C², reproduces cubics; pieces in Horner form
    if (a < 1)
      return 1 + a * a * (Scalar(-5) / 4 + a * (Scalar(-35) / 12 + a * (Scalar(21) / 4 + a * (Scalar(-25) / 12))));
    if (a < 2)
      return -4 + a * (Scalar(75) / 4 +
                       a * (Scalar(-245) / 8 + a * (Scalar(545) / 24 + a * (Scalar(-63) / 8 + a * Scalar(25) / 24))));
    if (a < 3) return -(a - 3) * (a - 3) * (a - 3) * (a - 2) * (5 * a - 8) / 24;
    return 0;
  }
};

RemeshKernel kernel_from_name(const std::string& name);

struct ParticleSet {
  Eigen::Array<double, Eigen::Dynamic, 3> positions;
  Eigen::ArrayXd volumes;
  Eigen::ArrayXXd concentrations;  // particles x species
  std::vector<std::string> species;

  Index size() const { return positions.rows(); }
  // Σ C·v per species
  Eigen::ArrayXd totals() const;
};

// one particle per node, v = h³
ParticleSet particles_from_grid(const std::vector<const ScalarField<double>*>& fields,
                                const std::vector<std::string>& names);

template <class FieldT>
Eigen::ArrayXd grid_to_particles(const FieldT& field, const Eigen::Array<double, Eigen::Dynamic, 3>& pos,
                                 const RemeshKernel& k, int component = 0);

std::vector<ScalarField<double>> particles_to_grid(const ParticleSet& p, const Grid& g, const RemeshKernel& k);

struct RemeshReport {
  Eigen::ArrayXd before, after_remesh, clipped;  // moles per species
};

// particles → grid → one particle per node; negatives clamped and reported
ParticleSet remesh(const ParticleSet& p, const Grid& g, const RemeshKernel& k, RemeshReport* report = nullptr);

struct AdvectReport {
  std::vector<double> clipped;  // moles added by the clamp, per field
  std::vector<double> remesh_drift;  // relative change of totals before clamping
};

// Strang sweep over `order` (half, half, full, half, half) with RK2 along each
// axis followed by a 1D remesh. `vel` is the transport velocity ε⁻¹u_tot.
AdvectReport advect_fields(const std::vector<ScalarField<double>*>& fields, const VectorField<double>& vel,
                           double dt, const RemeshKernel& k, std::array<int, 3> order = {0, 1, 2},
                           bool clamp = true);

// the same sweep for a free particle set; particles end node-aligned
ParticleSet advect(const ParticleSet& p, const VectorField<double>& vel, double dt, const RemeshKernel& k,
                   std::array<int, 3> order = {0, 1, 2}, AdvectReport* report = nullptr);

// axis order used at macro step n (cycles through all six permutations)
std::array<int, 3> strang_order(long step);

struct LcflBound {
  double dt_gradient;      // 0.5/‖∇v‖∞
  double dt_displacement;  // 4h/‖v‖∞
  double dt() const { return std::min(dt_gradient, dt_displacement); }
};
LcflBound lagrangian_cfl(const VectorField<double>& vel, double c_lcfl = 0.5, double max_cells = 4.0);

}  // namespace porecrys
