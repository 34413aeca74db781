#include "porecrys/particles.hpp"

#include "porecrys/operators.hpp"

#include <algorithm>

namespace porecrys {

RemeshKernel kernel_from_name(const std::string& name) {
  if (name == "M4prime" || name == "m4prime" || name == "M4'") return {KernelKind::M4prime};
  if (name == "Lambda4_2" || name == "lambda4_2" || name == "L4_2") return {KernelKind::Lambda4_2};
  throw ParameterError("unknown remeshing kernel '" + name + "'");
}

Eigen::ArrayXd ParticleSet::totals() const {
  Eigen::ArrayXd t(concentrations.cols());
  for (Index s = 0; s < concentrations.cols(); ++s)
    t[s] = det_sum(size(), [&](Index i) { return concentrations(i, s) * volumes[i]; });
  return t;
}

ParticleSet particles_from_grid(const std::vector<const ScalarField<double>*>& fields,
                                const std::vector<std::string>& names) {
  if (fields.empty()) throw ParameterError("particles_from_grid: no fields");
  const Grid& g = fields[0]->grid;
  ParticleSet p;
  p.positions.resize(g.size(), 3);
  p.volumes = Eigen::ArrayXd::Constant(g.size(), g.cell_volume());
  p.concentrations.resize(g.size(), Index(fields.size()));
  p.species = names;
  for (Index n = 0; n < g.size(); ++n) {
    const auto c = g.coords(n);
    for (int a = 0; a < 3; ++a) p.positions(n, a) = g.x(c[a], a);
    for (size_t s = 0; s < fields.size(); ++s) p.concentrations(n, Index(s)) = (*fields[s])[n];
  }
  return p;
}

namespace {

struct Stencil {
  int first;
  double w[6];
  int count;
};

// weights of the nodes around grid coordinate xi
Stencil stencil(const RemeshKernel& k, double xi) {
  const int s = k.support();
  const int base = int(std::floor(xi));
  Stencil st{base - s + 1, {}, 2 * s};
  for (int m = 0; m < st.count; ++m) st.w[m] = k(xi - double(st.first + m));
  return st;
}

double wrap_coord(double x, double L) {
  x = std::fmod(x, L);
  if (x < 0) x += L;
  if (x >= L) x -= L;
  return x;
}

}  // namespace

template <class FieldT>
Eigen::ArrayXd grid_to_particles(const FieldT& field, const Eigen::Array<double, Eigen::Dynamic, 3>& pos,
                                 const RemeshKernel& k, int component) {
  const Grid& g = field.grid;
  g.require_periodic("grid_to_particles");
  Eigen::ArrayXd out(pos.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < pos.rows(); ++i) {
    Stencil st[3];
    for (int a = 0; a < 3; ++a) st[a] = stencil(k, (pos(i, a) - g.origin[a]) / g.h);
    double v = 0;
    for (int c = 0; c < st[2].count; ++c)
      for (int b = 0; b < st[1].count; ++b) {
        const double wbc = st[1].w[b] * st[2].w[c];
        if (wbc == 0) continue;
        for (int a = 0; a < st[0].count; ++a) {
          const Index n = g.index_wrapped(st[0].first + a, st[1].first + b, st[2].first + c);
          double f;
          if constexpr (std::is_same_v<FieldT, VectorField<double>>)
            f = field.data(n, component);
          else
            f = field.data[n];
          v += st[0].w[a] * wbc * f;
        }
      }
    out[i] = v;
  }
  return out;
}

template Eigen::ArrayXd grid_to_particles(const ScalarField<double>&, const Eigen::Array<double, Eigen::Dynamic, 3>&,
                                          const RemeshKernel&, int);
template Eigen::ArrayXd grid_to_particles(const VectorField<double>&, const Eigen::Array<double, Eigen::Dynamic, 3>&,
                                          const RemeshKernel&, int);

std::vector<ScalarField<double>> particles_to_grid(const ParticleSet& p, const Grid& g, const RemeshKernel& k) {
  g.require_periodic("particles_to_grid");
  const Index ns = p.concentrations.cols();
  std::vector<ScalarField<double>> out(size_t(ns), ScalarField<double>(g, 0.0, "mol/m^3"));
  const double inv_cell = 1.0 / g.cell_volume();
  for (Index i = 0; i < p.size(); ++i) {
    Stencil st[3];
    for (int a = 0; a < 3; ++a) st[a] = stencil(k, (p.positions(i, a) - g.origin[a]) / g.h);
    const double vr = p.volumes[i] * inv_cell;
    for (int c = 0; c < st[2].count; ++c)
      for (int b = 0; b < st[1].count; ++b) {
        const double wbc = st[1].w[b] * st[2].w[c];
        if (wbc == 0) continue;
        for (int a = 0; a < st[0].count; ++a) {
          const Index n = g.index_wrapped(st[0].first + a, st[1].first + b, st[2].first + c);
          const double w = st[0].w[a] * wbc * vr;
          for (Index s = 0; s < ns; ++s) out[size_t(s)][n] += p.concentrations(i, s) * w;
        }
      }
  }
  return out;
}

namespace {

double clamp_negative(ScalarField<double>& f) {
  const double cell = f.grid.cell_volume();
  const double neg = det_sum(f.size(), [&](Index n) { return f[n] < 0 ? -f[n] : 0.0; });
  f.data = f.data.max(0.0);
  return neg * cell;
}

}  // namespace

ParticleSet remesh(const ParticleSet& p, const Grid& g, const RemeshKernel& k, RemeshReport* report) {
  auto grids = particles_to_grid(p, g, k);
  const Index ns = Index(grids.size());
  RemeshReport rep;
  rep.before = p.totals();
  rep.after_remesh.resize(ns);
  rep.clipped.resize(ns);
  for (Index s = 0; s < ns; ++s) {
    rep.after_remesh[s] = grids[size_t(s)].sum() * g.cell_volume();
    rep.clipped[s] = clamp_negative(grids[size_t(s)]);
  }
  std::vector<const ScalarField<double>*> ptrs;
  for (auto& f : grids) ptrs.push_back(&f);
  auto out = particles_from_grid(ptrs, p.species);
  if (report) *report = rep;
  return out;
}

std::array<int, 3> strang_order(long step) {
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
  return perms[size_t(((step % 6) + 6) % 6)];
}

namespace {

// RK2 (midpoint) along one axis and 1D remesh of every field, line by line
void directional_step(const std::vector<ScalarField<double>*>& fields, const VectorField<double>& vel, int axis,
                      double dt, const RemeshKernel& k) {
  const Grid& g = vel.grid;
  const int n = g.dims[axis];
  const int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
  const Index stride = g.stride(axis);
  const double c = dt / g.h;
  const size_t ns = fields.size();
  std::vector<Eigen::ArrayXd> out(ns, Eigen::ArrayXd::Zero(g.size()));
#pragma omp parallel
  {
    std::vector<double> u(static_cast<size_t>(n));
#pragma omp for schedule(static)
    for (int q2 = 0; q2 < g.dims[o2]; ++q2)
      for (int q1 = 0; q1 < g.dims[o1]; ++q1) {
        std::array<int, 3> p{};
        p[o1] = q1;
        p[o2] = q2;
        p[axis] = 0;
        const Index base = g.index(p[0], p[1], p[2]);
        for (int i = 0; i < n; ++i) u[size_t(i)] = vel.data(base + i * stride, axis);
        for (int i = 0; i < n; ++i) {
          const double xm = i + 0.5 * c * u[size_t(i)];
          const Stencil sm = stencil(k, xm);
          double v2 = 0;
          for (int m = 0; m < sm.count; ++m) v2 += sm.w[m] * u[size_t(g.wrap(sm.first + m, axis))];
          const Stencil st = stencil(k, i + c * v2);
          for (size_t s = 0; s < ns; ++s) {
            const double ci = (*fields[s])[base + i * stride];
            if (ci == 0) continue;
            for (int m = 0; m < st.count; ++m)
              out[s][base + g.wrap(st.first + m, axis) * stride] += ci * st.w[m];
          }
        }
      }
  }
  for (size_t s = 0; s < ns; ++s) fields[s]->data = std::move(out[s]);
}

}  // namespace

AdvectReport advect_fields(const std::vector<ScalarField<double>*>& fields, const VectorField<double>& vel,
                           double dt, const RemeshKernel& k, std::array<int, 3> order, bool clamp) {
  vel.grid.require_periodic("advect");
  if (!vel.all_finite()) throw PropagationError("advect: velocity field is not finite");
  AdvectReport rep;
  std::vector<double> before;
  for (auto* f : fields) before.push_back(f->sum());
  const int a = order[0], b = order[1], c = order[2];
  directional_step(fields, vel, a, 0.5 * dt, k);
  directional_step(fields, vel, b, 0.5 * dt, k);
  directional_step(fields, vel, c, dt, k);
  directional_step(fields, vel, b, 0.5 * dt, k);
  directional_step(fields, vel, a, 0.5 * dt, k);
  for (size_t s = 0; s < fields.size(); ++s) {
    const double after = fields[s]->sum();
    const double scale = std::max(std::abs(before[s]), 1e-300);
    rep.remesh_drift.push_back((after - before[s]) / scale);
    rep.clipped.push_back(clamp ? clamp_negative(*fields[s]) : 0.0);
  }
  return rep;
}

ParticleSet advect(const ParticleSet& p, const VectorField<double>& vel, double dt, const RemeshKernel& k,
                   std::array<int, 3> order, AdvectReport* report) {
  auto grids = particles_to_grid(p, vel.grid, k);
  std::vector<ScalarField<double>*> ptrs;
  for (auto& f : grids) ptrs.push_back(&f);
  auto rep = advect_fields(ptrs, vel, dt, k, order);
  if (report) *report = rep;
  std::vector<const ScalarField<double>*> cptrs(ptrs.begin(), ptrs.end());
  auto out = particles_from_grid(cptrs, p.species);
  for (Index i = 0; i < out.size(); ++i)
    for (int a = 0; a < 3; ++a)
      out.positions(i, a) = vel.grid.origin[a] + wrap_coord(out.positions(i, a) - vel.grid.origin[a], vel.grid.length(a));
  return out;
}

LcflBound lagrangian_cfl(const VectorField<double>& vel, double c_lcfl, double max_cells) {
  double gmax = 0;
  for (int c = 0; c < 3; ++c) gmax = std::max(gmax, gradient(vel.component(c)).max_abs());
  const double vmax = vel.max_abs();
  LcflBound b;
  b.dt_gradient = gmax > 0 ? c_lcfl / gmax : std::numeric_limits<double>::infinity();
  b.dt_displacement = vmax > 0 ? max_cells * vel.grid.h / vmax : std::numeric_limits<double>::infinity();
  return b;
}

}  // namespace porecrys
