#include "porecrys/sim.hpp"

#include "porecrys/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace porecrys {

PorosityField make_geometry(const RunConfig& cfg) {
  const Grid g = cfg.grid();
  if (cfg.geometry.source == "voxels")
    return load_voxels(cfg.geometry.voxel_file, cfg.dims, cfg.geometry.threshold, cfg.eps0, cfg.h, cfg.geometry.map);
  try {
    return synthetic_geometry(cfg.geometry.name, g, cfg.eps0, cfg.geometry.params);
  } catch (const ParameterError& e) {
    throw ConfigError("geometry", e.what());
  }
}

namespace {

Chemistry make_chemistry(const RunConfig& c) {
  ChemOptions o = c.chem;
  o.diffusion = c.diffusion;
  return Chemistry(c.kinetics, c.attachment, o,
                   make_pse_kernel(c.h, c.xi_over_h * c.h, c.pse_p, c.pse_cutoff));
}

double mol(const ScalarField<double>& f) { return f.sum() * f.grid.cell_volume(); }

double upstream_mean(const PorosityField& e) {
  const Grid& g = e.grid();
  const int imax = std::max(1, g.dims[0] / 4);
  double s = 0;
  Index n = 0;
  for (Index m = 0; m < g.size(); ++m)
    if (int(m % g.dims[0]) < imax) {
      s += e[m];
      ++n;
    }
  return s / double(n);
}

Eigen::ArrayXd flat(const VectorField<double>& v) {
  return Eigen::Map<const Eigen::ArrayXd>(v.data.data(), v.data.size());
}

VectorField<double> unflat(const Grid& g, const Eigen::ArrayXd& a, const std::string& name) {
  VectorField<double> v(g);
  if (a.size() != v.data.size()) throw FormatError("checkpoint: " + name + " does not match the grid");
  v.data = Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, 3>>(a.data(), g.size(), 3);
  return v;
}

ScalarField<double> scalar(const Grid& g, const Eigen::ArrayXd& a, const std::string& name) {
  if (a.size() != g.size()) throw FormatError("checkpoint: " + name + " does not match the grid");
  ScalarField<double> f(g);
  f.data = a;
  return f;
}

}  // namespace

Simulation::Simulation(RunConfig cfg) : cfg_(std::move(cfg)), chem_(make_chemistry(cfg_)) {
  cfg_.validate();
  const auto eps = make_geometry(cfg_);
  s_.chem = ChemState(eps, cfg_.init_CO3, cfg_.init_Ca, cfg_.kinetics.A_s);
  chem_.initialize(s_.chem);
  s_.carbonate0 = carbonate_total();
  init_flow_and_history();
}

Simulation::Simulation(RunConfig cfg, const Checkpoint& ck) : cfg_(std::move(cfg)), chem_(make_chemistry(cfg_)) {
  cfg_.validate();
  if (ck.config_hash != cfg_.hash())
    throw ConfigError("checkpoint", "written by a different physical configuration");
  const Grid g = cfg_.grid();
  s_.step = ck.step;
  s_.time = ck.time;
  auto& c = s_.chem;
  c.eps = PorosityField(scalar(g, ck.get("eps"), "eps"), cfg_.eps0);
  c.C_CO3 = scalar(g, ck.get("C_CO3"), "C_CO3");
  c.C_Ca = scalar(g, ck.get("C_Ca"), "C_Ca");
  c.C_precip = scalar(g, ck.get("C_precip"), "C_precip");
  c.C_crystal = scalar(g, ck.get("C_crystal"), "C_crystal");

  const auto& sc = ck.get("scalars");
  if (sc.size() != 11) throw FormatError("checkpoint: scalars block has the wrong length");
  c.A_s = sc[0];
  c.area_ref = sc[1];
  s_.carbonate0 = sc[2];
  s_.inflow = sc[3];
  s_.clipped = sc[4];
  s_.clogged = long(sc[5]);
  s_.kappa0 = sc[6];
  s_.kappa0_up = sc[7];
  s_.has_flow = sc[8] != 0;
  if (s_.has_flow) {
    s_.flow.u = unflat(g, ck.get("flow_u"), "flow_u");
    s_.flow.omega = unflat(g, ck.get("flow_omega"), "flow_omega");
    s_.flow.psi = unflat(g, ck.get("flow_psi"), "flow_psi");
    s_.flow.u_bar = cfg_.flow.u_bar;
    s_.flow.iterations = int(sc[9]);
    s_.flow.residual = sc[10];
    s_.eps_at_solve = scalar(g, ck.get("eps_at_solve"), "eps_at_solve");
  }

  const auto ncol = Index(history_header().size());
  const auto& h = ck.get("history");
  if (h.size() % ncol) throw FormatError("checkpoint: history block is ragged");
  for (Index r = 0; r < h.size() / ncol; ++r) {
    std::vector<double> v(h.data() + r * ncol, h.data() + (r + 1) * ncol);
    s_.history.push_back(history_row(v));
  }
  const auto& sl = ck.get("slices");
  if (sl.size() % 5) throw FormatError("checkpoint: slices block is ragged");
  for (Index r = 0; r < sl.size() / 5; ++r) {
    const double* p = sl.data() + 5 * r;
    s_.slices.push_back({p[0], int(p[1]), p[2], p[3], p[4]});
  }
}

double Simulation::carbonate_total() const {
  return mol(s_.chem.C_CO3) + mol(s_.chem.C_precip) + mol(s_.chem.C_crystal);
}

void Simulation::init_flow_and_history() {
  ensure_flow(true, nullptr);
  if (cfg_.kappa0 > 0) {
    s_.kappa0 = s_.kappa0_up = cfg_.kappa0;
  } else {
    s_.kappa0 = estimate_permeability(s_.flow, s_.chem.eps, cfg_.flow, Window::Full);
    s_.kappa0_up = estimate_permeability(s_.flow, s_.chem.eps, cfg_.flow, Window::UpstreamQuarter);
  }
  record(0);
}

bool Simulation::ensure_flow(bool force, StepInfo* info) {
  double moved = std::numeric_limits<double>::infinity();
  if (s_.has_flow) moved = (s_.chem.eps.eps.data - s_.eps_at_solve.data).abs().maxCoeff();
  if (info) info->max_deps_since_solve = s_.has_flow ? moved : 0;
  const bool solve = !s_.has_flow || moved >= cfg_.hydro_skip_threshold || (force && moved > 0);
  if (!solve) return false;
  s_.flow = solve_dbs(s_.chem.eps, cfg_.flow, s_.has_flow ? &s_.flow : nullptr);
  s_.has_flow = true;
  s_.eps_at_solve = s_.chem.eps.eps;
  if (info) {
    info->solved = true;
    info->dbs_iters = s_.flow.iterations;
  }
  return true;
}

double Simulation::apply_inflow() {
  if (cfg_.boundary != BoundaryMode::InflowStrip) return 0;
  auto& c = s_.chem;
  const Grid& g = c.grid();
  const bool reset_ca = !cfg_.chem.hold_calcium;
  double delta = 0;
  for (Index m = 0; m < g.size(); ++m) {
    if (int(m % g.dims[0]) >= cfg_.strip_cells) continue;
    const double e = c.eps[m];
    const double co3 = cfg_.init_CO3 * e;
    delta += co3 - c.C_CO3[m] - c.C_precip[m];
    c.C_CO3[m] = co3;
    c.C_precip[m] = 0;
    if (reset_ca) c.C_Ca[m] = cfg_.init_Ca * e;
  }
  return delta * g.cell_volume();
}

StepInfo Simulation::step() {
  StepInfo info;
  ensure_flow(false, &info);
  auto& c = s_.chem;

  VectorField<double> vel = s_.flow.total_velocity();
  for (int a = 0; a < 3; ++a) vel.data.col(a) /= c.eps.eps.data;

  double dt = cfg_.dt_fixed;
  if (!(dt > 0)) dt = std::min(lagrangian_cfl(vel, cfg_.c_lcfl, cfg_.max_cells).dt(), chem_.stable_dt(c));
  bool lands = false;
  if (cfg_.t_final > 0 && s_.time + dt >= cfg_.t_final) {
    dt = cfg_.t_final - s_.time;
    lands = true;
  }
  if (!(dt > 0) || !std::isfinite(dt)) throw ParameterError("sim: no finite time step bound; set run.dt_fixed");
  info.dt = dt;

  std::vector<ScalarField<double>*> moved{&c.C_CO3, &c.C_precip};
  if (!cfg_.chem.hold_calcium) moved.push_back(&c.C_Ca);
  const auto adv = advect_fields(moved, vel, dt, cfg_.kernel, strang_order(s_.step));
  info.advect_clipped = adv.clipped;

  info.reaction = chem_.step(c, dt);
  s_.clipped += adv.clipped[0] + adv.clipped[1] + info.reaction.clipped_co3 + info.reaction.clipped_precip;
  s_.clogged += long(info.reaction.clogged);
  s_.inflow += apply_inflow();

  s_.time = lands ? cfg_.t_final : s_.time + dt;
  ++s_.step;
  if (s_.step % cfg_.output_every == 0) record(dt);
  return info;
}

void Simulation::record(double dt) {
  ensure_flow(true, nullptr);
  const auto& c = s_.chem;
  HistoryRow r;
  r.step = s_.step;
  r.time = s_.time;
  r.dt = dt;
  r.phi = c.eps.eps.data.mean();
  r.phi_up = upstream_mean(c.eps);
  r.kappa = estimate_permeability(s_.flow, c.eps, cfg_.flow, Window::Full);
  r.kappa_up = estimate_permeability(s_.flow, c.eps, cfg_.flow, Window::UpstreamQuarter);
  r.dbs_iters = s_.flow.iterations;
  r.co3 = mol(c.C_CO3);
  r.ca = mol(c.C_Ca);
  r.precip = mol(c.C_precip);
  r.crystal = mol(c.C_crystal);
  r.inflow = s_.inflow;
  r.clipped = s_.clipped;
  const double total = r.co3 + r.precip + r.crystal;
  r.budget = std::abs(total - s_.carbonate0 - s_.inflow - s_.clipped) / std::max({total, s_.carbonate0, 1e-300});
  r.clogged = s_.clogged;
  r.A_s = c.A_s;
  s_.history.push_back(r);
  const auto sl = slice_profiles(c.eps, c.C_precip, s_.time);
  s_.slices.insert(s_.slices.end(), sl.begin(), sl.end());
}

Checkpoint Simulation::checkpoint() const {
  Checkpoint ck;
  ck.config_hash = cfg_.hash();
  ck.step = s_.step;
  ck.time = s_.time;
  const auto& c = s_.chem;
  ck.put("eps", c.eps.eps.data);
  ck.put("C_CO3", c.C_CO3.data);
  ck.put("C_Ca", c.C_Ca.data);
  ck.put("C_precip", c.C_precip.data);
  ck.put("C_crystal", c.C_crystal.data);
  Eigen::ArrayXd sc(11);
  sc << c.A_s, c.area_ref, s_.carbonate0, s_.inflow, s_.clipped, double(s_.clogged), s_.kappa0, s_.kappa0_up,
      s_.has_flow ? 1.0 : 0.0, double(s_.flow.iterations), s_.flow.residual;
  ck.put("scalars", sc);
  if (s_.has_flow) {
    ck.put("flow_u", flat(s_.flow.u));
    ck.put("flow_omega", flat(s_.flow.omega));
    ck.put("flow_psi", flat(s_.flow.psi));
    ck.put("eps_at_solve", s_.eps_at_solve.data);
  }
  const auto ncol = history_header().size();
  Eigen::ArrayXd h(Index(ncol * s_.history.size()));
  for (size_t r = 0; r < s_.history.size(); ++r) {
    const auto v = history_values(s_.history[r]);
    for (size_t j = 0; j < ncol; ++j) h[Index(r * ncol + j)] = v[j];
  }
  ck.put("history", h);
  Eigen::ArrayXd sl(Index(5 * s_.slices.size()));
  for (size_t r = 0; r < s_.slices.size(); ++r) {
    const auto& s = s_.slices[r];
    sl.segment(Index(5 * r), 5) << s.time, double(s.index), s.x, s.eps, s.precip;
  }
  ck.put("slices", sl);
  return ck;
}

std::vector<ClogEvent> Simulation::clogging_events() const {
  std::vector<double> t, k, ku;
  for (const auto& r : s_.history) {
    t.push_back(r.time);
    k.push_back(r.kappa);
    ku.push_back(r.kappa_up);
  }
  if (int(t.size()) < cfg_.clog_window) return {};
  auto ev = detect_clogging(t, ku, cfg_.clog_threshold, cfg_.clog_window, "upstream");
  const auto full = detect_clogging(t, k, cfg_.clog_threshold, cfg_.clog_window, "full");
  ev.insert(ev.end(), full.begin(), full.end());
  return ev;
}

void Simulation::write_outputs(const Checkpoint* ck) const {
  const auto& dir = cfg_.output_dir;
  std::filesystem::create_directories(dir);
  write_history(dir / "history.csv", s_.history);
  write_slices(dir / "slices.csv", s_.slices, false);
  const auto events = clogging_events();
  write_events(dir / "events.csv", events);

  std::vector<double> t, phi, kap, phi_up, kap_up;
  for (const auto& r : s_.history) {
    t.push_back(r.time);
    phi.push_back(r.phi);
    kap.push_back(r.kappa);
    phi_up.push_back(r.phi_up);
    kap_up.push_back(r.kappa_up);
  }
  const bool series = t.size() >= 2;
  write_kphi(dir / "kphi.csv", series ? kphi_diagram(t, phi, kap) : std::vector<KphiRow>{});
  write_kphi(dir / "kphi_upstream.csv", series ? kphi_diagram(t, phi_up, kap_up) : std::vector<KphiRow>{});

  write_checkpoint(dir / "checkpoint.bin", ck ? *ck : checkpoint());

  const double ub = std::sqrt(cfg_.flow.u_bar[0] * cfg_.flow.u_bar[0] + cfg_.flow.u_bar[1] * cfg_.flow.u_bar[1] +
                              cfg_.flow.u_bar[2] * cfg_.flow.u_bar[2]);
  KineticConstants k = cfg_.kinetics;
  k.A_s = s_.history.empty() ? s_.chem.A_s : s_.history.front().A_s;
  nlohmann::json j;
  j["name"] = cfg_.name;
  j["steps"] = s_.step;
  j["time"] = s_.time;
  j["kappa0"] = s_.kappa0;
  j["kappa0_upstream"] = s_.kappa0_up;
  if (!s_.history.empty()) {
    const auto& last = s_.history.back();
    j["kappa_ratio"] = last.kappa / s_.kappa0;
    j["kappa_ratio_upstream"] = last.kappa_up / s_.kappa0_up;
    j["phi"] = last.phi;
    j["budget_residual"] = last.budget;
  }
  if (s_.kappa0 > 0) {
    const auto d = dimensionless_numbers(ub, s_.kappa0, cfg_.diffusion.D_m, k);
    j["Pe"] = d.Pe;
    j["Da_prec"] = d.Da_prec;
    j["Da_crys"] = d.Da_crys;
  }
  j["clogged_cells"] = s_.clogged;
  j["events"] = nlohmann::json::array();
  for (const auto& e : events)
    j["events"].push_back({{"window", e.window}, {"time", e.time}, {"drop", e.drop}});
  j["config_hash"] = cfg_.hash();
  std::ofstream(dir / "summary.json") << j.dump(2) << "\n";

  if (cfg_.write_vtk) {
    const auto& c = s_.chem;
    const auto u = s_.flow.total_velocity();
    write_vtk(dir / "fields.vtk", c.grid(),
              {{"eps", &c.eps.eps}, {"C_CO3", &c.C_CO3}, {"C_Ca", &c.C_Ca}, {"C_precip", &c.C_precip},
               {"C_crystal", &c.C_crystal}},
              {{"velocity", &u}});
  }
}

void Simulation::run(const std::function<void(const SimState&, const StepInfo&)>& on_step) {
  double last_dt = s_.history.empty() ? 0 : s_.history.back().dt;
  auto more = [&] {
    return s_.step < cfg_.max_steps && cfg_.t_final > 0 && s_.time < cfg_.t_final;
  };
  while (more()) {
    SimState backup = s_;
    StepInfo info;
    try {
      info = step();
    } catch (const StabilityError&) {
      s_ = std::move(backup);
      write_outputs();
      throw;
    } catch (const ConvergenceError&) {
      s_ = std::move(backup);
      write_outputs();
      throw;
    } catch (const PropagationError&) {
      s_ = std::move(backup);
      write_outputs();
      throw;
    }
    last_dt = info.dt;
    if (cfg_.checkpoint_every > 0 && s_.step % cfg_.checkpoint_every == 0)
      write_checkpoint(cfg_.output_dir / "checkpoint.bin", checkpoint());
    if (on_step) on_step(s_, info);
  }
  // the checkpoint excludes the closing sample, so a resumed run matches an
  // uninterrupted one
  const auto ck = checkpoint();
  if (s_.history.empty() || s_.history.back().step != s_.step) record(last_dt);
  write_outputs(&ck);
}

}  // namespace porecrys
