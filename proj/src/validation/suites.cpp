#include "suites.hpp"

#include "oracles.hpp"

#include "porecrys/errors.hpp"
#include "porecrys/operators.hpp"
#include "porecrys/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace porecrys::validation {

namespace {

using std::numbers::pi;

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o << std::setprecision(prec) << v;
  return o.str();
}

double rms(const Eigen::ArrayXd& a) { return std::sqrt(a.square().mean()); }

void note(const Options& o, const std::string& s) {
  if (o.verbose) std::cerr << "  " << s << std::endl;
}

}  // namespace

Check pse_convergence(const Options& o) {
  Timer t;
  Check c{"1", "DC-PSE heterogeneous operator convergence"};
  std::vector<double> hs, errs;
  for (int n : o.pse_sizes) {
    const Grid g({n, n, n}, 2 * pi / n, {-pi, -pi, -pi});
    const auto k = make_pse_kernel(g.h, g.h);
    const auto alpha = ScalarField<double>::from_function(g, [](double x, double, double) {
      return 1 + std::cos(x) * std::cos(x);
    });
    const auto f = ScalarField<double>::from_function(g, [](double x, double y, double z) {
      return std::sin(x) * std::sin(y) * std::sin(z);
    });
    const auto exact = ScalarField<double>::from_function(g, [](double x, double y, double z) {
      const double fv = std::sin(x) * std::sin(y) * std::sin(z);
      return -3 * fv - 5 * std::cos(x) * std::cos(x) * fv;
    });
    const auto q = pse_apply_isotropic(f, alpha, k);
    hs.push_back(g.h);
    errs.push_back(rms(q.data - exact.data));
    c.data["rms"][std::to_string(n)] = errs.back();
    note(o, "pse n=" + std::to_string(n) + " rms " + fmt(errs.back()));
  }
  const double order = oracle::convergence_order(hs, errs);
  c.data["order"] = order;
  c.passed = order >= 1.8 && order <= 2.2;
  c.detail = "least-squares order " + fmt(order, 4) + " (need 1.8..2.2), rms at finest " + fmt(errs.back(), 3);
  c.seconds = t.seconds();
  return c;
}

Check dimensionless(const Options&) {
  Timer t;
  Check c{"2", "dimensionless numbers at the reference constants"};
  KineticConstants k;
  const auto d = dimensionless_numbers(1e-3, 2e-11, 1e-9, k);
  k.K_c = 1e2;
  const auto d2 = dimensionless_numbers(1e-3, 2e-11, 1e-9, k);
  c.data = {{"Pe", d.Pe}, {"Da_prec", d.Da_prec}, {"Da_crys", d.Da_crys}, {"Da_crys_low", d2.Da_crys}};
  c.passed = std::abs(d.Pe - 4.47) <= 0.01 && std::abs(d.Da_prec - 33.03) <= 0.01 &&
             std::abs(d.Da_crys - 20) <= 0.01 && std::abs(d2.Da_crys - 2) <= 0.01;
  c.detail = "Pe " + fmt(d.Pe) + ", Da_prec " + fmt(d.Da_prec) + ", Da_crys " + fmt(d.Da_crys) + " / " +
             fmt(d2.Da_crys) + " at K_c = 1e2";
  c.seconds = t.seconds();
  return c;
}

Check kozeny_carman_limit(const Options&) {
  Timer t;
  Check c{"3", "uniform-porosity permeability equals Kozeny-Carman"};
  const Grid g({8, 8, 8}, 5.6e-6);
  FlowParams p;
  double worst = 0;
  for (double e : {0.2, 0.5, 0.8}) {
    const PorosityField eps(g, 0.05, e);
    const auto s = solve_dbs(eps, p);
    const double rel = std::abs(estimate_permeability(s, eps, p) / kozeny_carman(e, p.kappa_b) - 1);
    c.data["relative_error"][fmt(e, 2)] = rel;
    worst = std::max(worst, rel);
  }
  c.passed = worst <= 1e-10;
  c.detail = "worst relative error " + fmt(worst, 3) + " over eps 0.2/0.5/0.8 (need <= 1e-10)";
  c.seconds = t.seconds();
  return c;
}

Check brinkman_channel(const Options& o) {
  Timer t;
  Check c{"4", "Brinkman channel against the closed-form profile"};
  const double h = 5.6e-6;
  std::vector<double> err;
  for (int nf : {128, 256}) {
    const int ny = 2 * nf, j0 = ny / 4;
    const Grid g({4, ny, 4}, h);
    PorosityField e(g, 0.05, 0.05);
    for (Index n = 0; n < g.size(); ++n) {
      const int j = g.coords(n)[1];
      if (j >= j0 && j < j0 + nf) e.eps[n] = 1;
    }
    FlowParams p;
    p.tol = 1e-8;
    p.max_iters = 200000;
    p.accel = Acceleration::Anderson;
    const auto s = solve_dbs(e, p);
    const auto u = s.total_velocity();
    const double a = 0.5 * nf * h, b = 0.5 * (ny - nf) * h;
    const double lam = brinkman_lambda(0.05, p.kappa_b);
    const double yc = (j0 + 0.5 * (nf - 1)) * h;
    double emax = 0, umax = 0;
    for (int j = 0; j < ny; ++j) {
      const double ex = oracle::brinkman_channel(j * h - yc, a, b, lam, p.mu, p.u_bar[0]);
      umax = std::max(umax, ex);
      emax = std::max(emax, std::abs(u.data(g.index(1, j, 1), 0) - ex));
    }
    err.push_back(emax / umax);
    c.data["linf_relative"][std::to_string(nf)] = err.back();
    c.data["iterations"][std::to_string(nf)] = s.iterations;
    note(o, "channel nf=" + std::to_string(nf) + " err " + fmt(err.back()) + " iters " + std::to_string(s.iterations));
  }
  c.passed = err[0] < 0.05 && err[1] < 0.015 && err[1] < err[0];
  c.detail = "L-inf error " + fmt(100 * err[0], 3) + "% at 128 cells, " + fmt(100 * err[1], 3) +
             "% at 256 (need < 5%, < 1.5%, decreasing)";
  c.seconds = t.seconds();
  return c;
}

Check incompressibility(const Options& o) {
  Timer t;
  Check c{"5", "divergence-free flow with the imposed mean"};
  struct Case {
    std::string name;
    PorosityField eps;
    FlowParams flow;
  };
  std::vector<Case> cases;
  const Grid small({32, 32, 32}, 5.6e-6);
  FlowParams fp;
  fp.accel = Acceleration::Anderson;
  GeometryParams none;
  GeometryParams half;
  half.values["width"] = 16;
  cases.push_back({"channel", synthetic_geometry("channel", small, 0.05, half), fp});
  cases.push_back({"throat", synthetic_geometry("throat", small, 0.05, none), fp});
  cases.push_back({"sphere-pack", synthetic_geometry("sphere-pack", small, 0.05, none), fp});
  cases.push_back({"slab", synthetic_geometry("slab", small, 0.05, none), fp});
  if (std::filesystem::is_directory(o.presets))
    for (const auto& f : std::filesystem::directory_iterator(o.presets))
      if (f.path().extension() == ".toml") {
        const auto cfg = load_config(f.path());
        cases.push_back({f.path().stem().string(), make_geometry(cfg), cfg.flow});
      }
  bool ok = true;
  double worst_div = 0, worst_mean = 0;
  for (const auto& k : cases) {
    const auto s = solve_dbs(k.eps, k.flow);
    const auto u = s.total_velocity();
    const double h = k.eps.grid().h;
    const double umax = u.max_abs();
    const double div = divergence_spectral(u).max_abs() * h / std::max(umax, 1e-300);
    const auto m = u.mean();
    double mean_err = 0, ub = 0;
    for (int a = 0; a < 3; ++a) {
      mean_err = std::max(mean_err, std::abs(m[a] - k.flow.u_bar[a]));
      ub = std::max(ub, std::abs(k.flow.u_bar[a]));
    }
    mean_err /= ub;
    worst_div = std::max(worst_div, div);
    worst_mean = std::max(worst_mean, mean_err);
    ok = ok && div <= 1e-10 && mean_err <= 1e-12;
    c.data[k.name] = {{"divergence_h_over_umax", div}, {"mean_relative", mean_err}, {"iterations", s.iterations}};
    note(o, k.name + " div " + fmt(div) + " mean " + fmt(mean_err));
  }
  c.passed = ok;
  c.detail = std::to_string(cases.size()) + " geometries: max h|div u|/|u| " + fmt(worst_div, 3) +
             ", max mean error " + fmt(worst_mean, 3) + " (need 1e-10, 1e-12)";
  c.seconds = t.seconds();
  return c;
}

Check remesh_conservation(const Options&) {
  Timer t;
  Check c{"6a", "remeshing preserves species totals"};
  const Grid g({16, 12, 10}, 1e-6);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (auto kind : {KernelKind::M4prime, KernelKind::Lambda4_2})
    for (int trial = 0; trial < 5; ++trial) {
      ParticleSet p;
      const int n = 3000;
      p.positions.resize(n, 3);
      p.volumes.resize(n);
      p.concentrations.resize(n, 2);
      p.species = {"a", "b"};
      for (int i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) p.positions(i, a) = u(rng) * g.length(a);
        p.volumes[i] = g.cell_volume() * (0.5 + u(rng));
        p.concentrations(i, 0) = 2 * u(rng);
        p.concentrations(i, 1) = u(rng);
      }
      RemeshReport rep;
      remesh(p, g, RemeshKernel{kind}, &rep);
      worst = std::max(worst, ((rep.after_remesh - rep.before).abs() / rep.before).maxCoeff());
    }
  // transport sweeps on a swirling velocity
  ScalarField<double> a = ScalarField<double>::from_function(g, [&](double x, double y, double) {
    return 1 + 0.5 * std::sin(2 * pi * x / g.length(0)) * std::cos(2 * pi * y / g.length(1));
  });
  const auto vel = VectorField<double>::from_function(g, [&](double x, double y, double z) {
    return Vec3{1e-3 * std::sin(2 * pi * y / g.length(1)), 1e-3 * std::cos(2 * pi * z / g.length(2)),
                5e-4 * std::sin(2 * pi * x / g.length(0))};
  });
  for (long s = 0; s < 12; ++s) {
    const auto rep = advect_fields({&a}, vel, 2e-3, RemeshKernel{}, strang_order(s), false);
    worst = std::max(worst, std::abs(rep.remesh_drift[0]));
  }
  c.data["worst_relative"] = worst;
  c.passed = worst <= 1e-12;
  c.detail = "worst relative change per remesh " + fmt(worst, 3);
  c.seconds = t.seconds();
  return c;
}

Check calcium_budget(const Options& o) {
  Timer t;
  Check c{"6b", "closed-box calcium budget with transported calcium"};
  std::ostringstream cfg;
  cfg << "[run]\nt_final = 1\nmax_steps = 100\noutput_every = 100\noutput_dir = \""
      << (o.scratch / "calcium").string() << "\"\n"
      << R"([grid]
dims = [24, 24, 24]
h = 4e-6
[geometry]
name = "sphere-pack"
params = { radius = 4, spacing = 12, jitter = 1 }
[transport]
boundary = "periodic"
[chemistry]
hold_calcium = false
[kinetics]
v_molar = 0.03693
)";
  Simulation sim(parse_config(cfg.str()));
  auto total = [&] {
    const auto& s = sim.state().chem;
    return s.calcium_total();
  };
  const double ca0 = total();
  double clipped = 0;
  long steps = 0;
  while (steps < 100) {
    const auto info = sim.step();
    clipped += info.reaction.clipped_ca + info.reaction.clipped_precip + info.advect_clipped[1] +
               info.advect_clipped[2];
    ++steps;
  }
  const double drift = std::abs(total() - ca0 - clipped) / ca0;
  c.data = {{"relative_drift", drift}, {"clipped", clipped}, {"steps", steps},
            {"crystal", sim.state().chem.C_crystal.sum() * sim.state().chem.grid().cell_volume()}};
  c.passed = drift <= 1e-9;
  c.detail = "drift " + fmt(drift, 3) + " over 100 steps (need <= 1e-9)";
  c.seconds = t.seconds();
  return c;
}

Check exchange_conservation(const Options&) {
  Timer t;
  Check c{"6c", "PSE exchange integral vanishes"};
  const Grid g({20, 18, 16}, 2e-6);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  PorosityField e(g, 0.05, 1.0);
  ScalarField<double> C(g);
  for (Index n = 0; n < g.size(); ++n) {
    const double r = u(rng);
    e.eps[n] = r < 0.3 ? 0.05 : (r < 0.4 ? 0.5 : 1.0);
    C[n] = e.eps[n] * (1 + u(rng));
  }
  const auto k = make_pse_kernel(g.h, g.h);
  double worst = 0;
  for (double eta : {0.0, 1.0, 2.0}) {
    DiffusionSpec spec;
    spec.eta = eta;
    const auto q = archie_apply(C, e, spec, k);
    const double rel = std::abs(q.sum()) / q.data.abs().sum();
    worst = std::max(worst, rel);
  }
  c.data["worst_relative"] = worst;
  c.passed = worst <= 1e-10;
  c.detail = "|sum Q| / sum |Q| = " + fmt(worst, 3) + " (need <= 1e-10)";
  c.seconds = t.seconds();
  return c;
}

Check conservation(const Options& o) {
  Timer t;
  const auto a = remesh_conservation(o), b = calcium_budget(o), e = exchange_conservation(o);
  Check c{"6", "conservation: remesh, calcium budget, exchange"};
  c.passed = a.passed && b.passed && e.passed;
  c.detail = "(a) " + a.detail + "; (b) " + b.detail + "; (c) " + e.detail;
  c.data = {{"6a", a.data}, {"6b", b.data}, {"6c", e.data}};
  c.seconds = t.seconds();
  return c;
}

Check box_chemistry(const Options& o) {
  Timer t;
  Check c{"7", "0D reaction step against a fine ODE integration"};
  oracle::Box box;
  box.k.v_molar = 0.03693;
  const double eps_init = 0.6, co3 = 1.0, T = 0.01;
  box.A_s = box.k.A_s;

  const Grid g({4, 4, 4}, 5.6e-6);
  ChemOptions opt;
  opt.hold_calcium = true;
  opt.Ca_held = box.Ca_held;
  opt.area_policy = AreaPolicy::Fixed;
  const Chemistry chem(box.k, box.attach, opt, make_pse_kernel(g.h, g.h));

  const Eigen::Vector4d y0{eps_init, co3 * eps_init, 0, 0};
  const Eigen::Vector4d ref = box.integrate(y0, T, 40000);
  std::vector<double> err;
  for (int n : {10, 20, 40, 80}) {
    ChemState s(PorosityField(g, box.eps0, eps_init), co3, box.Ca_held, box.A_s);
    chem.initialize(s);
    for (int i = 0; i < n; ++i) chem.step(s, T / n);
    const Eigen::Vector4d got{s.eps[0], s.C_CO3[0], s.C_precip[0], s.C_crystal[0]};
    // every node of the uniform box must agree
    const double spread = (s.C_crystal.data - s.C_crystal[0]).abs().maxCoeff();
    err.push_back((got - ref).cwiseQuotient(Eigen::Vector4d{1, co3, co3, co3}).lpNorm<Eigen::Infinity>() + spread);
    c.data["error"][std::to_string(n)] = err.back();
  }
  std::vector<double> ratios;
  bool ok = true;
  for (size_t i = 0; i + 1 < err.size(); ++i) {
    ratios.push_back(err[i] / err[i + 1]);
    ok = ok && ratios.back() >= 3.3 && ratios.back() <= 4.7;
  }
  c.data["ratios"] = ratios;
  c.data["reference"] = {ref[0], ref[1], ref[2], ref[3]};
  note(o, "box ref eps " + fmt(ref[0]) + " crystal " + fmt(ref[3]));
  c.passed = ok;
  std::string rs;
  for (double r : ratios) rs += (rs.empty() ? "" : ", ") + fmt(r, 4);
  c.detail = "error ratios per dt halving " + rs + " (need 3.3..4.7)";
  c.seconds = t.seconds();
  return c;
}

Check attachment_anchors(const Options&) {
  Timer t;
  Check c{"8", "attachment probability anchors"};
  const Grid g({16, 8, 8}, 1e-5);
  const double e0 = 0.05;
  AttachmentSpec spec;
  // solid for i < 8: interfaces between 7|8 and, periodically, 15|0
  PorosityField e(g, e0, 1.0);
  for (Index n = 0; n < g.size(); ++n)
    if (g.coords(n)[0] < 8) e.eps[n] = e0;
  const auto p = attachment_probability(e, spec);
  std::vector<double> profile(16);
  double spread = 0;
  for (int i = 0; i < 16; ++i) {
    profile[size_t(i)] = p[g.index(i, 3, 5)];
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) spread = std::max(spread, std::abs(p[g.index(i, j, k)] - profile[size_t(i)]));
  }
  // hand values from the three-point W: first fluid node sees (2 + ε₀)/3,
  // last solid node (1 + 2ε₀)/3, deep solid ε₀
  const double fluid_face = 2.0 / 3, solid_face = 2 / (1 - e0) * (1 - (1 + 2 * e0) / 3) * e0 * e0;
  const double deep = 2 * e0 * e0;
  double err = std::max({std::abs(profile[8] - fluid_face), std::abs(profile[15] - fluid_face),
                         std::abs(profile[7] - solid_face), std::abs(profile[0] - solid_face)});
  for (int i = 2; i <= 5; ++i) err = std::max(err, std::abs(profile[size_t(i)] - deep));
  double open = 0;
  for (int i = 9; i <= 14; ++i) open = std::max(open, std::abs(profile[size_t(i)]));
  const auto peak = std::max_element(profile.begin(), profile.end()) - profile.begin();

  // a uniform fluid box has nowhere to attach
  const auto q = attachment_probability(PorosityField(g, e0, 1.0), spec);
  const double uniform = q.data.abs().maxCoeff();

  c.passed = err < 1e-12 && spread < 1e-14 && open == 0 && uniform == 0 && (peak == 8 || peak == 15);
  c.data = {{"profile", profile}, {"anchor_error", err}, {"open_pore_max", open}, {"uniform_max", uniform},
            {"peak_index", peak}};
  c.detail = "first fluid node " + fmt(profile[8], 12) + " (2/3), anchor error " + fmt(err, 2) +
             ", open pore max " + fmt(open, 2) + ", peak at i=" + std::to_string(peak);
  c.seconds = t.seconds();
  return c;
}

ClogRun run_clog_preset(const std::string& preset_file, const Options& o) {
  Timer t;
  auto cfg = load_config(o.presets / preset_file);
  ClogRun r;
  r.label = std::filesystem::path(preset_file).stem().string();
  r.output = o.scratch / r.label;
  cfg.output_dir = r.output;
  Simulation sim(cfg);
  sim.run([&](const SimState& s, const StepInfo&) {
    if (o.verbose && s.step % 50 == 0 && !s.history.empty()) {
      const auto& h = s.history.back();
      note(o, r.label + " step " + std::to_string(s.step) + " t " + fmt(s.time) + " upstream k/k0 " +
                  fmt(h.kappa_up / s.kappa0_up) + " wall " + fmt(t.seconds(), 3) + " s");
    }
  });
  const auto& st = sim.state();
  for (const auto& h : st.history) {
    r.time.push_back(h.time);
    r.phi.push_back(h.phi);
    r.kappa.push_back(h.kappa);
    r.phi_up.push_back(h.phi_up);
    r.kappa_up.push_back(h.kappa_up);
  }
  if (!st.history.empty()) {
    r.kappa_ratio = st.history.back().kappa / st.kappa0;
    r.kappa_ratio_up = st.history.back().kappa_up / st.kappa0_up;
  }
  // an event covers the intervals ending at its detections
  for (const auto& e : sim.clogging_events())
    if (e.window == "upstream") r.events.emplace_back(e.first > 0 ? e.first - 1 : 0, e.last);

  KineticConstants k = cfg.kinetics;
  if (!st.history.empty()) k.A_s = st.history.front().A_s;
  const auto d = dimensionless_numbers(std::hypot(cfg.flow.u_bar[0], cfg.flow.u_bar[1], cfg.flow.u_bar[2]), st.kappa0, cfg.diffusion.D_m, k);
  r.Pe = d.Pe;
  r.Da_prec = d.Da_prec;
  r.Da_crys = d.Da_crys;
  r.seconds = t.seconds();
  return r;
}

namespace {

nlohmann::json run_json(const ClogRun& r) {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& [a, b] : r.events) ev.push_back({r.time[a], r.time[b]});
  return {{"label", r.label},
          {"output", r.output.string()},
          {"kappa_ratio", r.kappa_ratio},
          {"kappa_ratio_upstream", r.kappa_ratio_up},
          {"Pe", r.Pe},
          {"Da_prec", r.Da_prec},
          {"Da_crys", r.Da_crys},
          {"events", ev},
          {"samples", r.time.size()},
          {"seconds", r.seconds}};
}

double min_ratio(const std::vector<double>& k) {
  if (k.empty()) return 1;
  return *std::min_element(k.begin(), k.end()) / k.front();
}

}  // namespace

Check clogging(const ClogRun& strong, const ClogRun& weak) {
  Check c{"9", "clogging regime: strong vs weak crystallization"};
  const double weak_min = min_ratio(weak.kappa_up);
  const bool matched = std::abs(strong.Pe - weak.Pe) <= 1e-9 * strong.Pe &&
                       std::abs(strong.Da_prec - weak.Da_prec) <= 1e-9 * strong.Da_prec;
  const bool events = !strong.events.empty();
  const bool halved = strong.kappa_ratio_up <= 0.5 * weak.kappa_ratio_up;
  const bool quiet = weak_min > 0.9;
  c.passed = matched && events && halved && quiet;
  c.data = {{"strong", run_json(strong)}, {"weak", run_json(weak)}, {"weak_min_ratio_upstream", weak_min}};
  c.detail = "upstream k/k0 " + fmt(strong.kappa_ratio_up) + " (Da_crys " + fmt(strong.Da_crys) + ", " +
             std::to_string(strong.events.size()) + " events) vs " + fmt(weak.kappa_ratio_up) + " (Da_crys " +
             fmt(weak.Da_crys) + ", min " + fmt(weak_min) + "), Pe " + fmt(strong.Pe) + " Da_prec " +
             fmt(strong.Da_prec) + (matched ? "" : " NOT matched");
  c.seconds = strong.seconds + weak.seconds;
  return c;
}

Check kphi_sanity(const ClogRun& r) {
  Check c{"10", "K-phi exponents: clogging windows vs quiescent"};
  const size_t n = r.phi_up.size();
  std::vector<bool> in_event(n, false);  // interval (i-1, i) lies in an event
  for (const auto& [a, b] : r.events)
    for (size_t i = a + 1; i <= b && i < n; ++i) in_event[i] = true;
  // chord exponents: summed Δlog κ over summed Δlog φ
  double dk[2] = {0, 0}, dp[2] = {0, 0};
  bool finite = true, positive = true;
  size_t defined = 0;
  for (size_t i = 1; i < n; ++i) {
    if (!(r.phi_up[i] > 0 && r.kappa_up[i] > 0)) {
      finite = false;
      continue;
    }
    const double lp = std::log(r.phi_up[i] / r.phi_up[i - 1]), lk = std::log(r.kappa_up[i] / r.kappa_up[i - 1]);
    dk[in_event[i]] += lk;
    dp[in_event[i]] += lp;
    if (lp == 0) continue;
    const double e = lk / lp;
    ++defined;
    finite = finite && std::isfinite(e);
    positive = positive && e > 0;
  }
  const bool have = dp[0] < 0 && dp[1] < 0;
  const double quiet = have ? dk[0] / dp[0] : std::nan(""), clog = have ? dk[1] / dp[1] : std::nan("");
  c.passed = have && finite && positive && defined > 0 && clog > quiet;
  c.data = {{"quiescent_exponent", quiet}, {"clogging_exponent", clog}, {"finite", finite},
            {"positive", positive},        {"intervals", defined}};
  c.detail = "exponent " + fmt(clog) + " in clogging windows vs " + fmt(quiet) + " quiescent, " +
             std::to_string(defined) + " intervals" + (finite ? "" : ", non-finite") +
             (positive ? "" : ", non-positive");
  if (!have) c.detail += ", missing window";
  return c;
}

namespace {

const std::vector<std::string> kSuites{"pse", "hydro", "particles", "chemistry", "clogging", "all", "acceptance"};

template <class F>
Check guarded(const std::string& id, const std::string& name, F&& f) {
  Timer t;
  try {
    return f();
  } catch (const std::exception& e) {
    Check c{id, name};
    c.detail = std::string("threw: ") + e.what();
    c.seconds = t.seconds();
    return c;
  }
}

}  // namespace

std::vector<std::string> suite_names() { return kSuites; }

std::vector<Check> run_suite(const std::string& name, const Options& o) {
  if (std::find(kSuites.begin(), kSuites.end(), name) == kSuites.end())
    throw ParameterError("unknown validation suite '" + name + "'");
  std::vector<Check> out;
  auto want = [&](const char* s) {
    return name == s || name == "acceptance" || (name == "all" && std::string(s) != "clogging");
  };
  if (want("pse")) out.push_back(guarded("1", "DC-PSE convergence", [&] { return pse_convergence(o); }));
  if (want("chemistry"))
    out.push_back(guarded("2", "dimensionless numbers", [&] { return dimensionless(o); }));
  if (want("hydro")) {
    out.push_back(guarded("3", "Kozeny-Carman limit", [&] { return kozeny_carman_limit(o); }));
    out.push_back(guarded("4", "Brinkman channel", [&] { return brinkman_channel(o); }));
    out.push_back(guarded("5", "incompressibility and mean flow", [&] { return incompressibility(o); }));
  }
  if (want("particles")) out.push_back(guarded("6", "conservation", [&] { return conservation(o); }));
  if (want("chemistry")) {
    out.push_back(guarded("7", "0D chemistry", [&] { return box_chemistry(o); }));
    out.push_back(guarded("8", "attachment anchors", [&] { return attachment_anchors(o); }));
  }
  if (want("clogging")) {
    std::optional<ClogRun> strong, weak;
    std::string err;
    try {
      strong = run_clog_preset("throat_da20.toml", o);
      weak = run_clog_preset("throat_da2.toml", o);
    } catch (const std::exception& e) {
      err = e.what();
    }
    if (strong && weak) {
      out.push_back(clogging(*strong, *weak));
      out.push_back(kphi_sanity(*strong));
    } else {
      out.push_back({"9", "clogging regime", false, "threw: " + err});
      out.push_back({"10", "K-phi exponents", false, "no clogging run: " + err});
    }
  }
  return out;
}

nlohmann::json to_json(const std::vector<Check>& checks) {
  nlohmann::json j;
  bool ok = true;
  for (const auto& c : checks) {
    j["checks"].push_back(
        {{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}, {"seconds", c.seconds},
         {"data", c.data}});
    ok = ok && c.passed;
  }
  j["passed"] = ok;
  return j;
}

std::string format_line(const Check& c) {
  std::ostringstream s;
  s << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << c.detail << " ("
    << std::fixed << std::setprecision(1) << c.seconds << " s)";
  return s.str();
}

}  // namespace porecrys::validation
