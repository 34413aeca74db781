#include "commands.hpp"

#include "porecrys/errors.hpp"
#include "porecrys/geometry.hpp"
#include "porecrys/sim.hpp"
#include "suites.hpp"

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace porecrys::cli {

namespace {

using nlohmann::json;

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

void fail(bool as_json, const std::string& kind, const std::string& msg) {
  if (as_json)
    emit({{"ok", false}, {"error", kind}, {"message", msg}});
  else
    std::cerr << "porecrys: " << kind << ": " << msg << std::endl;
}

struct Series {
  std::vector<HistoryRow> history;
  std::vector<SliceRow> slices;
};

Series load_series(const std::filesystem::path& p) {
  Series s;
  const auto name = p.filename().string();
  if (p.extension() == ".csv") {
    if (name.find("slice") != std::string::npos) {
      const auto rows = read_csv(p);
      for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 5) throw FormatError(p.string() + ": slice rows need 5 columns");
        s.slices.push_back({std::stod(r[0]), std::stoi(r[1]), std::stod(r[2]), std::stod(r[3]), std::stod(r[4])});
      }
    } else {
      s.history = read_history(p);
    }
    return s;
  }
  const auto ck = read_checkpoint(p);
  const auto ncol = Index(history_header().size());
  const auto& h = ck.get("history");
  if (h.size() % ncol) throw FormatError("checkpoint: history block is ragged");
  for (Index r = 0; r < h.size() / ncol; ++r)
    s.history.push_back(history_row(std::vector<double>(h.data() + r * ncol, h.data() + (r + 1) * ncol)));
  const auto& sl = ck.get("slices");
  if (sl.size() % 5) throw FormatError("checkpoint: slices block is ragged");
  for (Index r = 0; r < sl.size() / 5; ++r) {
    const double* q = sl.data() + 5 * r;
    s.slices.push_back({q[0], int(q[1]), q[2], q[3], q[4]});
  }
  return s;
}

}  // namespace

void apply_thread_env() {
#ifdef _OPENMP
  if (const char* t = std::getenv("PORECRYS_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

int run(const RunArgs& a) {
  RunConfig cfg;
  std::unique_ptr<Simulation> sim;
  try {
    cfg = load_config(a.config);
    if (!a.output.empty()) cfg.output_dir = a.output;
    if (a.max_steps >= 0) cfg.max_steps = a.max_steps;
    sim = a.resume.empty() ? std::make_unique<Simulation>(cfg)
                           : std::make_unique<Simulation>(cfg, read_checkpoint(a.resume));
  } catch (const ConfigError& e) {
    fail(a.json, "config", e.what());
    return kConfig;
  } catch (const ParameterError& e) {
    fail(a.json, "config", e.what());
    return kConfig;
  } catch (const FormatError& e) {
    fail(a.json, "config", e.what());
    return kConfig;
  }

  try {
    sim->run([&](const SimState& s, const StepInfo& i) {
      if (a.quiet || a.json || s.step % cfg.output_every || s.history.empty()) return;
      const auto& r = s.history.back();
      std::cerr << "step " << s.step << "  t " << s.time << " s  dt " << i.dt << "  phi " << r.phi << "  k/k0 "
                << r.kappa / s.kappa0 << "  upstream " << r.kappa_up / s.kappa0_up << "  dbs " << r.dbs_iters
                << std::endl;
    });
  } catch (const ConfigError& e) {
    fail(a.json, "config", e.what());
    return kConfig;
  } catch (const Error& e) {
    // run() has already written outputs and the checkpoint of the last good step
    fail(a.json, "numerical", e.what());
    return kNumerical;
  }

  std::ifstream in(cfg.output_dir / "summary.json");
  const auto summary = json::parse(in);
  if (a.json) {
    emit({{"ok", true}, {"output", cfg.output_dir.string()}, {"summary", summary}});
  } else if (!a.quiet) {
    std::cout << "wrote " << cfg.output_dir.string() << ": " << summary["steps"] << " steps to t = "
              << summary["time"] << " s, k/k0 " << summary.value("kappa_ratio", 1.0) << ", "
              << summary["events"].size() << " clogging events" << std::endl;
  }
  return kOk;
}

int validate(const ValidateArgs& a) {
  namespace v = validation;
  v::Options o;
  if (!a.scratch.empty()) o.scratch = a.scratch;
  o.verbose = a.verbose;
  std::vector<v::Check> checks;
  try {
    checks = v::run_suite(a.suite, o);
  } catch (const ParameterError& e) {
    fail(a.json, "usage", e.what());
    return kConfig;
  }
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    if (!a.json) std::cout << v::format_line(c) << std::endl;
  }
  const auto j = v::to_json(checks);
  if (a.json) emit(j);
  if (!a.report.empty()) std::ofstream(a.report) << j.dump(2) << "\n";
  return ok ? kOk : kFailed;
}

int validate_pse(const PseArgs& a) {
  validation::Options o;
  o.pse_sizes = a.sizes;
  const auto c = validation::pse_convergence(o);
  std::ostringstream csv;
  csv << "resolution,rms_error,observed_order\n";
  const double order = c.data["order"];
  for (int n : a.sizes) csv << n << "," << CsvWriter::num(c.data["rms"][std::to_string(n)]) << ","
                            << CsvWriter::num(order) << "\n";
  if (!a.csv.empty()) std::ofstream(a.csv) << csv.str();
  if (a.json)
    emit(validation::to_json({c}));
  else if (a.csv.empty())
    std::cout << csv.str();
  else
    std::cout << validation::format_line(c) << std::endl;
  return c.passed ? kOk : kFailed;
}

int post(const PostArgs& a) {
  Series s;
  try {
    s = load_series(a.input);
  } catch (const Error& e) {
    fail(a.json, "input", e.what());
    return kConfig;
  }
  std::vector<double> t, phi, kap;
  for (const auto& r : s.history) {
    t.push_back(r.time);
    phi.push_back(a.upstream ? r.phi_up : r.phi);
    kap.push_back(a.upstream ? r.kappa_up : r.kappa);
  }

  if (a.what == "slice") {
    if (s.slices.empty()) {
      fail(a.json, "input", "no slice profiles in " + a.input.string());
      return kConfig;
    }
    double pick = s.slices.back().time;
    if (a.time >= 0) {
      double best = INFINITY;
      for (const auto& r : s.slices)
        if (std::abs(r.time - a.time) < best) {
          best = std::abs(r.time - a.time);
          pick = r.time;
        }
    }
    std::vector<SliceRow> rows;
    for (const auto& r : s.slices)
      if (r.time == pick) rows.push_back(r);
    if (a.json) {
      json j = json::array();
      for (const auto& r : rows) j.push_back({{"index", r.index}, {"x", r.x}, {"eps", r.eps}, {"precip", r.precip}});
      emit({{"time", pick}, {"profile", j}});
      return kOk;
    }
    const auto out = a.output.empty() ? std::filesystem::path("/dev/stdout") : a.output;
    write_slices(out, rows, false);
    return kOk;
  }

  if (t.size() < 2) {
    fail(a.json, "input", "need at least two history samples in " + a.input.string());
    return kConfig;
  }
  if (a.what == "kphi") {
    const auto rows = kphi_diagram(t, phi, kap);
    if (a.json) {
      json j = json::array();
      for (const auto& r : rows)
        j.push_back({{"time", r.time},
                     {"phi_ratio", r.phi_ratio},
                     {"kappa_ratio", r.kappa_ratio},
                     {"exponent", r.exponent ? json(*r.exponent) : json(nullptr)}});
      emit(j);
      return kOk;
    }
    write_kphi(a.output.empty() ? std::filesystem::path("/dev/stdout") : a.output, rows);
    return kOk;
  }

  // clog
  if (int(t.size()) < a.window) {
    fail(a.json, "input", "series shorter than the detection window");
    return kConfig;
  }
  const auto events = detect_clogging(t, kap, a.threshold, a.window, a.upstream ? "upstream" : "full");
  if (a.json) {
    json j = json::array();
    for (const auto& e : events) {
      auto x = kphi_exponent(phi, kap, e.first > 0 ? e.first - 1 : 0, e.last);
      j.push_back({{"window", e.window}, {"time", e.time}, {"drop", e.drop}, {"first", e.first}, {"last", e.last},
                   {"exponent", x ? json(*x) : json(nullptr)}});
    }
    emit(j);
    return kOk;
  }
  write_events(a.output.empty() ? std::filesystem::path("/dev/stdout") : a.output, events);
  return kOk;
}

int gen_geometry(const GeometryArgs& a) {
  if (a.dims.size() != 3) {
    fail(a.json, "usage", "--dims needs three values");
    return kConfig;
  }
  PorosityField e;
  try {
    GeometryParams p;
    p.values = a.params;
    p.seed = a.seed;
    e = synthetic_geometry(a.name, Grid({a.dims[0], a.dims[1], a.dims[2]}, a.h), a.eps0, p);
  } catch (const Error& err) {
    fail(a.json, "geometry", err.what());
    return kConfig;
  }
  if (!a.output.empty()) save_voxels(a.output, e);
  if (!a.vtk.empty()) write_vtk(a.vtk, e.grid(), {{"eps", &e.eps}}, {});
  Index solid = 0;
  for (Index n = 0; n < e.eps.size(); ++n) solid += e.eps[n] < 1;
  const double porosity = e.eps.data.mean();
  if (a.json)
    emit({{"name", a.name}, {"dims", a.dims}, {"porosity", porosity}, {"solid_cells", solid},
          {"output", a.output.string()}});
  else
    std::cout << a.name << ": porosity " << porosity << ", " << solid << " solid cells"
              << (a.output.empty() ? "" : ", wrote " + a.output.string()) << std::endl;
  return kOk;
}

}  // namespace porecrys::cli
