#include "porecrys/config.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace porecrys {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Physics only: run length, output cadence and paths may change between a
// checkpoint and its resume.
std::uint64_t RunConfig::hash() const {
  std::ostringstream o;
  o.precision(17);
  o << dt_fixed << ' ' << output_every << '|' << dims[0] << ' ' << dims[1] << ' ' << dims[2] << ' ' << h << ' '
    << eps0 << '|' << geometry.source << ' ' << geometry.name << ' ' << geometry.params.seed << ' '
    << geometry.voxel_file.string() << ' ' << geometry.threshold << ' ' << int(geometry.map);
  for (const auto& [k, v] : geometry.params.values) o << ' ' << k << '=' << v;
  o << '|' << flow.mu << ' ' << flow.kappa_b << ' ' << flow.u_bar[0] << ' ' << flow.u_bar[1] << ' ' << flow.u_bar[2]
    << ' ' << flow.dt_pseudo << ' ' << flow.tol << ' ' << flow.max_iters << ' ' << int(flow.accel) << ' '
    << flow.anderson_depth << ' ' << hydro_skip_threshold;
  o << '|' << kernel.name() << ' ' << c_lcfl << ' ' << max_cells << ' ' << int(boundary) << ' ' << strip_cells;
  o << '|' << int(diffusion.kind) << ' ' << diffusion.D_m << ' ' << diffusion.eta << ' ' << xi_over_h << ' ' << pse_p << ' ' << pse_cutoff;
  const auto& k = kinetics;
  o << '|' << k.K1 << ' ' << k.K2 << ' ' << k.K3 << ' ' << k.K_eq << ' ' << k.K_minus3 << ' ' << k.K_c << ' '
    << k.gamma_CO3 << ' ' << k.gamma_Ca << ' ' << k.v_molar << ' ' << k.K_H << ' ' << k.A_s;
  o << '|' << attachment.m_exponent << ' ' << int(attachment.norm) << ' ' << chem.hold_calcium << ' ' << chem.Ca_held
    << ' ' << int(chem.area_policy) << ' ' << chem.D_precip << ' ' << chem.diffuse << ' ' << init_CO3 << ' '
    << init_Ca << '|' << clog_threshold << ' ' << clog_window << ' ' << kappa0;
  return fnv1a(o.str());
}

void RunConfig::validate() const {
  if (!(t_final >= 0)) throw ConfigError("run.t_final", "must be >= 0");
  if (max_steps < 0) throw ConfigError("run.max_steps", "must be >= 0");
  if (output_every < 1) throw ConfigError("run.output_every", "must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("run.checkpoint_every", "must be >= 0");
  if (!(dt_fixed >= 0)) throw ConfigError("run.dt_fixed", "must be >= 0");
  for (int a = 0; a < 3; ++a)
    if (dims[a] < 4) throw ConfigError("grid.dims", "every dimension must be >= 4");
  if (!(h > 0)) throw ConfigError("grid.h", "must be > 0");
  if (!(eps0 > 0 && eps0 < 1)) throw ConfigError("grid.eps0", "must lie in (0, 1)");
  if (geometry.source != "synthetic" && geometry.source != "voxels")
    throw ConfigError("geometry.source", "expected \"synthetic\" or \"voxels\"");
  try {
    flow.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("flow", e.what());
  }
  if (!(hydro_skip_threshold >= 0)) throw ConfigError("flow.skip_threshold", "must be >= 0");
  if (!(c_lcfl > 0)) throw ConfigError("transport.c_lcfl", "must be > 0");
  if (!(max_cells > 0)) throw ConfigError("transport.max_cells", "must be > 0");
  if (boundary == BoundaryMode::InflowStrip && (strip_cells < 1 || strip_cells >= dims[0]))
    throw ConfigError("transport.strip_cells", "must lie in [1, nx)");
  try {
    diffusion.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("diffusion", e.what());
  }
  if (!(xi_over_h > 0)) throw ConfigError("diffusion.xi_over_h", "must be > 0");
  if (pse_cutoff < 1) throw ConfigError("diffusion.cutoff", "must be >= 1");
  try {
    kinetics.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("kinetics", e.what());
  }
  if (attachment.m_exponent < 0) throw ConfigError("attachment.m", "must be >= 0");
  if (!(init_CO3 >= 0)) throw ConfigError("initial.C_CO3", "must be >= 0");
  if (!(init_Ca >= 0)) throw ConfigError("initial.C_Ca", "must be >= 0");
  if (!(clog_threshold > 0 && clog_threshold < 1)) throw ConfigError("diagnostics.clog_threshold", "must lie in (0, 1)");
  if (clog_window < 2) throw ConfigError("diagnostics.clog_window", "must be >= 2");
  if (!(kappa0 >= 0)) throw ConfigError("diagnostics.kappa0", "must be >= 0");
}

namespace {

// typed access with dotted paths in the errors
class Section {
 public:
  Section(const toml::table* t, std::string path, std::set<std::string> allowed)
      : t_(t), path_(std::move(path)), allowed_(std::move(allowed)) {
    if (!t_) return;
    for (const auto& [k, v] : *t_) {
      const std::string key(k.str());
      if (!allowed_.count(key)) throw ConfigError(path_ + "." + key, "unknown key");
    }
  }

  bool has(const std::string& key) const { return t_ && t_->contains(key); }

  void num(const std::string& key, double& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (auto v = n->value<double>())
      out = *v;
    else
      throw ConfigError(where(key), "expected a number");
  }
  template <class I>
  void integer(const std::string& key, I& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_integer()) throw ConfigError(where(key), "expected an integer");
    out = I(*n->value<std::int64_t>());
  }
  void boolean(const std::string& key, bool& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_boolean()) throw ConfigError(where(key), "expected true or false");
    out = *n->value<bool>();
  }
  void str(const std::string& key, std::string& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    if (!n->is_string()) throw ConfigError(where(key), "expected a string");
    out = *n->value<std::string>();
  }
  template <class T, size_t N>
  void array(const std::string& key, std::array<T, N>& out) const {
    const toml::node* n = node(key);
    if (!n) return;
    const auto* a = n->as_array();
    if (!a || a->size() != N) throw ConfigError(where(key), "expected an array of " + std::to_string(N) + " numbers");
    for (size_t i = 0; i < N; ++i) {
      const auto v = (*a)[i].value<double>();
      if (!v) throw ConfigError(where(key) + "[" + std::to_string(i) + "]", "expected a number");
      if constexpr (std::is_integral_v<T>) {
        if (!(*a)[i].is_integer()) throw ConfigError(where(key) + "[" + std::to_string(i) + "]", "expected an integer");
      }
      out[i] = T(*v);
    }
  }
  const toml::table* sub(const std::string& key) const {
    const toml::node* n = node(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(where(key), "expected a table");
    return n->as_table();
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

 private:
  const toml::node* node(const std::string& key) const { return t_ ? t_->get(key) : nullptr; }

  const toml::table* t_;
  std::string path_;
  std::set<std::string> allowed_;
};

const toml::table* table_of(const toml::table& root, const std::string& key) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(key, "expected a table");
  return n->as_table();
}

template <class E>
E choose(const Section& s, const std::string& key, const std::string& value,
         std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [n, e] : options) {
    if (value == n) return e;
    names += std::string(names.empty() ? "" : ", ") + n;
  }
  throw ConfigError(s.where(key), "unknown value '" + value + "' (expected one of " + names + ")");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("<toml>", os.str());
  }
  static const std::set<std::string> sections{"run",       "grid",      "geometry",   "flow",    "transport",
                                              "diffusion", "kinetics",  "chemistry", "attachment", "initial",
                                              "diagnostics"};
  for (const auto& [k, v] : root)
    if (!sections.count(std::string(k.str()))) throw ConfigError(std::string(k.str()), "unknown section");

  RunConfig c;
  c.source_text = text;

  Section run(table_of(root, "run"), "run",
              {"name", "output_dir", "t_final", "max_steps", "dt_fixed", "output_every", "checkpoint_every", "write_vtk"});
  run.str("name", c.name);
  std::string out = c.output_dir.string();
  run.str("output_dir", out);
  c.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base_dir / out;
  run.num("t_final", c.t_final);
  run.integer("max_steps", c.max_steps);
  run.num("dt_fixed", c.dt_fixed);
  run.integer("output_every", c.output_every);
  run.integer("checkpoint_every", c.checkpoint_every);
  run.boolean("write_vtk", c.write_vtk);

  Section grid(table_of(root, "grid"), "grid", {"dims", "h", "eps0"});
  grid.array("dims", c.dims);
  grid.num("h", c.h);
  grid.num("eps0", c.eps0);

  Section geo(table_of(root, "geometry"), "geometry", {"source", "name", "params", "seed", "file", "threshold", "map"});
  geo.str("source", c.geometry.source);
  geo.str("name", c.geometry.name);
  std::int64_t seed = 1;
  geo.integer("seed", seed);
  c.geometry.params.seed = std::uint64_t(seed);
  if (const auto* p = geo.sub("params"))
    for (const auto& [k, v] : *p) {
      const auto d = v.value<double>();
      if (!d) throw ConfigError("geometry.params." + std::string(k.str()), "expected a number");
      c.geometry.params.values[std::string(k.str())] = *d;
    }
  std::string file;
  geo.str("file", file);
  if (!file.empty()) c.geometry.voxel_file = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
  geo.integer("threshold", c.geometry.threshold);
  std::string map = "binary";
  geo.str("map", map);
  c.geometry.map = choose<VoxelMap>(geo, "map", map, {{"binary", VoxelMap::Binary}, {"grayscale", VoxelMap::Grayscale}});
  if (c.geometry.source == "voxels" && file.empty()) throw ConfigError("geometry.file", "required when source = \"voxels\"");

  Section flow(table_of(root, "flow"), "flow",
               {"mu", "kappa_b", "u_bar", "dt_pseudo", "tol", "max_iters", "acceleration", "anderson_depth",
                "skip_threshold"});
  flow.num("mu", c.flow.mu);
  flow.num("kappa_b", c.flow.kappa_b);
  flow.array("u_bar", c.flow.u_bar);
  flow.num("dt_pseudo", c.flow.dt_pseudo);
  flow.num("tol", c.flow.tol);
  flow.integer("max_iters", c.flow.max_iters);
  std::string acc = "anderson";
  flow.str("acceleration", acc);
  c.flow.accel = choose<Acceleration>(flow, "acceleration", acc,
                                      {{"none", Acceleration::None}, {"anderson", Acceleration::Anderson}});
  flow.integer("anderson_depth", c.flow.anderson_depth);
  flow.num("skip_threshold", c.hydro_skip_threshold);

  Section tr(table_of(root, "transport"), "transport", {"kernel", "c_lcfl", "max_cells", "boundary", "strip_cells"});
  std::string kern = c.kernel.name();
  tr.str("kernel", kern);
  try {
    c.kernel = kernel_from_name(kern);
  } catch (const ParameterError& e) {
    throw ConfigError("transport.kernel", e.what());
  }
  tr.num("c_lcfl", c.c_lcfl);
  tr.num("max_cells", c.max_cells);
  std::string bnd = "inflow-strip";
  tr.str("boundary", bnd);
  c.boundary = choose<BoundaryMode>(tr, "boundary", bnd,
                                    {{"periodic", BoundaryMode::Periodic}, {"inflow-strip", BoundaryMode::InflowStrip}});
  tr.integer("strip_cells", c.strip_cells);

  Section dif(table_of(root, "diffusion"), "diffusion", {"D_m", "eta", "D_precip", "xi_over_h", "p", "cutoff", "enabled"});
  dif.num("D_m", c.diffusion.D_m);
  dif.num("eta", c.diffusion.eta);
  dif.num("D_precip", c.chem.D_precip);
  dif.num("xi_over_h", c.xi_over_h);
  dif.integer("p", c.pse_p);
  dif.integer("cutoff", c.pse_cutoff);
  dif.boolean("enabled", c.chem.diffuse);
  c.chem.diffusion = c.diffusion;

  Section kin(table_of(root, "kinetics"), "kinetics",
              {"K1", "K2", "K3", "K_eq", "K_minus3", "K_c", "gamma_CO3", "gamma_Ca", "v_molar", "K_H", "A_s"});
  auto& k = c.kinetics;
  kin.num("K1", k.K1);
  kin.num("K2", k.K2);
  kin.num("K3", k.K3);
  kin.num("K_eq", k.K_eq);
  kin.num("K_c", k.K_c);
  kin.num("gamma_CO3", k.gamma_CO3);
  k.gamma_Ca = k.gamma_CO3;
  kin.num("gamma_Ca", k.gamma_Ca);
  kin.num("v_molar", k.v_molar);
  kin.num("K_H", k.K_H);
  kin.num("A_s", k.A_s);
  if (kin.has("K_minus3")) {
    kin.num("K_minus3", k.K_minus3);
    if (kin.has("K3") && kin.has("K_eq") && std::abs(k.K_minus3 - k.K3 / k.K_eq) > 0.01 * k.K_minus3)
      throw ConfigError("kinetics.K_minus3", "inconsistent with K3/K_eq (more than 1% apart)");
  } else if (kin.has("K3") || kin.has("K_eq")) {
    k.K_minus3 = k.K3 / k.K_eq;
  }

  Section ch(table_of(root, "chemistry"), "chemistry", {"hold_calcium", "area_policy"});
  ch.boolean("hold_calcium", c.chem.hold_calcium);
  std::string area = "geometric";
  ch.str("area_policy", area);
  c.chem.area_policy = choose<AreaPolicy>(ch, "area_policy", area, {{"fixed", AreaPolicy::Fixed}, {"geometric", AreaPolicy::Geometric}});

  Section at(table_of(root, "attachment"), "attachment", {"m", "normalization"});
  at.integer("m", c.attachment.m_exponent);
  std::string norm = "pointwise";
  at.str("normalization", norm);
  c.attachment.norm = choose<AttachmentNorm>(
      at, "normalization", norm,
      {{"pointwise", AttachmentNorm::PointwiseCapture}, {"distribution", AttachmentNorm::DistributionOverDomain}});

  Section ini(table_of(root, "initial"), "initial", {"C_CO3", "P_CO2", "C_Ca"});
  if (ini.has("C_CO3") && ini.has("P_CO2")) throw ConfigError("initial.P_CO2", "give either C_CO3 or P_CO2, not both");
  ini.num("C_CO3", c.init_CO3);
  if (ini.has("P_CO2")) {
    double p = 0;
    ini.num("P_CO2", p);
    if (!(p >= 0)) throw ConfigError("initial.P_CO2", "must be >= 0");
    c.init_CO3 = 1e3 * henry_concentration(p, k.K_H);  // mol/L → mol/m³
  }
  ini.num("C_Ca", c.init_Ca);
  c.chem.Ca_held = c.init_Ca;

  Section dg(table_of(root, "diagnostics"), "diagnostics", {"clog_threshold", "clog_window", "kappa0"});
  dg.num("clog_threshold", c.clog_threshold);
  dg.integer("clog_window", c.clog_window);
  dg.num("kappa0", c.kappa0);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace porecrys
