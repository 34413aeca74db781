#pragma once

#include "porecrys/chemistry.hpp"
#include "porecrys/geometry.hpp"
#include "porecrys/hydro.hpp"
#include "porecrys/io.hpp"
#include "porecrys/particles.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace porecrys {

enum class BoundaryMode { Periodic, InflowStrip };

struct GeometryConfig {
  std::string source = "synthetic";  // "synthetic" or "voxels"
  std::string name = "channel";
  GeometryParams params;
  std::filesystem::path voxel_file;
  int threshold = 128;
  VoxelMap map = VoxelMap::Binary;
};

struct RunConfig {
  std::string name = "run";
  std::filesystem::path output_dir = "out";
  double t_final = 0;
  long max_steps = 1000000;
  double dt_fixed = 0;       // s; 0 → stability bounds
  long output_every = 10;    // steps between history samples
  long checkpoint_every = 0; // steps; 0 → final only
  bool write_vtk = false;

  Dims dims{32, 32, 32};
  double h = 5.6e-6;
  double eps0 = 0.05;
  GeometryConfig geometry;

  FlowParams flow = [] {
    FlowParams f;
    f.accel = Acceleration::Anderson;
    return f;
  }();
  double hydro_skip_threshold = 1e-3;  // max|Δε| below which the DBS solve is reused

  RemeshKernel kernel{KernelKind::M4prime};
  double c_lcfl = 0.5;
  double max_cells = 4.0;
  BoundaryMode boundary = BoundaryMode::InflowStrip;
  int strip_cells = 4;

  DiffusionSpec diffusion;
  double xi_over_h = 1.0;
  int pse_p = 10;
  int pse_cutoff = 2;

  KineticConstants kinetics;
  AttachmentSpec attachment;
  ChemOptions chem;
  double init_CO3 = 1.0;  // intrinsic mol/m³
  double init_Ca = 100.0;

  double clog_threshold = 0.2;
  int clog_window = 5;
  double kappa0 = 0;  // m²; 0 → measured at t = 0

  // canonical text the run was built from; hashed into checkpoints
  std::string source_text;

  void validate() const;
  Grid grid() const { return Grid(dims, h); }
  std::uint64_t hash() const;
};

RunConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// FNV-1a, used for config hashes in checkpoints
std::uint64_t fnv1a(const std::string& s);

}  // namespace porecrys
