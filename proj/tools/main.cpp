#include "commands.hpp"

#include "suites.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace porecrys::cli;
  apply_thread_env();

  CLI::App app{"porecrys: precipitation and crystallization in voxelized porous media"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "porecrys 0.1");

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "run a simulation from a TOML config");
  run_cmd->add_option("config", ra.config, "TOML config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output", ra.output, "output directory (overrides run.output_dir)");
  run_cmd->add_option("--resume", ra.resume, "checkpoint.bin written by the same config")->check(CLI::ExistingFile);
  run_cmd->add_option("--max-steps", ra.max_steps, "stop after this many steps");
  run_cmd->add_flag("--json", ra.json, "print the run summary as JSON");
  run_cmd->add_flag("-q,--quiet", ra.quiet, "no progress lines");

  ValidateArgs va;
  auto* val_cmd = app.add_subcommand("validate", "run an acceptance suite");
  val_cmd->add_option("suite", va.suite, "pse | hydro | particles | chemistry | clogging | all | acceptance")
      ->check(CLI::IsMember(porecrys::validation::suite_names()));
  val_cmd->add_option("--scratch", va.scratch, "directory for clogging-run outputs");
  val_cmd->add_option("--report", va.report, "also write the JSON report to this file");
  val_cmd->add_flag("--json", va.json, "print the report as JSON");
  val_cmd->add_flag("-v,--verbose", va.verbose, "progress on stderr");

  PseArgs pa;
  auto* pse_cmd = app.add_subcommand("validate-pse", "DC-PSE convergence study as CSV");
  pse_cmd->add_option("--sizes", pa.sizes, "grid sizes per axis")->delimiter(',');
  pse_cmd->add_option("--csv", pa.csv, "write the CSV here instead of stdout");
  pse_cmd->add_flag("--json", pa.json, "print the check as JSON");

  PostArgs po;
  auto* post_cmd = app.add_subcommand("post", "tables from a checkpoint or history/slices CSV");
  post_cmd->add_option("what", po.what, "slice | kphi | clog")->required()->check(CLI::IsMember({"slice", "kphi", "clog"}));
  post_cmd->add_option("input", po.input, "checkpoint.bin, history.csv or slices.csv")
      ->required()
      ->check(CLI::ExistingFile);
  post_cmd->add_option("-o,--output", po.output, "CSV output (default stdout)");
  post_cmd->add_flag("--upstream", po.upstream, "use the upstream-quarter series");
  post_cmd->add_option("--time", po.time, "slice: sample nearest this time (default last)");
  post_cmd->add_option("--threshold", po.threshold, "clog: fractional drop")->check(CLI::Range(0.0, 1.0));
  post_cmd->add_option("--window", po.window, "clog: samples per window")->check(CLI::Range(2, 1000000));
  post_cmd->add_flag("--json", po.json, "print JSON instead of CSV");

  GeometryArgs ga;
  auto* geo_cmd = app.add_subcommand("gen-geometry", "write a synthetic geometry as a uint8 voxel file");
  geo_cmd->add_option("name", ga.name, "channel | throat | sphere-pack | slab")->required();
  geo_cmd->add_option("--dims", ga.dims, "nx,ny,nz")->delimiter(',');
  geo_cmd->add_option("--voxel", ga.h, "voxel size, m");
  geo_cmd->add_option("--eps0", ga.eps0, "solid porosity");
  std::vector<std::string> params;
  geo_cmd->add_option("-p,--param", params, "generator parameter key=value")->delimiter(',');
  geo_cmd->add_option("--seed", ga.seed, "RNG seed");
  geo_cmd->add_option("-o,--output", ga.output, "voxel file (255 = solid)");
  geo_cmd->add_option("--vtk", ga.vtk, "also write ε as VTK");
  geo_cmd->add_flag("--json", ga.json, "print a JSON summary");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return run(ra);
  if (*val_cmd) return validate(va);
  if (*pse_cmd) return validate_pse(pa);
  if (*post_cmd) return post(po);
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "porecrys: --param expects key=value, got '" << kv << "'" << std::endl;
      return kConfig;
    }
    try {
      ga.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "porecrys: --param " << kv << ": not a number" << std::endl;
      return kConfig;
    }
  }
  return gen_geometry(ga);
}
