#pragma once

// Subcommand bodies. Each returns the process exit code.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace porecrys::cli {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kNumerical = 3 };

struct RunArgs {
  std::filesystem::path config;
  std::filesystem::path output;  // empty → from the config
  std::filesystem::path resume;
  long max_steps = -1;
  bool json = false;
  bool quiet = false;
};
int run(const RunArgs& a);

struct ValidateArgs {
  std::string suite = "all";
  std::filesystem::path scratch;
  std::filesystem::path report;  // JSON file
  bool json = false;
  bool verbose = false;
};
int validate(const ValidateArgs& a);

struct PseArgs {
  std::vector<int> sizes{32, 64, 128};
  std::filesystem::path csv;  // empty → stdout
  bool json = false;
};
int validate_pse(const PseArgs& a);

struct PostArgs {
  std::string what;  // slice | kphi | clog
  std::filesystem::path input;  // checkpoint.bin, history.csv or slices.csv
  std::filesystem::path output;
  bool upstream = false;
  double time = -1;  // slice: sample nearest this time; < 0 → last
  double threshold = 0.2;
  int window = 5;
  bool json = false;
};
int post(const PostArgs& a);

struct GeometryArgs {
  std::string name;
  std::vector<int> dims{64, 64, 64};
  double h = 5.6e-6, eps0 = 0.05;
  std::map<std::string, double> params;
  unsigned long seed = 1;
  std::filesystem::path output;
  std::filesystem::path vtk;
  bool json = false;
};
int gen_geometry(const GeometryArgs& a);

// PORECRYS_THREADS, when set, fixes the OpenMP team size
void apply_thread_env();

}  // namespace porecrys::cli
