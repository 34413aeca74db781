#pragma once

// Acceptance studies shared by the CLI (`validate`) and the test binaries.
// Each check carries its own numbers so reports can be written as JSON.

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace porecrys::validation {

struct Check {
  std::string id;    // "1".."10", or a sub-check such as "6a"
  std::string name;
  bool passed = false;
  std::string detail;  // one line, human readable
  double seconds = 0;
  nlohmann::json data;
};

struct Options {
  std::filesystem::path presets = PORECRYS_PRESET_DIR;
  std::filesystem::path scratch = std::filesystem::temp_directory_path() / "porecrys_validation";
  std::vector<int> pse_sizes{32, 64, 128};
  bool verbose = false;
};

Check pse_convergence(const Options& o);
Check dimensionless(const Options& o);
Check kozeny_carman_limit(const Options& o);
Check brinkman_channel(const Options& o);
Check incompressibility(const Options& o);
Check remesh_conservation(const Options& o);
Check calcium_budget(const Options& o);
Check exchange_conservation(const Options& o);
Check conservation(const Options& o);  // 6a–6c combined
Check box_chemistry(const Options& o);
Check attachment_anchors(const Options& o);

// the paired throat runs behind the clogging and K–φ criteria
struct ClogRun {
  std::string label;
  std::filesystem::path output;
  double kappa_ratio_up = 1, kappa_ratio = 1;
  std::vector<double> time, phi, kappa, phi_up, kappa_up;
  std::vector<std::pair<size_t, size_t>> events;  // sample ranges of upstream or full-window events
  double Pe = 0, Da_prec = 0, Da_crys = 0;
  double seconds = 0;
};
ClogRun run_clog_preset(const std::string& preset_file, const Options& o);
Check clogging(const ClogRun& strong, const ClogRun& weak);
Check kphi_sanity(const ClogRun& strong);

// pse | hydro | particles | chemistry | clogging | all
std::vector<std::string> suite_names();
std::vector<Check> run_suite(const std::string& name, const Options& o);

nlohmann::json to_json(const std::vector<Check>& checks);
std::string format_line(const Check& c);

}  // namespace porecrys::validation
