// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit code is the number of failures (capped at 1) so ctest sees red.

#include "suites.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  namespace v = porecrys::validation;
  CLI::App app{"porecrys acceptance criteria"};
  v::Options o;
  std::string only = "acceptance", json_out;
  app.add_option("--suite", only, "restrict to one suite")->check(CLI::IsMember(v::suite_names()));
  app.add_option("--scratch", o.scratch, "directory for the clogging runs");
  app.add_option("--json", json_out, "also write the report here");
  app.add_flag("-v,--verbose", o.verbose);
  CLI11_PARSE(app, argc, argv);

  const auto checks = v::run_suite(only, o);
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << v::format_line(c) << std::endl;
    failed += !c.passed;
  }
  std::cout << checks.size() - size_t(failed) << "/" << checks.size() << " criteria passed" << std::endl;
  if (!json_out.empty()) std::ofstream(json_out) << v::to_json(checks).dump(2) << "\n";
  return failed ? 1 : 0;
}
