#pragma once

#include <stdexcept>
#include <string>

namespace porecrys {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct UnsupportedBoundaryError : Error {
  using Error::Error;
};

struct KernelError : Error {
  using Error::Error;
};

struct UndefinedPermeabilityError : Error {
  using Error::Error;
};

// negative concentrations beyond round-off; the caller should shrink dt
struct StabilityError : Error {
  using Error::Error;
};

struct PropagationError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

// `path` is the dotted config key, e.g. "chemistry.K_c"
struct ConfigError : Error {
  ConfigError(std::string path, const std::string& msg)
      : Error(path + ": " + msg), path(std::move(path)) {}
  std::string path;
};

}  // namespace porecrys
