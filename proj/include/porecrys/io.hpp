#pragma once

#include "porecrys/fields.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace porecrys {

enum class VoxelMap { Binary, Grayscale };

// Headerless uint8 volume, x fastest. Binary: byte >= threshold is solid (ε₀),
// otherwise fluid (1). Grayscale: ε = 1 − (1 − ε₀)·byte/255.
PorosityField load_voxels(const std::filesystem::path& path, Dims dims, int solid_threshold,
                          double eps0, double h = 1.0, VoxelMap map = VoxelMap::Binary);

void save_voxels(const std::filesystem::path& path, const PorosityField& eps, int solid_byte = 255);

struct VtkScalar {
  std::string name;
  const ScalarField<double>* field;
};
struct VtkVector {
  std::string name;
  const VectorField<double>* field;
};

// legacy STRUCTURED_POINTS; binary bodies are big-endian float64
void write_vtk(const std::filesystem::path& path, const Grid& g, const std::vector<VtkScalar>& scalars,
               const std::vector<VtkVector>& vectors, bool binary = true,
               const std::string& title = "porecrys");

// RFC-4180 writer; cells are quoted only when needed.
class CsvWriter {
 public:
  CsvWriter() = default;
  explicit CsvWriter(const std::filesystem::path& path, bool append = false);
  bool is_open() const { return out_.is_open(); }
  void header(const std::vector<std::string>& cols) { row(cols); }
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  void flush() { out_.flush(); }

  static std::string escape(const std::string& cell);
  static std::string num(double v);

 private:
  std::ofstream out_;
};

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace porecrys
