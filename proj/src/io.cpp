#include "porecrys/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>

namespace porecrys {

PorosityField load_voxels(const std::filesystem::path& path, Dims dims, int solid_threshold,
                          double eps0, double h, VoxelMap map) {
  PorosityField::check_eps0(eps0);
  for (int d : dims)
    if (d <= 0) throw ParameterError("load_voxels: dims must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("load_voxels: cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Index expected = Index(dims[0]) * dims[1] * dims[2];
  if (Index(bytes.size()) != expected)
    throw FormatError("load_voxels: " + path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, expected " + std::to_string(expected));
  Grid g(dims, h);
  ScalarField<double> e(g, 1.0);
  for (Index n = 0; n < expected; ++n) {
    const int b = static_cast<unsigned char>(bytes[size_t(n)]);
    if (map == VoxelMap::Binary)
      e[n] = b >= solid_threshold ? eps0 : 1.0;
    else
      e[n] = 1.0 - (1.0 - eps0) * b / 255.0;
  }
  return PorosityField(std::move(e), eps0);
}

void save_voxels(const std::filesystem::path& path, const PorosityField& eps, int solid_byte) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("save_voxels: cannot open " + path.string());
  const double mid = 0.5 * (1.0 + eps.eps0);
  for (Index n = 0; n < eps.eps.size(); ++n) {
    const char b = char(eps[n] < mid ? solid_byte : 0);
    out.put(b);
  }
}

namespace {

void put_be(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  if constexpr (std::endian::native == std::endian::little) u = __builtin_bswap64(u);
  out.write(reinterpret_cast<const char*>(&u), sizeof u);
}

}  // namespace

void write_vtk(const std::filesystem::path& path, const Grid& g, const std::vector<VtkScalar>& scalars,
               const std::vector<VtkVector>& vectors, bool binary, const std::string& title) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("write_vtk: cannot open " + path.string());
  out << "# vtk DataFile Version 3.0\n" << title << "\n" << (binary ? "BINARY" : "ASCII") << "\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << g.dims[0] << " " << g.dims[1] << " " << g.dims[2] << "\n";
  out << std::setprecision(17);
  out << "ORIGIN " << g.origin[0] << " " << g.origin[1] << " " << g.origin[2] << "\n";
  out << "SPACING " << g.h << " " << g.h << " " << g.h << "\n";
  out << "POINT_DATA " << g.size() << "\n";
  for (const auto& s : scalars) {
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (Index n = 0; n < g.size(); ++n) {
      if (binary)
        put_be(out, (*s.field)[n]);
      else
        out << (*s.field)[n] << "\n";
    }
    if (binary) out << "\n";
  }
  for (const auto& v : vectors) {
    out << "VECTORS " << v.name << " double\n";
    for (Index n = 0; n < g.size(); ++n)
      for (int c = 0; c < 3; ++c) {
        if (binary)
          put_be(out, v.field->data(n, c));
        else
          out << v.field->data(n, c) << (c == 2 ? "\n" : " ");
      }
    if (binary) out << "\n";
  }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw FormatError("csv: cannot open " + path.string());
}

std::string CsvWriter::escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string q = "\"";
  for (char c : cell) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string CsvWriter::num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << escape(cells[i]);
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << num(values[i]);
  out_ << "\r\n";
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("csv: cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cell += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get();
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
    }
  }
  if (any) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace porecrys
