#include "porecrys/checkpoint.hpp"

#include "porecrys/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace porecrys {

namespace {

constexpr char kMagic[8] = {'P', 'C', 'R', 'Y', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("checkpoint: truncated while reading " + what);
  return v;
}

}  // namespace

const Eigen::ArrayXd& Checkpoint::get(const std::string& name) const {
  for (const auto& [n, a] : arrays)
    if (n == name) return a;
  throw FormatError("checkpoint: missing array '" + name + "'");
}

bool Checkpoint::has(const std::string& name) const {
  for (const auto& [n, a] : arrays)
    if (n == name) return true;
  return false;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // write to a temporary and rename, so a crash never leaves half a checkpoint
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  nlohmann::json manifest;
  manifest["format"] = "porecrys-checkpoint";
  manifest["version"] = Checkpoint::kVersion;
  manifest["config_hash"] = c.config_hash;
  manifest["step"] = c.step;
  manifest["time"] = c.time;
  manifest["arrays"] = nlohmann::json::array();
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) throw FormatError("checkpoint: cannot write " + tmp.string());
    o.write(kMagic, 8);
    put<std::uint32_t>(o, Checkpoint::kVersion);
    put<std::uint64_t>(o, c.config_hash);
    put<std::int64_t>(o, c.step);
    put<double>(o, c.time);
    put<std::uint32_t>(o, std::uint32_t(c.arrays.size()));
    for (const auto& [name, a] : c.arrays) {
      put<std::uint32_t>(o, std::uint32_t(name.size()));
      o.write(name.data(), std::streamsize(name.size()));
      put<std::uint64_t>(o, std::uint64_t(a.size()));
      const auto offset = std::uint64_t(o.tellp());
      o.write(reinterpret_cast<const char*>(a.data()), std::streamsize(a.size() * sizeof(double)));
      manifest["arrays"].push_back({{"name", name}, {"count", a.size()}, {"offset", offset}});
    }
    if (!o) throw FormatError("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  std::ofstream j(path.string() + ".json");
  j << manifest.dump(2) << "\n";
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("checkpoint: " + path.string() + " is not a checkpoint file");
  const auto version = take<std::uint32_t>(in, "version");
  if (version != Checkpoint::kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint c;
  c.config_hash = take<std::uint64_t>(in, "config hash");
  c.step = long(take<std::int64_t>(in, "step"));
  c.time = take<double>(in, "time");
  const auto n = take<std::uint32_t>(in, "array count");
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto len = take<std::uint32_t>(in, "name length");
    if (len > 4096) throw FormatError("checkpoint: corrupt array name");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("checkpoint: truncated array name");
    const auto count = take<std::uint64_t>(in, name + " size");
    if (count > (std::uint64_t(1) << 36)) throw FormatError("checkpoint: corrupt size for " + name);
    Eigen::ArrayXd a(static_cast<Eigen::Index>(count));
    if (!in.read(reinterpret_cast<char*>(a.data()), std::streamsize(count * sizeof(double))))
      throw FormatError("checkpoint: truncated data for " + name);
    c.put(name, std::move(a));
  }
  return c;
}

}  // namespace porecrys
