#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace porecrys {

// Versioned little-endian container of named float64 arrays, plus a JSON
// manifest written next to it (<path>.json) describing the layout.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t config_hash = 0;
  long step = 0;
  double time = 0;
  std::vector<std::pair<std::string, Eigen::ArrayXd>> arrays;

  void put(const std::string& name, Eigen::ArrayXd a) { arrays.emplace_back(name, std::move(a)); }
  const Eigen::ArrayXd& get(const std::string& name) const;
  bool has(const std::string& name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace porecrys
