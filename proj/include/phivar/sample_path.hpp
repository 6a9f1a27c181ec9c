#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace phivar {

struct PathMeta {
  std::string generator;  // "fbm", "fbm-dense", "hermite", "file", ...
  int m = 1;
  double H = 0.5;
  std::uint64_t seed = 0;
};

// Values on the uniform grid t_i = i/n, i = 0..n. values[0] is always 0.
struct SamplePath {
  Eigen::VectorXd values;
  PathMeta meta;

  int grid_size() const { return static_cast<int>(values.size()) - 1; }
  double t(int i) const { return static_cast<double>(i) / grid_size(); }
};

void validate_path(const SamplePath& path);  // throws on broken invariants

void write_path_csv(const std::filesystem::path& file, const SamplePath& path);
SamplePath read_path_csv(const std::filesystem::path& file);

// Compact ensemble container: textual header line with the parameters,
// then little-endian IEEE doubles, one row of n+1 values per path.
void write_ensemble(const std::filesystem::path& file, const std::vector<SamplePath>& paths);
std::vector<SamplePath> read_ensemble(const std::filesystem::path& file);

}  // namespace phivar
