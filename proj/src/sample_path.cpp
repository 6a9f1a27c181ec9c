#include "phivar/sample_path.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phivar {

static_assert(std::endian::native == std::endian::little,
              "ensemble files are little-endian; big-endian hosts are unsupported");

void validate_path(const SamplePath& path) {
  if (path.values.size() < 2) throw std::invalid_argument("sample path: need at least 2 points");
  if (path.values[0] != 0.0) throw std::invalid_argument("sample path: values[0] must be 0");
  for (Eigen::Index i = 0; i < path.values.size(); ++i)
    if (!std::isfinite(path.values[i]))
      throw std::invalid_argument("sample path: non-finite value");
}

void write_path_csv(const std::filesystem::path& file, const SamplePath& path) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("write_path_csv: cannot open " + file.string());
  out << "t,value\n";
  char buf[64];
  for (Eigen::Index i = 0; i < path.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n",
                  static_cast<double>(i) / (path.values.size() - 1), path.values[i]);
    out << buf;
  }
}

SamplePath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("read_path_csv: cannot open " + file.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_path_csv: malformed row");
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  SamplePath p;
  p.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  p.meta.generator = "file";
  validate_path(p);
  return p;
}

void write_ensemble(const std::filesystem::path& file, const std::vector<SamplePath>& paths) {
  if (paths.empty()) throw std::invalid_argument("write_ensemble: empty ensemble");
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_ensemble: cannot open " + file.string());
  const auto& meta = paths.front().meta;
  const int n = paths.front().grid_size();
  for (const auto& p : paths)
    if (p.grid_size() != n) throw std::invalid_argument("write_ensemble: mixed grid sizes");
  std::ostringstream header;
  header << "phivar-ensemble v1 generator=" << meta.generator << " m=" << meta.m
         << " H=" << meta.H << " seed=" << meta.seed << " paths=" << paths.size()
         << " grid=" << n << "\n";
  out << header.str();
  for (const auto& p : paths)
    out.write(reinterpret_cast<const char*>(p.values.data()),
              static_cast<std::streamsize>(sizeof(double) * p.values.size()));
}

std::vector<SamplePath> read_ensemble(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("read_ensemble: cannot open " + file.string());
  std::string header;
  std::getline(in, header);
  PathMeta meta;
  std::size_t n_paths = 0, grid = 0;
  {
    std::istringstream hs(header);
    std::string tag, ver, kv;
    hs >> tag >> ver;
    if (tag != "phivar-ensemble" || ver != "v1")
      throw std::runtime_error("read_ensemble: unrecognized header");
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "generator") meta.generator = val;
      else if (key == "m") meta.m = std::stoi(val);
      else if (key == "H") meta.H = std::stod(val);
      else if (key == "seed") meta.seed = std::stoull(val);
      else if (key == "paths") n_paths = std::stoull(val);
      else if (key == "grid") grid = std::stoull(val);
    }
  }
  if (n_paths == 0 || grid == 0) throw std::runtime_error("read_ensemble: incomplete header");
  std::vector<SamplePath> paths(n_paths);
  for (auto& p : paths) {
    p.values.resize(static_cast<Eigen::Index>(grid + 1));
    in.read(reinterpret_cast<char*>(p.values.data()),
            static_cast<std::streamsize>(sizeof(double) * (grid + 1)));
    if (!in) throw std::runtime_error("read_ensemble: truncated body");
    p.meta = meta;
    validate_path(p);
  }
  return paths;
}

}  // namespace phivar
