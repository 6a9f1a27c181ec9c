#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace phivar {

// A fully specified experiment run. `params` round-trips losslessly through
// the flat key=value config-file form (params carry a "param." prefix there).
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  int threads = 0;  // 0 = all cores
};

std::vector<std::string> list_experiments();

ExperimentConfig parse_config_file(const std::filesystem::path& file);
void write_config_file(const std::filesystem::path& file, const ExperimentConfig& cfg);

// Rejects unknown experiments, unknown or malformed parameters. Throws
// std::invalid_argument with a message naming the offender.
void validate_config(const ExperimentConfig& cfg);

// Runs the experiment, writes CSV artifacts plus a `manifest` into
// cfg.output_dir, prints a summary to `log`. Returns true iff every
// configured assertion passed.
bool run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace phivar
