#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "phivar/experiments.hpp"

namespace {

// Remaining "--key value" (or "--key=value") tokens become experiment
// parameters, so invocations read naturally: phivar run sigma-constant --m 1
bool collect_params(const std::vector<std::string>& extras,
                    std::map<std::string, std::string>& params, std::string& error) {
  std::size_t i = 0;
  while (i < extras.size()) {
    std::string tok = extras[i];
    if (tok.rfind("--", 0) != 0) {
      error = "unexpected token '" + tok + "'";
      return false;
    }
    tok = tok.substr(2);
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      params[tok.substr(0, eq)] = tok.substr(eq + 1);
      ++i;
      continue;
    }
    if (i + 1 >= extras.size()) {
      error = "missing value for --" + tok;
      return false;
    }
    params[tok] = extras[i + 1];
    i += 2;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phivar: variation functionals, Hermite-process simulation and "
               "reproduction experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment");
  std::string experiment;
  std::string config_file;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 0;
  run->add_option("experiment", experiment, "experiment name (see list-experiments)");
  run->add_option("--config", config_file, "config file (flat key=value)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "64-bit master seed");
  run->add_option("--threads", threads, "worker cap (0 = all cores)");
  run->allow_extras();

  auto* list = app.add_subcommand("list-experiments", "print the experiment names");

  auto* validate = app.add_subcommand("validate-config", "check a config file");
  std::string validate_file;
  validate->add_option("file", validate_file, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& name : phivar::list_experiments()) std::cout << name << "\n";
      return 0;
    }
    if (validate->parsed()) {
      try {
        const phivar::ExperimentConfig cfg = phivar::parse_config_file(validate_file);
        phivar::validate_config(cfg);
      } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
      }
      std::cout << "config ok\n";
      return 0;
    }
    // run
    phivar::ExperimentConfig cfg;
    if (!config_file.empty()) cfg = phivar::parse_config_file(config_file);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (run->count("--seed")) cfg.seed = seed;
    if (cfg.seed == 0 && config_file.empty()) cfg.seed = seed;
    if (run->count("--out") || config_file.empty()) cfg.output_dir = out_dir;
    if (run->count("--threads")) cfg.threads = threads;
    std::string err;
    if (!collect_params(run->remaining(), cfg.params, err)) {
      std::cerr << "invalid arguments: " << err << "\n";
      return 2;
    }
    try {
      phivar::validate_config(cfg);
    } catch (const std::exception& e) {
      std::cerr << "invalid config: " << e.what() << "\n";
      return 2;
    }
    const bool pass = phivar::run_experiment(cfg, std::cout);
    return pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
