#include "phivar/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "phivar/conditions.hpp"
#include "phivar/detail/parallel.hpp"
#include "phivar/detail/rng.hpp"
#include "phivar/hermite.hpp"
#include "phivar/metric.hpp"
#include "phivar/simulate.hpp"
#include "phivar/variation.hpp"

namespace phivar {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void cfg_error(const std::string& msg) { throw std::invalid_argument(msg); }

struct Params {
  const std::map<std::string, std::string>& kv;
  mutable std::vector<std::string> consumed;

  double num(const std::string& key, double def) const {
    auto it = kv.find(key);
    consumed.push_back(key);
    if (it == kv.end()) return def;
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(it->second, &pos);
    } catch (...) {
      cfg_error("parameter '" + key + "': malformed number '" + it->second + "'");
    }
    if (pos != it->second.size())
      cfg_error("parameter '" + key + "': malformed number '" + it->second + "'");
    return v;
  }
  int integer(const std::string& key, int def) const {
    const double v = num(key, def);
    if (v != std::floor(v)) cfg_error("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  std::string str(const std::string& key, const std::string& def) const {
    consumed.push_back(key);
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
  }
  std::vector<int> int_list(const std::string& key, const std::string& def) const {
    const std::string s = str(key, def);
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stoi(item));
      } catch (...) {
        cfg_error("parameter '" + key + "': malformed integer list '" + s + "'");
      }
    }
    if (out.empty()) cfg_error("parameter '" + key + "': empty list");
    return out;
  }
  void finish() const {
    for (const auto& [key, val] : kv) {
      if (std::find(consumed.begin(), consumed.end(), key) == consumed.end())
        cfg_error("unknown parameter '" + key + "'");
    }
  }
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "experiment=" << cfg.experiment << "\n";
  os << "seed=" << cfg.seed << "\n";
  os << "threads=" << cfg.threads << "\n";
  for (const auto& [k, v] : cfg.params) os << "param." << k << "=" << v << "\n";
  return os.str();
}

std::ofstream open_artifact(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream out(cfg.output_dir / name);
  if (!out) throw std::runtime_error("cannot write artifact " + name);
  return out;
}

void write_manifest(const ExperimentConfig& cfg, double wall_seconds, bool passed) {
  std::ofstream out(cfg.output_dir / "manifest");
  out << "config_hash=" << std::hex << fnv1a(canonical_text(cfg)) << std::dec << "\n"
      << "phivar_version=" << kVersion << "\n"
      << "eigen_version=" << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
      << EIGEN_MINOR_VERSION << "\n"
      << "wall_seconds=" << wall_seconds << "\n"
      << "passed=" << (passed ? 1 : 0) << "\n";
}

// --------------------------------------------------------- sigma-constant

bool run_sigma(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const int m = p.integer("m", 1);
  const double H = p.num("H", 0.75);
  const int nodes = p.integer("nodes", 0);
  const double U = p.num("U", 0.0);
  const double tol = p.num("tol", 1e-3);
  p.finish();

  SigmaResult res;
  double target = 0.0;
  bool pass = true;
  if (m == 1 && H == 0.5) {
    // Brownian boundary: the kernel normalization degenerates at H = 1/2;
    // the fBm machinery gives sigma = 2^{1/(2H)} = 2 directly.
    res.sigma = 2.0;
    res.spectral_sup = 1.0;
    res.method = "fbm-boundary";
    target = 2.0;
  } else {
    DiscretizedKernel disc;
    bool loaded = false;
    std::filesystem::path cache_file;
    if (const char* cache_dir = std::getenv("PHIVAR_CACHE")) {
      const double u_eff = U != 0.0 ? U : (m == 1 ? 1e6 : (m == 2 ? 2000.0 : 200.0));
      const int n_eff = nodes != 0 ? nodes : (m == 1 ? 2048 : (m == 2 ? 128 : 48));
      std::ostringstream name;
      name << "kernel-m" << m << "-H" << fmt(H) << "-U" << fmt(u_eff) << "-n" << n_eff
           << ".bin";
      cache_file = std::filesystem::path(cache_dir) / name.str();
      if (auto hit = load_kernel_cache(cache_file, m, H, u_eff, n_eff)) {
        disc = std::move(*hit);
        loaded = true;
      }
    }
    if (!loaded) {
      disc = discretize_kernel(m, H, U, nodes);
      if (!cache_file.empty()) {
        std::filesystem::create_directories(cache_file.parent_path());
        save_kernel_cache(cache_file, disc);
      }
    }
    res = sigma_mH(disc);
    if (m == 1) {
      target = std::pow(2.0, 1.0 / (2.0 * H));
      pass = std::abs(res.sigma - target) <= tol * target;
    } else {
      const double bound = std::pow(2.0, m / 2.0) / std::sqrt(std::tgamma(m + 1.0));
      target = bound;  // strict upper bound, not an equality target
      pass = res.converged && std::pow(res.sigma, H) < bound - 1e-3;
    }
  }
  if (m == 1 && H == 0.5) pass = true;

  auto out = open_artifact(cfg, "sigma.csv");
  out << "m,H,sigma,target,spectral_sup,method,converged\n";
  out << m << "," << fmt(H) << "," << fmt(res.sigma) << "," << fmt(target) << ","
      << fmt(res.spectral_sup) << "," << res.method << "," << (res.converged ? 1 : 0) << "\n";

  log << "sigma-constant: m=" << m << " H=" << H << " sigma=" << res.sigma
      << (m == 1 ? " target=" : " bound(sigma^H<)=") << target << " ["
      << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

// ----------------------------------------------------------- series-check

bool run_series(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const int case_id = p.integer("case", 1);
  const int m_max = p.integer("m_max", 200);
  const std::string expect = p.str("expect", "converges");
  Theorem1Config tc;
  switch (case_id) {
    case 1: tc = preset_case1(p.num("p", 2.0), p.num("alpha", 2.0)); break;
    case 2: tc = preset_case2(p.num("p", 2.0), p.num("alpha", 2.0)); break;
    case 3:
      tc = preset_case3(p.num("alpha", 2.0), p.num("beta0", 1.0), p.num("beta", 1.4));
      break;
    case 4:
      tc = preset_case4(p.num("alpha", 2.0), p.num("c", 1.0), p.num("r", 1.0),
                        p.num("v", 2.0));
      break;
    default: cfg_error("parameter 'case' must be 1..4");
  }
  const double c_scale = p.num("C_scale", 1.0);
  tc.C *= c_scale;
  p.finish();

  const SeriesVerdict verdict = series_check(tc, m_max);
  {
    auto out = open_artifact(cfg, "series.csv");
    write_series_csv(out, verdict);
  }
  const std::string got = to_string(verdict.status);
  std::string want = expect;
  want[0] = static_cast<char>(std::toupper(want[0]));
  const bool pass = got == want;
  log << "series-check: case " << case_id << " -> " << got << " (expected " << want
      << ", tail_ratio=" << verdict.tail_ratio << ") [" << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

// ------------------------------------------------------ limiting-variation

bool run_limiting_variation(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const int m = p.integer("m", 1);
  const double H = p.num("H", 0.5);
  const int n = p.integer("grid", 4096);
  const int paths = p.integer("paths", 20);
  const double delta_factor = p.num("delta_factor", 4.0);
  const double lo = p.num("lo", 1.0);
  const double hi = p.num("hi", 3.5);
  p.finish();

  const double delta = delta_factor / std::sqrt(static_cast<double>(n));
  const VariationFunction phi = hermite_optimal(m, H);
  const double target = m == 1 ? std::pow(2.0, 1.0 / (2.0 * H)) : 0.0;

  std::vector<double> sups(paths), meshes(paths);
  if (m == 1) {
    detail::parallel_for(
        paths,
        [&](std::size_t i) {
          const SamplePath path = simulate_fbm(H, n, detail::substream_seed(cfg.seed, i));
          const PartitionResult r = sup_variation(path, phi, delta);
          sups[i] = r.value;
          meshes[i] = r.mesh;
        },
        cfg.threads);
  } else {
    HermiteSimulator sim(m, H, n);
    detail::parallel_for(
        paths,
        [&](std::size_t i) {
          const SamplePath path = sim.path(detail::substream_seed(cfg.seed, i));
          const PartitionResult r = sup_variation(path, phi, delta);
          sups[i] = r.value;
          meshes[i] = r.mesh;
        },
        cfg.threads);
  }

  double mean = 0.0, vmin = sups[0], vmax = sups[0];
  for (double v : sups) {
    mean += v;
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  mean /= paths;

  auto out = open_artifact(cfg, "limvar.csv");
  out << "path,seed,delta,sup_v_phi,mesh\n";
  for (int i = 0; i < paths; ++i)
    out << i << "," << detail::substream_seed(cfg.seed, i) << "," << fmt(delta) << ","
        << fmt(sups[i]) << "," << fmt(meshes[i]) << "\n";

  const bool pass = m != 1 || (mean >= lo && mean <= hi);
  log << "limiting-variation: m=" << m << " H=" << H << " n=" << n << " delta=" << delta
      << " mean sup v_Phi=" << mean << " (min " << vmin << ", max " << vmax << ")";
  if (m == 1) log << " target(delta->0)=" << target << " bracket=[" << lo << "," << hi << "]";
  log << " [" << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

// ---------------------------------------------------------------- chaining

bool run_chaining(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const double H = p.num("H", 0.5);
  const double alpha = p.num("alpha", 2.0);
  const std::vector<int> grids = p.int_list("grids", "4096,16384,65536");
  const int paths = p.integer("paths", 20);
  const double growth_cap = p.num("growth_cap", 1.10);
  p.finish();

  auto out = open_artifact(cfg, "theta.csv");
  out << "n,mean_theta,max_theta\n";
  std::vector<double> means;
  for (int n : grids) {
    std::vector<SamplePath> ensemble(paths);
    detail::parallel_for(
        paths,
        [&](std::size_t i) {
          ensemble[i] = simulate_fbm(H, n, detail::substream_seed(cfg.seed, i));
        },
        cfg.threads);
    const PseudoMetric d = holder_scaled(1.0, H);
    const ChainingStatistic theta =
        chaining_statistic(ensemble, d, alpha, CoveringVariant::FlooredByDiameter, cfg.threads);
    double mx = 0.0;
    for (double v : theta.per_path) mx = std::max(mx, v);
    means.push_back(theta.mean);
    out << n << "," << fmt(theta.mean) << "," << fmt(mx) << "\n";
  }
  const double growth = means.back() / means.front();
  const bool pass = std::isfinite(growth) && growth <= growth_cap;
  log << "chaining: H=" << H << " alpha=" << alpha << " mean Theta " << means.front() << " -> "
      << means.back() << " growth=" << growth << " cap=" << growth_cap << " ["
      << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

// -------------------------------------------------------------- covariance

bool run_covariance(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const std::string generator = p.str("generator", "fbm");
  const double H = p.num("H", 0.6);
  const int n = p.integer("n", 1024);
  const int paths = p.integer("paths", 10000);
  const int subgrid = p.integer("subgrid", 8);
  const double sigma_cap = p.num("sigma_cap", generator == "fbm" ? 3.0 : 5.0);
  const int m = p.integer("m", 2);
  p.finish();

  std::vector<SamplePath> ensemble(paths);
  if (generator == "fbm") {
    detail::parallel_for(
        paths,
        [&](std::size_t i) {
          ensemble[i] = simulate_fbm(H, n, detail::substream_seed(cfg.seed, i));
        },
        cfg.threads);
  } else if (generator == "hermite") {
    HermiteSimulator sim(m, H, n);
    detail::parallel_for(
        paths,
        [&](std::size_t i) { ensemble[i] = sim.path(detail::substream_seed(cfg.seed, i)); },
        cfg.threads);
  } else {
    cfg_error("parameter 'generator' must be fbm or hermite");
  }

  const CovarianceReport rep = covariance_report(ensemble, subgrid);
  auto out = open_artifact(cfg, "cov.csv");
  out << "s,t,empirical,model,deviation,mc_sigma\n";
  for (int a = 0; a < subgrid; ++a)
    for (int b = 0; b < subgrid; ++b)
      out << fmt(rep.times[a]) << "," << fmt(rep.times[b]) << "," << fmt(rep.empirical(a, b))
          << "," << fmt(rep.model(a, b)) << "," << fmt(rep.deviation(a, b)) << ","
          << fmt(rep.mc_sigma(a, b)) << "\n";

  const bool pass = rep.max_sigma_units < sigma_cap;
  log << "covariance: " << generator << " H=" << H << " max deviation "
      << rep.max_abs_dev << " (" << rep.max_sigma_units << " MC-sigma, cap " << sigma_cap
      << ") [" << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

// ---------------------------------------------------------------- jm-bound

bool run_jm_bound(const ExperimentConfig& cfg, const Params& p, std::ostream& log) {
  const double H = p.num("H", 0.5);
  const double pexp = p.num("p", 3.0);
  const std::vector<int> grids = p.int_list("grids", "1024,4096,16384");
  const int paths = p.integer("paths", 20);
  const double stability = p.num("stability", 0.20);
  p.finish();

  const PseudoMetric d = holder_scaled(1.0, H);
  auto out = open_artifact(cfg, "jm.csv");
  out << "n,mean_norm,wp,ratio\n";
  std::vector<double> ratios;
  for (int n : grids) {
    std::vector<SamplePath> ensemble(paths);
    detail::parallel_for(
        paths,
        [&](std::size_t i) {
          ensemble[i] = simulate_fbm(H, n, detail::substream_seed(cfg.seed, i));
        },
        cfg.threads);
    const JmBoundReport rep = jm_bound_report(ensemble, pexp, d, cfg.threads);
    if (!rep.ratio_valid) {
      log << "jm-bound: W_p not finite; no ratio [FAIL]\n";
      return false;
    }
    ratios.push_back(rep.ratio);
    out << n << "," << fmt(rep.mean_norm) << "," << fmt(rep.wp) << "," << fmt(rep.ratio)
        << "\n";
  }
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  const bool pass = (*mx - *mn) / *mn <= stability;
  log << "jm-bound: H=" << H << " p=" << pexp << " ratio range [" << *mn << ", " << *mx
      << "] rel spread=" << (*mx - *mn) / *mn << " cap=" << stability << " ["
      << (pass ? "PASS" : "FAIL") << "]\n";
  return pass;
}

}  // namespace

std::vector<std::string> list_experiments() {
  return {"limiting-variation", "sigma-constant", "series-check",
          "chaining",           "covariance",     "jm-bound"};
}

ExperimentConfig parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) cfg_error("cannot open config file " + file.string());
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      cfg_error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "experiment") cfg.experiment = val;
      else if (key == "seed") cfg.seed = std::stoull(val);
      else if (key == "output_dir") cfg.output_dir = val;
      else if (key == "threads") cfg.threads = std::stoi(val);
      else if (key.rfind("param.", 0) == 0) cfg.params[key.substr(6)] = val;
      else cfg_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (...) {
      cfg_error("config line " + std::to_string(lineno) + ": malformed value '" + val + "'");
    }
  }
  return cfg;
}

void write_config_file(const std::filesystem::path& file, const ExperimentConfig& cfg) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write config file " + file.string());
  out << "experiment=" << cfg.experiment << "\n"
      << "seed=" << cfg.seed << "\n"
      << "output_dir=" << cfg.output_dir.string() << "\n"
      << "threads=" << cfg.threads << "\n";
  for (const auto& [k, v] : cfg.params) out << "param." << k << "=" << v << "\n";
}

void validate_config(const ExperimentConfig& cfg) {
  const auto known = list_experiments();
  if (std::find(known.begin(), known.end(), cfg.experiment) == known.end())
    cfg_error("unknown experiment '" + cfg.experiment + "'");
  // dry-run the parameter parsing
  std::ostringstream devnull;
  Params p{cfg.params, {}};
  if (cfg.experiment == "sigma-constant") {
    p.integer("m", 1);
    p.num("H", 0.75);
    p.integer("nodes", 0);
    p.num("U", 0.0);
    p.num("tol", 1e-3);
  } else if (cfg.experiment == "series-check") {
    const int c = p.integer("case", 1);
    if (c < 1 || c > 4) cfg_error("parameter 'case' must be 1..4");
    p.num("p", 2.0);
    p.num("alpha", 2.0);
    p.num("beta0", 1.0);
    p.num("beta", 1.4);
    p.num("c", 1.0);
    p.num("r", 1.0);
    p.num("v", 2.0);
    p.integer("m_max", 200);
    p.str("expect", "converges");
    p.num("C_scale", 1.0);
  } else if (cfg.experiment == "limiting-variation") {
    p.integer("m", 1);
    p.num("H", 0.5);
    p.integer("grid", 4096);
    p.integer("paths", 20);
    p.num("delta_factor", 4.0);
    p.num("lo", 1.0);
    p.num("hi", 3.5);
  } else if (cfg.experiment == "chaining") {
    p.num("H", 0.5);
    p.num("alpha", 2.0);
    p.int_list("grids", "4096,16384,65536");
    p.integer("paths", 20);
    p.num("growth_cap", 1.10);
  } else if (cfg.experiment == "covariance") {
    p.str("generator", "fbm");
    p.num("H", 0.6);
    p.integer("n", 1024);
    p.integer("paths", 10000);
    p.integer("subgrid", 8);
    p.num("sigma_cap", 3.0);
    p.integer("m", 2);
  } else if (cfg.experiment == "jm-bound") {
    p.num("H", 0.5);
    p.num("p", 3.0);
    p.int_list("grids", "1024,4096,16384");
    p.integer("paths", 20);
    p.num("stability", 0.20);
  }
  p.finish();
}

bool run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const Params p{cfg.params, {}};
  bool pass = false;
  if (cfg.experiment == "sigma-constant") pass = run_sigma(cfg, p, log);
  else if (cfg.experiment == "series-check") pass = run_series(cfg, p, log);
  else if (cfg.experiment == "limiting-variation") pass = run_limiting_variation(cfg, p, log);
  else if (cfg.experiment == "chaining") pass = run_chaining(cfg, p, log);
  else if (cfg.experiment == "covariance") pass = run_covariance(cfg, p, log);
  else if (cfg.experiment == "jm-bound") pass = run_jm_bound(cfg, p, log);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, wall, pass);
  return pass;
}

}  // namespace phivar
