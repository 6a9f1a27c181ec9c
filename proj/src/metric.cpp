#include "phivar/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "phivar/detail/parallel.hpp"
#include "phivar/detail/quadrature.hpp"
#include "phivar/detail/rng.hpp"

namespace phivar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.6931471805599453;

double softplus(double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); }

[[noreturn]] void bad_arg(const std::string& msg) { throw std::invalid_argument(msg); }

// ---------------------------------------------------------------- covering

// Real-valued covering count 0.5 (c/u)^{1/H} for HolderScaled, via logs.
double log_cover_x(double u, double c, double H) {
  return -kLog2 + (std::log(c) - std::log(u)) / H;
}

std::int64_t ceil_with_guard(double x) {
  const double r = std::nearbyint(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(x));
}

// Dynamic bitset set-cover: greedy, then exact branch and bound while the
// node budget lasts.
struct CoverProblem {
  int n = 0;
  int words = 0;
  std::vector<std::uint64_t> balls;  // balls[i*words + w]

  std::uint64_t* ball(int i) { return balls.data() + static_cast<std::size_t>(i) * words; }
  const std::uint64_t* ball(int i) const {
    return balls.data() + static_cast<std::size_t>(i) * words;
  }
};

int popcount_masked(const std::uint64_t* a, const std::uint64_t* mask, int words) {
  int c = 0;
  for (int w = 0; w < words; ++w) c += std::popcount(a[w] & mask[w]);
  return c;
}

int greedy_cover(const CoverProblem& pb) {
  const int words = pb.words;
  std::vector<std::uint64_t> uncovered(words, 0);
  for (int i = 0; i < pb.n; ++i) uncovered[i / 64] |= (1ULL << (i % 64));
  int count = 0;
  auto covered_all = [&] {
    for (int w = 0; w < words; ++w)
      if (uncovered[w]) return false;
    return true;
  };
  while (!covered_all()) {
    int best = -1, best_gain = -1;
    for (int i = 0; i < pb.n; ++i) {
      const int gain = popcount_masked(pb.ball(i), uncovered.data(), words);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    for (int w = 0; w < words; ++w) uncovered[w] &= ~pb.ball(best)[w];
    ++count;
  }
  return count;
}

struct CoverSearch {
  const CoverProblem& pb;
  long budget;
  int best;

  void dfs(std::vector<std::uint64_t>& uncovered, int chosen) {
    if (budget-- <= 0) return;
    int first = -1;
    for (int w = 0; w < pb.words && first < 0; ++w)
      if (uncovered[w]) first = w * 64 + std::countr_zero(uncovered[w]);
    if (first < 0) {
      best = std::min(best, chosen);
      return;
    }
    if (chosen + 1 >= best) return;
    // try every ball containing the first uncovered point
    for (int i = 0; i < pb.n; ++i) {
      if (!(pb.ball(i)[first / 64] >> (first % 64) & 1ULL)) continue;
      std::vector<std::uint64_t> next(uncovered);
      for (int w = 0; w < pb.words; ++w) next[w] &= ~pb.ball(i)[w];
      dfs(next, chosen + 1);
    }
  }
};

std::int64_t tabulated_cover(const PseudoMetric& d, double eps) {
  const int n = static_cast<int>(d.grid.size());
  CoverProblem pb;
  pb.n = n;
  pb.words = (n + 63) / 64;
  pb.balls.assign(static_cast<std::size_t>(n) * pb.words, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d.dist(i, j) <= eps) pb.ball(i)[j / 64] |= (1ULL << (j % 64));
  const int greedy = greedy_cover(pb);
  CoverSearch search{pb, 1'000'000, greedy};
  std::vector<std::uint64_t> uncovered(pb.words, 0);
  for (int i = 0; i < n; ++i) uncovered[i / 64] |= (1ULL << (i % 64));
  search.dfs(uncovered, 0);
  return search.best;
}

// ------------------------------------------------------- entropy integral

struct IntegrandCfg {
  double inv_alpha;
  double D;
  bool floored;
};

double phi_of_count(double N, double inv_alpha) {
  return std::pow(std::log1p(N), inv_alpha);
}

// Smooth branch (log*(D/u))^{1/alpha} integrated over [a,b], 0 < a < b.
double smooth_floored_integral(double a, double b, const IntegrandCfg& cfg) {
  auto f = [&](double u) { return phi_of_count(cfg.D / u, cfg.inv_alpha); };
  double s = 0.0;
  double hi = b;
  while (hi > a * (1.0 + 1e-14)) {
    const double lo = std::max(a, 0.5 * hi);
    s += detail::gauss8(f, lo, hi);
    hi = lo;
  }
  return s;
}

// Integral over [a,b] of (log*(max(Nc, D/u)))^{1/alpha} with constant count Nc.
double piece_integral(double a, double b, double Nc, const IntegrandCfg& cfg) {
  if (b <= a) return 0.0;
  if (!cfg.floored) return (b - a) * phi_of_count(Nc, cfg.inv_alpha);
  const double cross = cfg.D / Nc;  // D/u >= Nc iff u <= cross
  if (cross <= a) return (b - a) * phi_of_count(Nc, cfg.inv_alpha);
  if (cross >= b) return smooth_floored_integral(a, b, cfg);
  return smooth_floored_integral(a, cross, cfg) +
         (b - cross) * phi_of_count(Nc, cfg.inv_alpha);
}

// HolderScaled breakpoints: N jumps at u_k = c (2k)^{-H}.
double holder_breakpoint(std::int64_t k, double c, double H) {
  return c * std::pow(2.0 * static_cast<double>(k), -H);
}

constexpr std::int64_t kExactPieces = 1 << 20;

// Smooth surrogate for the deep-tail region where N is huge: N ~ x(u)+1/2.
double holder_surrogate(double u, double c, double H, const IntegrandCfg& cfg) {
  const double lx = log_cover_x(u, c, H);
  double log_star;
  if (lx > 36.0)
    log_star = lx;  // log(1 + x + 0.5) ~ log x
  else
    log_star = std::log1p(std::exp(lx) + 0.5);
  if (cfg.floored) {
    const double ld = std::log(cfg.D) - std::log(u);
    if (ld > lx) log_star = softplus(ld);
  }
  return std::pow(log_star, cfg.inv_alpha);
}

// Integral of the surrogate from 0 to b (b within the deep-tail zone).
double holder_surrogate_below(double b, double c, double H, const IntegrandCfg& cfg) {
  // split at the raw-vs-floored crossover if it falls inside
  const double u_cross =
      cfg.floored && H < 1.0 ? c * std::pow(2.0, -H / (1.0 - H)) : 0.0;
  auto f = [&](double u) { return holder_surrogate(u, c, H, cfg); };
  if (u_cross > 0.0 && u_cross < b)
    return detail::geometric_panels(f, u_cross) +
           smooth_floored_integral(u_cross, b, cfg);
  return detail::geometric_panels(f, b);
}

std::vector<double> holder_entropy_sweep(const PseudoMetric& d, std::vector<double> eps_sorted,
                                         double alpha, CoveringVariant variant) {
  const double c = d.c, H = d.H, D = d.diameter;
  const IntegrandCfg cfg{1.0 / alpha, D, variant == CoveringVariant::FlooredByDiameter};
  const double u1 = holder_breakpoint(1, c, H);       // N = 1 at and above
  const double u_surr = holder_breakpoint(kExactPieces, c, H);

  std::vector<double> out(eps_sorted.size());
  // prefix value of the integral at the current walked boundary
  double prefix = 0.0;
  double walked = 0.0;  // boundary up to which `prefix` is valid
  std::int64_t k = kExactPieces - 1;  // next piece to add: (u_{k+1}, u_k]
  bool seeded = false;

  for (std::size_t qi = 0; qi < eps_sorted.size(); ++qi) {
    const double eps = eps_sorted[qi];
    if (eps <= u_surr) {
      out[qi] = holder_surrogate_below(eps, c, H, cfg);
      continue;
    }
    if (!seeded) {
      prefix = holder_surrogate_below(u_surr, c, H, cfg);
      walked = u_surr;
      seeded = true;
    }
    // walk exact pieces upward until the piece containing eps
    while (k >= 1 && holder_breakpoint(k, c, H) < eps) {
      const double hi = holder_breakpoint(k, c, H);
      prefix += piece_integral(walked, hi, static_cast<double>(k + 1), cfg);
      walked = hi;
      --k;
    }
    if (eps <= u1) {
      const double Nc = static_cast<double>(k + 1);
      out[qi] = prefix + piece_integral(walked, eps, Nc, cfg);
    } else {
      // finish to u1, then the N = 1 zone (raw constant; floored smooth to D)
      if (walked < u1) {
        prefix += piece_integral(walked, u1, static_cast<double>(k + 1), cfg);
        walked = u1;
      }
      double v = prefix;
      const double top = std::min(eps, std::max(u1, D));
      if (cfg.floored)
        v += piece_integral(u1, top, 1.0, cfg);
      else
        v += (top - u1) * phi_of_count(1.0, cfg.inv_alpha);
      if (eps > std::max(u1, D)) v += (eps - std::max(u1, D)) * phi_of_count(1.0, cfg.inv_alpha);
      out[qi] = v;
      // keep prefix/walked at u1 for later queries
    }
  }
  return out;
}

std::vector<double> tabulated_entropy_sweep(const PseudoMetric& d, std::vector<double> eps_sorted,
                                            double alpha, CoveringVariant variant) {
  const int n = static_cast<int>(d.grid.size());
  if (n > 96) bad_arg("entropy_integral: tabulated grids above 96 points are not supported");
  const IntegrandCfg cfg{1.0 / alpha, d.diameter, variant == CoveringVariant::FlooredByDiameter};

  std::vector<double> bps;  // distinct positive distances, ascending
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (d.dist(i, j) > 0.0) bps.push_back(d.dist(i, j));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // N on (0, bps[0]): radius below the least distance
  const double u0 = bps.empty() ? d.diameter : bps.front();
  std::vector<double> out(eps_sorted.size());

  auto count_at = [&](double u) { return static_cast<double>(tabulated_cover(d, u)); };

  // Near-zero zone: constant count N0, possibly floored by D/u (log-singular
  // but integrable at 0); piece_integral handles both branches on [a,b] with
  // a > 0, so approach 0 geometrically.
  const double N0 = count_at(0.5 * u0);
  auto zone0 = [&](double b) {
    if (!cfg.floored) return b * phi_of_count(N0, cfg.inv_alpha);
    const double cross = std::min(b, cfg.D / N0);
    double s = (b - cross) > 0 ? (b - cross) * phi_of_count(N0, cfg.inv_alpha) : 0.0;
    s += detail::geometric_panels(
        [&](double u) { return phi_of_count(cfg.D / u, cfg.inv_alpha); }, cross);
    return s;
  };

  double prefix = 0.0, walked = 0.0;
  std::size_t next_bp = 0;
  bool seeded = false;
  for (std::size_t qi = 0; qi < eps_sorted.size(); ++qi) {
    const double eps = eps_sorted[qi];
    if (eps <= u0) {
      out[qi] = zone0(eps);
      continue;
    }
    if (!seeded) {
      prefix = zone0(u0);
      walked = u0;
      seeded = true;
    }
    while (next_bp < bps.size() && bps[next_bp] < eps) {
      const double hi = bps[next_bp];
      if (hi > walked) {
        prefix += piece_integral(walked, hi, count_at(0.5 * (walked + hi)), cfg);
        walked = hi;
      }
      ++next_bp;
    }
    const double mid_count =
        next_bp < bps.size() ? count_at(0.5 * (walked + eps)) : 1.0;
    out[qi] = prefix + piece_integral(walked, eps, mid_count, cfg);
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------ constructors

PseudoMetric holder_scaled(double c, double H) {
  if (!(c > 0.0) || !(H > 0.0) || H > 1.0) bad_arg("holder_scaled: need c > 0 and H in (0,1]");
  PseudoMetric d;
  d.kind = MetricKind::HolderScaled;
  d.c = c;
  d.H = H;
  d.diameter = c;  // attained at |s-t| = 1
  return d;
}

PseudoMetric tabulated(const Eigen::VectorXd& grid, const Eigen::MatrixXd& dist) {
  const int n = static_cast<int>(grid.size());
  if (n < 2) bad_arg("tabulated: need at least two grid points");
  if (dist.rows() != n || dist.cols() != n) bad_arg("tabulated: distance matrix shape mismatch");
  for (int i = 1; i < n; ++i)
    if (!(grid[i] > grid[i - 1])) bad_arg("tabulated: grid must be strictly increasing");
  if (grid[0] < 0.0 || grid[n - 1] > 1.0) bad_arg("tabulated: grid must lie in [0,1]");
  double D = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) bad_arg("tabulated: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      if (dist(i, j) < 0.0 || !std::isfinite(dist(i, j))) bad_arg("tabulated: invalid distance");
      if (dist(i, j) != dist(j, i)) bad_arg("tabulated: asymmetric matrix");
      D = std::max(D, dist(i, j));
    }
  }
  // probabilistic triangle-inequality check on a fixed sample of triples
  std::uint64_t state = 0x7f4a7c15ULL;
  const int triples = std::min(4096, n * n * n);
  for (int s = 0; s < triples; ++s) {
    const int i = static_cast<int>(detail::splitmix64(state += 1) % n);
    const int j = static_cast<int>(detail::splitmix64(state += 1) % n);
    const int k = static_cast<int>(detail::splitmix64(state += 1) % n);
    if (dist(i, k) > dist(i, j) + dist(j, k) + 1e-12 * std::max(1.0, D))
      bad_arg("tabulated: triangle inequality violated on sampled triple");
  }
  PseudoMetric d;
  d.kind = MetricKind::Tabulated;
  d.grid = grid;
  d.dist = dist;
  d.diameter = D;
  return d;
}

PseudoMetric load_tabulated_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) bad_arg("load_tabulated_csv: cannot open " + file.string());
  auto parse_row = [](const std::string& line) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    return row;
  };
  std::string line;
  if (!std::getline(in, line)) bad_arg("load_tabulated_csv: empty file");
  const auto grid_row = parse_row(line);
  const int n = static_cast<int>(grid_row.size());
  Eigen::VectorXd grid(n);
  for (int i = 0; i < n; ++i) grid[i] = grid_row[i];
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) bad_arg("load_tabulated_csv: truncated matrix");
    const auto row = parse_row(line);
    if (static_cast<int>(row.size()) != n) bad_arg("load_tabulated_csv: ragged row");
    for (int j = 0; j < n; ++j) dist(i, j) = row[j];
  }
  return tabulated(grid, dist);
}

double distance(const PseudoMetric& d, double s, double t) {
  if (d.kind == MetricKind::HolderScaled) return d.c * std::pow(std::abs(s - t), d.H);
  auto locate = [&](double x) {
    for (int i = 0; i < d.grid.size(); ++i)
      if (std::abs(d.grid[i] - x) <= 1e-9) return i;
    bad_arg("distance: point not on the tabulated grid");
  };
  return d.dist(locate(s), locate(t));
}

std::int64_t covering_number(const PseudoMetric& d, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("covering_number: eps must be positive");
  if (d.kind == MetricKind::Tabulated) {
    if (eps >= d.diameter) return 1;
    return tabulated_cover(d, eps);
  }
  if (eps >= d.c) return 1;
  const double x = 0.5 * std::pow(d.c / eps, 1.0 / d.H);
  if (x > 9e18) throw std::overflow_error("covering_number: count exceeds 2^63");
  return std::max<std::int64_t>(1, ceil_with_guard(x));
}

std::vector<double> entropy_integral_many(const PseudoMetric& d, std::span<const double> eps,
                                          double alpha, CoveringVariant variant) {
  for (double e : eps)
    if (!(e > 0.0)) throw std::domain_error("entropy_integral: eps must be positive");
  if (!(alpha > 0.0)) throw std::domain_error("entropy_integral: alpha must be positive");

  std::vector<std::size_t> order(eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });
  std::vector<double> sorted(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) sorted[i] = eps[order[i]];

  const std::vector<double> res = d.kind == MetricKind::HolderScaled
                                      ? holder_entropy_sweep(d, sorted, alpha, variant)
                                      : tabulated_entropy_sweep(d, sorted, alpha, variant);
  std::vector<double> out(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) out[order[i]] = res[i];
  return out;
}

double entropy_integral(const PseudoMetric& d, double eps, double alpha,
                        CoveringVariant variant) {
  const double e[1] = {eps};
  return entropy_integral_many(d, e, alpha, variant)[0];
}

// ------------------------------------------------------ metric variation

namespace {

double dyadic_sum(const VariationFunction& psi, const PseudoMetric& d, int k) {
  if (d.kind == MetricKind::HolderScaled) {
    const double n = std::pow(2.0, k);
    return n * eval(psi, d.c * std::pow(1.0 / n, d.H));
  }
  const int m = static_cast<int>(d.grid.size()) - 1;
  const int step = std::max(1, m >> k);
  double s = 0.0;
  int i = 0;
  while (i < m) {
    const int j = std::min(m, i + step);
    s += eval(psi, d.dist(i, j));
    i = j;
  }
  return s;
}

double dp_refinement(const VariationFunction& psi, const PseudoMetric& d, int grid_n) {
  if (d.kind == MetricKind::HolderScaled) {
    const int n = grid_n;
    std::vector<double> w(n + 1, 0.0);
    for (int g = 1; g <= n; ++g)
      w[g] = eval(psi, d.c * std::pow(static_cast<double>(g) / n, d.H));
    std::vector<double> best(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
      double b = -kInf;
      for (int i = 0; i < j; ++i) b = std::max(b, best[i] + w[j - i]);
      best[j] = b;
    }
    return best[n];
  }
  const int m = static_cast<int>(d.grid.size()) - 1;
  std::vector<double> best(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    double b = -kInf;
    for (int i = 0; i < j; ++i) b = std::max(b, best[i] + eval(psi, d.dist(i, j)));
    best[j] = b;
  }
  return best[m];
}

}  // namespace

MetricVariation variation_of_metric(const VariationFunction& psi, const PseudoMetric& d,
                                    const VariationOfMetricOptions& opt) {
  if (!opt.force_numeric && psi.kind == VfKind::Power && d.kind == MetricKind::HolderScaled) {
    const double ph = psi.a * d.H;
    const double cp = std::pow(d.c, psi.a);
    if (ph >= 1.0) return {VariationStatus::Finite, cp};
    return {VariationStatus::Divergent, kInf};
  }

  const int kmax = d.kind == MetricKind::HolderScaled
                       ? opt.max_dyadic_k
                       : std::min<int>(opt.max_dyadic_k,
                                       static_cast<int>(std::floor(
                                           std::log2(static_cast<double>(d.grid.size() - 1)))));
  std::vector<double> s;
  s.reserve(kmax + 1);
  double sup = 0.0;
  bool exceeded = false;
  for (int k = 0; k <= kmax; ++k) {
    const double v = dyadic_sum(psi, d, k);
    s.push_back(v);
    sup = std::max(sup, v);
    if (v > opt.divergence_threshold) {
      exceeded = true;
      break;
    }
  }
  if (exceeded) return {VariationStatus::Divergent, sup};

  const int dp_n = d.kind == MetricKind::HolderScaled
                       ? opt.dp_grid
                       : static_cast<int>(d.grid.size()) - 1;
  sup = std::max(sup, dp_refinement(psi, d, dp_n));

  // trend of the dyadic sums over the last few levels
  const int levels = static_cast<int>(s.size());
  const int tail = std::min(5, levels - 1);
  double g = 1.0;
  for (int i = levels - tail; i < levels; ++i) {
    const double prev = s[i - 1], cur = s[i];
    if (prev <= 0.0 || cur <= 0.0) continue;
    g *= cur / prev;
  }
  g = std::pow(g, 1.0 / std::max(1, tail));

  if (std::abs(g - 1.0) <= 1e-9) return {VariationStatus::Finite, sup};
  if (g >= 1.035) return {VariationStatus::Divergent, sup};
  if (g <= 0.966) return {VariationStatus::Finite, sup};
  return {VariationStatus::Inconclusive, sup};
}

// ------------------------------------------------------ chaining statistic

ChainingStatistic chaining_statistic(const std::vector<SamplePath>& paths, const PseudoMetric& d,
                                     double alpha, CoveringVariant variant, int threads) {
  if (paths.empty()) bad_arg("chaining_statistic: empty ensemble");
  const int n = paths.front().grid_size();
  for (const auto& p : paths)
    if (p.grid_size() != n) bad_arg("chaining_statistic: paths disagree on the grid");

  ChainingStatistic out;
  out.per_path.assign(paths.size(), 0.0);

  if (d.kind == MetricKind::HolderScaled) {
    std::vector<double> lag_dist(n);
    for (int h = 1; h <= n; ++h)
      lag_dist[h - 1] = d.c * std::pow(static_cast<double>(h) / n, d.H);
    const std::vector<double> deltas = entropy_integral_many(d, lag_dist, alpha, variant);
    std::vector<double> inv_delta(n);
    for (int h = 0; h < n; ++h) inv_delta[h] = 1.0 / deltas[h];

    detail::parallel_for(
        paths.size(),
        [&](std::size_t pi) {
          const Eigen::VectorXd& x = paths[pi].values;
          double theta = 0.0;
          for (int h = 1; h <= n; ++h) {
            const int len = n + 1 - h;
            const double m =
                (x.tail(len) - x.head(len)).cwiseAbs().maxCoeff();
            theta = std::max(theta, m * inv_delta[h - 1]);
          }
          out.per_path[pi] = theta;
        },
        threads);
  } else {
    const int gn = static_cast<int>(d.grid.size());
    if (gn != n + 1) bad_arg("chaining_statistic: tabulated grid does not match the paths");
    std::vector<double> ds;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (d.dist(i, j) > 0.0) ds.push_back(d.dist(i, j));
    const std::vector<double> deltas = entropy_integral_many(d, ds, alpha, variant);
    std::size_t idx = 0;
    Eigen::MatrixXd inv_delta = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (d.dist(i, j) > 0.0) inv_delta(i, j) = 1.0 / deltas[idx++];
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
      const Eigen::VectorXd& x = paths[pi].values;
      double theta = 0.0;
      for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j)
          if (inv_delta(i, j) > 0.0)
            theta = std::max(theta, std::abs(x[j] - x[i]) * inv_delta(i, j));
      out.per_path[pi] = theta;
    }
  }
  out.mean = std::accumulate(out.per_path.begin(), out.per_path.end(), 0.0) /
             static_cast<double>(paths.size());
  return out;
}

// ----------------------------------------------------- maximal inequality

MaximalInequalityReport maximal_inequality_from_samples(std::span<const double> maxima,
                                                        std::span<const double> singles, int n,
                                                        double alpha) {
  if (n < 2) bad_arg("maximal_inequality: n must be at least 2");
  MaximalInequalityReport rep;
  rep.norm_max = orlicz_norm_mc(maxima, alpha);
  rep.norm_single = orlicz_norm_mc(singles, alpha);
  rep.bound_factor = std::pow(2.0 * std::log(static_cast<double>(n)) / kLog2, 1.0 / alpha);
  rep.ratio = rep.norm_max == 0.0
                  ? 0.0
                  : rep.norm_max / (rep.bound_factor * rep.norm_single);
  return rep;
}

MaximalInequalityReport maximal_inequality_check(int n, double alpha, int trials,
                                                 std::uint64_t seed) {
  if (n < 2) bad_arg("maximal_inequality_check: n must be at least 2");
  if (trials < 1) bad_arg("maximal_inequality_check: trials must be positive");
  std::vector<double> maxima(trials), singles(trials);
  detail::GaussianStream g(detail::substream_seed(seed, 0));
  for (int t = 0; t < trials; ++t) {
    double mx = 0.0, first = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = g();
      if (i == 0) first = xi;
      mx = std::max(mx, std::abs(xi));
    }
    maxima[t] = mx;
    singles[t] = first;
  }
  return maximal_inequality_from_samples(maxima, singles, n, alpha);
}

}  // namespace phivar
