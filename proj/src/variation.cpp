#include "phivar/variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "phivar/detail/parallel.hpp"

namespace phivar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// DP over a subsequence `idx` of grid indices; window in subsequence steps
// is resolved back to grid distance through idx. Left-fold accumulation so
// the value of any particular partition matches a plain running sum
// bit-for-bit.
struct DpResult {
  double value;
  std::vector<int> partition;  // grid indices
};

DpResult dp_sup(const SamplePath& f, const std::vector<int>& idx, const VariationFunction& phi,
                int max_gap /* in grid units, <=0 means unbounded */) {
  const int k = static_cast<int>(idx.size()) - 1;
  const auto& x = f.values;
  auto phi_inc = [&](int a, int b) { return eval(phi, std::abs(x[idx[b]] - x[idx[a]])); };
  auto gap_ok = [&](int a, int b) { return max_gap <= 0 || idx[b] - idx[a] <= max_gap; };

  std::vector<double> best(k + 1, -kInf);
  best[0] = 0.0;
  for (int j = 1; j <= k; ++j) {
    double b = -kInf;
    for (int i = j - 1; i >= 0; --i) {
      if (!gap_ok(i, j)) break;  // gaps only grow as i decreases
      b = std::max(b, best[i] + phi_inc(i, j));
    }
    best[j] = b;
  }

  // optimal-edge DAG: backward reachability, then the lexicographically
  // smallest 0 -> k walk
  std::vector<char> reach(k + 1, 0);
  reach[k] = 1;
  for (int i = k - 1; i >= 0; --i) {
    for (int j = i + 1; j <= k && gap_ok(i, j); ++j) {
      if (reach[j] && best[i] + phi_inc(i, j) == best[j]) {
        reach[i] = 1;
        break;
      }
    }
  }
  DpResult res;
  res.partition.push_back(idx[0]);
  int i = 0;
  while (i < k) {
    int next = -1;
    for (int j = i + 1; j <= k && gap_ok(i, j); ++j) {
      if (reach[j] && best[i] + phi_inc(i, j) == best[j]) {
        next = j;
        break;
      }
    }
    if (next < 0) throw std::logic_error("sup_variation: broken optimal DAG");
    res.partition.push_back(idx[next]);
    i = next;
  }
  res.value = best[k];
  return res;
}

std::vector<int> extrema_indices(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<int> idx;
  idx.push_back(0);
  for (int i = 1; i < n; ++i) {
    const double d1 = x[i] - x[i - 1];
    const double d2 = x[i + 1] - x[i];
    if (d1 * d2 > 0.0) continue;  // strictly monotone through i
    idx.push_back(i);
  }
  idx.push_back(n);
  return idx;
}

}  // namespace

double v_phi(const SamplePath& f, std::span<const int> pi, const VariationFunction& phi) {
  const int n = f.grid_size();
  if (pi.size() < 2 || pi.front() != 0 || pi.back() != n)
    throw std::invalid_argument("v_phi: partition must run from 0 to n");
  for (std::size_t k = 1; k < pi.size(); ++k)
    if (pi[k] <= pi[k - 1]) throw std::invalid_argument("v_phi: partition not increasing");
  double s = 0.0;
  for (std::size_t k = 1; k < pi.size(); ++k)
    s += eval(phi, std::abs(f.values[pi[k]] - f.values[pi[k - 1]]));
  return s;
}

PartitionResult sup_variation(const SamplePath& f, const VariationFunction& phi,
                              std::optional<double> mesh_cap) {
  const int n = f.grid_size();
  int max_gap = 0;
  if (mesh_cap) {
    max_gap = static_cast<int>(std::floor(*mesh_cap * n + 1e-9));
    if (max_gap < 1)
      throw std::invalid_argument("sup_variation: mesh_cap smaller than the grid step");
  }

  std::vector<int> idx;
  if (!mesh_cap && n > 64 && is_convex_delta2(phi)) {
    idx = extrema_indices(f.values);
  } else {
    idx.resize(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
  }

  DpResult dp = dp_sup(f, idx, phi, max_gap);
  PartitionResult res;
  res.partition = std::move(dp.partition);
  // recompute along the partition (bit-identical to the DP's left folds)
  double v = 0.0;
  double mesh = 0.0;
  for (std::size_t k = 1; k < res.partition.size(); ++k) {
    v += eval(phi, std::abs(f.values[res.partition[k]] - f.values[res.partition[k - 1]]));
    mesh = std::max(mesh,
                    static_cast<double>(res.partition[k] - res.partition[k - 1]) / n);
  }
  res.value = v;
  res.mesh = mesh;
  return res;
}

std::vector<LimitingVariationRow> limiting_variation(const SamplePath& f,
                                                     const VariationFunction& phi,
                                                     std::span<const double> deltas) {
  const int n = f.grid_size();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < 1.0 / n)
      throw std::invalid_argument("limiting_variation: delta below the grid step");
    if (i > 0 && deltas[i] >= deltas[i - 1])
      throw std::invalid_argument("limiting_variation: deltas must decrease");
  }
  std::vector<LimitingVariationRow> rows;
  rows.reserve(deltas.size());
  for (double d : deltas) {
    const PartitionResult r = sup_variation(f, phi, d);
    rows.push_back({d, r.value, r.mesh});
  }
  return rows;
}

double phi_norm(const SamplePath& f, const VariationFunction& phi) {
  if (!is_convex_delta2(phi))
    throw std::invalid_argument("phi_norm: requires a convex Delta_2 catalog kind");
  const int n = f.grid_size();
  bool constant = true;
  for (int i = 1; i <= n && constant; ++i) constant = (f.values[i] == f.values[0]);
  if (constant) return 0.0;

  if (phi.kind == VfKind::Power)
    return std::pow(sup_variation(f, phi).value, 1.0 / phi.a);

  auto v_of = [&](double r) {
    SamplePath scaled;
    scaled.values = f.values / r;
    scaled.meta = f.meta;
    return sup_variation(scaled, phi).value;
  };
  double lo = std::log(1e-12), hi = std::log(1e12);
  for (int it = 0; it < 80 && (hi - lo) > 1e-7; ++it) {
    const double mid = 0.5 * (lo + hi);
    (v_of(std::exp(mid)) <= 1.0 ? hi : lo) = mid;
  }
  return std::exp(hi);
}

JmBoundReport jm_bound_report(const std::vector<SamplePath>& ensemble, double p,
                              const PseudoMetric& d, int threads) {
  if (ensemble.empty()) throw std::invalid_argument("jm_bound_report: empty ensemble");
  if (!(p >= 1.0)) throw std::invalid_argument("jm_bound_report: p must be >= 1");
  JmBoundReport rep;

  const VariationFunction psi = power_loglog_plus(p, 2.0);
  const MetricVariation w = variation_of_metric(psi, d);
  rep.wp_status = w.status;
  rep.wp = w.value;

  std::vector<double> norms(ensemble.size());
  const VariationFunction pw = power(p);
  detail::parallel_for(
      ensemble.size(), [&](std::size_t i) { norms[i] = phi_norm(ensemble[i], pw); }, threads);
  rep.mean_norm = std::accumulate(norms.begin(), norms.end(), 0.0) /
                  static_cast<double>(norms.size());

  if (w.status == VariationStatus::Finite && w.value > 0.0) {
    rep.ratio = rep.mean_norm /
                (std::pow(w.value, 1.0 / p) * (1.0 + std::sqrt(w.value)));
    rep.ratio_valid = true;
  }
  return rep;
}

void write_partition_csv(std::ostream& out, const SamplePath& f, const PartitionResult& r,
                         const VariationFunction& phi) {
  out << "index,t,f,contribution\n";
  char buf[128];
  const int n = f.grid_size();
  for (std::size_t k = 0; k < r.partition.size(); ++k) {
    const int i = r.partition[k];
    const double contrib =
        k == 0 ? 0.0
               : eval(phi, std::abs(f.values[i] - f.values[r.partition[k - 1]]));
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", i,
                  static_cast<double>(i) / n, f.values[i], contrib);
    out << buf;
  }
}

}  // namespace phivar
