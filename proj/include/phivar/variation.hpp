#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "phivar/funcs.hpp"
#include "phivar/metric.hpp"
#include "phivar/sample_path.hpp"

namespace phivar {

struct PartitionResult {
  double value = 0.0;
  std::vector<int> partition;  // indices, 0 = i_0 < ... < i_K = n
  double mesh = 0.0;           // max t-gap actually used
};

// v_Phi(f, pi) = sum Phi(|f(t_i) - f(t_{i-1})|) along the given partition.
double v_phi(const SamplePath& f, std::span<const int> pi, const VariationFunction& phi);

// Exact maximum of v_Phi over all partitions supported on the sample grid,
// by dynamic programming; with mesh_cap, over partitions of mesh <= cap.
// Among optimal partitions the lexicographically smallest is returned.
PartitionResult sup_variation(const SamplePath& f, const VariationFunction& phi,
                              std::optional<double> mesh_cap = std::nullopt);

struct LimitingVariationRow {
  double delta;
  double value;
  double mesh;
};

// sup over Pi_delta for each delta in a decreasing list.
std::vector<LimitingVariationRow> limiting_variation(const SamplePath& f,
                                                     const VariationFunction& phi,
                                                     std::span<const double> deltas);

// ||f||_Phi = inf{r > 0 : V_Phi(f/r) <= 1}; Phi must be a convex Delta_2
// catalog kind. Power(p) short-circuits to V_p(f)^{1/p}.
double phi_norm(const SamplePath& f, const VariationFunction& phi);

struct JmBoundReport {
  double mean_norm = 0.0;                                    // mean grid ||X||_p
  VariationStatus wp_status = VariationStatus::Inconclusive;
  double wp = 0.0;                                           // V(Psi, d)
  double ratio = 0.0;  // mean_norm / (W^{1/p} (1 + W^{1/2})), the empirical K
  bool ratio_valid = false;
};

JmBoundReport jm_bound_report(const std::vector<SamplePath>& ensemble, double p,
                              const PseudoMetric& d, int threads = 0);

void write_partition_csv(std::ostream& out, const SamplePath& f, const PartitionResult& r,
                         const VariationFunction& phi);

}  // namespace phivar
