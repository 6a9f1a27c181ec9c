#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "phivar/funcs.hpp"
#include "phivar/sample_path.hpp"

namespace phivar {

enum class MetricKind { HolderScaled, Tabulated };

// Pseudo-metric on [0,1]. HolderScaled is d(s,t) = c |s-t|^H; Tabulated
// carries explicit pairwise distances on a fixed grid.
struct PseudoMetric {
  MetricKind kind = MetricKind::HolderScaled;
  double c = 1.0;
  double H = 1.0;
  Eigen::VectorXd grid;
  Eigen::MatrixXd dist;
  double diameter = 1.0;
};

PseudoMetric holder_scaled(double c, double H);
// Validates symmetry, zero diagonal, nonnegativity exactly and the triangle
// inequality on a fixed sample of triples.
PseudoMetric tabulated(const Eigen::VectorXd& grid, const Eigen::MatrixXd& dist);
// Header row of grid points, then the symmetric distance matrix.
PseudoMetric load_tabulated_csv(const std::filesystem::path& file);

double distance(const PseudoMetric& d, double s, double t);

// Minimal number of closed d-balls of radius eps covering [0,1] (the grid,
// for Tabulated). Closed form for HolderScaled; greedy set cover plus an
// exact branch-and-bound refinement for Tabulated.
std::int64_t covering_number(const PseudoMetric& d, double eps);

// Appendix-style variant replaces N(u) by max(N(u), D/u).
enum class CoveringVariant { Raw, FlooredByDiameter };

// delta(eps) = int_0^eps (log*(N(u)))^{1/alpha} du. Piecewise-exact between
// the breakpoints of N where those are coarse, smooth surrogate below;
// relative accuracy ~1e-6.
double entropy_integral(const PseudoMetric& d, double eps, double alpha,
                        CoveringVariant variant = CoveringVariant::Raw);
// One increasing sweep shared across many eps values (they get sorted
// internally; results are returned in the input order).
std::vector<double> entropy_integral_many(const PseudoMetric& d, std::span<const double> eps,
                                          double alpha,
                                          CoveringVariant variant = CoveringVariant::Raw);

enum class VariationStatus { Finite, Divergent, Inconclusive };

struct MetricVariation {
  VariationStatus status = VariationStatus::Inconclusive;
  double value = 0.0;  // the computed supremum (a lower bound when not Finite)
};

struct VariationOfMetricOptions {
  int max_dyadic_k = 24;
  int dp_grid = 1 << 14;
  double divergence_threshold = 1e12;
  bool force_numeric = false;  // skip the Power x HolderScaled closed form
};

// V(Psi, d): supremum over partitions of sum Psi(d(t_i, t_{i-1})).
MetricVariation variation_of_metric(const VariationFunction& psi, const PseudoMetric& d,
                                    const VariationOfMetricOptions& opt = {});

struct ChainingStatistic {
  double mean = 0.0;                 // mean over paths of the per-path sup
  std::vector<double> per_path;
};

// Theta = sup_{s != t} |X(s)-X(t)| / delta(d(s,t)) on the sample grid.
ChainingStatistic chaining_statistic(const std::vector<SamplePath>& paths, const PseudoMetric& d,
                                     double alpha,
                                     CoveringVariant variant = CoveringVariant::FlooredByDiameter,
                                     int threads = 0);

struct MaximalInequalityReport {
  double norm_max = 0.0;     // ||max_i |xi_i|||_{phi_alpha}, Monte Carlo
  double norm_single = 0.0;  // ||xi_1||_{phi_alpha}, Monte Carlo
  double bound_factor = 0.0; // (2 log n / log 2)^{1/alpha}
  double ratio = 0.0;        // norm_max / (bound_factor * norm_single)
};

MaximalInequalityReport maximal_inequality_check(int n, double alpha, int trials,
                                                 std::uint64_t seed);
// Same report from caller-provided samples (used for degenerate inputs).
MaximalInequalityReport maximal_inequality_from_samples(std::span<const double> maxima,
                                                        std::span<const double> singles, int n,
                                                        double alpha);

}  // namespace phivar
