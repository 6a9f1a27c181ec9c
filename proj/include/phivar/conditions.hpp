#pragma once

#include <iosfwd>
#include <vector>

#include "phivar/funcs.hpp"

namespace phivar {

// Parameters of the convergence test: Phi (target gauge), Psi (assumed
// finite-variation gauge), the increment exponent alpha, and the constants
// C, M, K_alpha of the series
//   sum_m 2^m Phi(M y_m) exp(-x_m^alpha).
struct Theorem1Config {
  VariationFunction phi;
  VariationFunction psi;
  double alpha = 2.0;
  double C = 1.0;
  double M = 1.0;
  double K_alpha = 1.0;
};

// y_m = int_0^{2^-m} (log*(1/eps))^{1/alpha} Psi^{-1}(d eps), evaluated in
// log space after the substitution eps = Psi(u). May underflow to 0 as a
// double for the exponential gauges; use log_y_m where scale matters.
double y_m(const Theorem1Config& cfg, int m);
double log_y_m(const Theorem1Config& cfg, int m);

// x_m = Phi^{-1}(C 2^-m) / (K_alpha int_0^{2^-m} (log*(2^-m/eps))^{1/alpha}
// Psi^{-1}(d eps)). +inf when C 2^-m reaches the supremum of a bounded Phi.
double x_m(const Theorem1Config& cfg, int m);
double log_x_m(const Theorem1Config& cfg, int m);

enum class SeriesStatus { Converges, Diverges, Inconclusive };

struct SeriesRow {
  int m;
  double y;
  double x;
  double term;
  double partial;
};

struct SeriesVerdict {
  SeriesStatus status = SeriesStatus::Inconclusive;
  std::vector<SeriesRow> rows;
  double tail_ratio = 0.0;  // estimated tail / partial sum (inf if growing)
};

SeriesVerdict series_check(const Theorem1Config& cfg, int m_max);

// The m-independent constant K_{alpha,p} = int_0^1 (log*(1/v))^{1/alpha} d(v^{1/p}).
double quadrature_constant(double alpha, double p);

// Proof-chosen configurations of the four integrability cases.
Theorem1Config preset_case1(double p, double alpha);
Theorem1Config preset_case2(double p, double alpha);
Theorem1Config preset_case3(double alpha, double beta0, double beta);
Theorem1Config preset_case4(double alpha, double c, double r, double v);

void write_series_csv(std::ostream& out, const SeriesVerdict& verdict);

const char* to_string(SeriesStatus s);

}  // namespace phivar
