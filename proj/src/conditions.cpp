#include "phivar/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "phivar/detail/quadrature.hpp"

namespace phivar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.6931471805599453;

double softplus(double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); }

// (log*(exp(log_num) / Psi(u)))^{1/alpha} evaluated from log u.
double weight_integrand(const VariationFunction& psi, double log_num, double log_u,
                        double inv_alpha) {
  const double log_ratio = log_num - log_eval(psi, log_u);
  return std::pow(softplus(log_ratio), inv_alpha);
}

}  // namespace

double log_y_m(const Theorem1Config& cfg, int m) {
  if (m < 0) throw std::invalid_argument("y_m: m must be nonnegative");
  const double log_b = log_inverse(cfg.psi, -m * kLog2);
  if (log_b == kInf) return kInf;  // Psi bounded and 2^-m at its supremum
  const double inv_alpha = 1.0 / cfg.alpha;
  return detail::log_integral_zero_to(
      [&](double log_u) { return weight_integrand(cfg.psi, 0.0, log_u, inv_alpha); }, log_b);
}

double y_m(const Theorem1Config& cfg, int m) { return std::exp(log_y_m(cfg, m)); }

double log_x_m(const Theorem1Config& cfg, int m) {
  if (m < 0) throw std::invalid_argument("x_m: m must be nonnegative");
  const double log_num = log_inverse(cfg.phi, std::log(cfg.C) - m * kLog2);
  if (log_num == kInf) return kInf;
  const double log_b = log_inverse(cfg.psi, -m * kLog2);
  if (log_b == kInf) return -kInf;  // infinite denominator integral
  const double inv_alpha = 1.0 / cfg.alpha;
  const double log_den = detail::log_integral_zero_to(
      [&](double log_u) { return weight_integrand(cfg.psi, -m * kLog2, log_u, inv_alpha); },
      log_b);
  return log_num - std::log(cfg.K_alpha) - log_den;
}

double x_m(const Theorem1Config& cfg, int m) { return std::exp(log_x_m(cfg, m)); }

SeriesVerdict series_check(const Theorem1Config& cfg, int m_max) {
  if (m_max < 10) throw std::invalid_argument("series_check: m_max must be at least 10");
  SeriesVerdict v;
  v.rows.reserve(m_max + 1);
  double partial = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const double ly = log_y_m(cfg, m);
    const double lx = log_x_m(cfg, m);
    const double x_pow_alpha = std::exp(cfg.alpha * lx);  // +inf collapses the term to 0
    const double log_term =
        m * kLog2 + log_eval(cfg.phi, std::log(cfg.M) + ly) - x_pow_alpha;
    // NaN arises only at the small-m corner where a bounded gauge meets an
    // unbounded integral (inf - inf); that single term is dropped.
    const double term = std::isnan(log_term) ? 0.0 : std::exp(log_term);
    partial += term;
    v.rows.push_back({m, std::exp(ly), std::exp(lx), term, partial});
  }

  // classify on the trailing 20% of the terms
  const int count = static_cast<int>(v.rows.size());
  const int window = std::max(2, count / 5);
  const int start = count - window;
  constexpr double kTiny = 1e-300;

  int decaying = 0, growing = 0, zeros = 0;
  double worst_ratio = 0.0;
  for (int i = start; i + 1 < count; ++i) {
    const double a = v.rows[i].term, b = v.rows[i + 1].term;
    if (a < kTiny && b < kTiny) {
      ++zeros;
      ++decaying;
      continue;
    }
    const double r = a < kTiny ? kInf : b / a;
    worst_ratio = std::max(worst_ratio, r);
    if (r <= 0.99) ++decaying;
    if (r >= 1.0) ++growing;
  }
  const int ratios = window - 1;
  const double last = v.rows.back().term;

  if (decaying == ratios) {
    const double r = std::min(worst_ratio, 0.99);
    const double tail = last < kTiny ? 0.0 : last * r / (1.0 - r);
    v.tail_ratio = partial > 0.0 ? tail / partial : 0.0;
    if (tail <= 0.05 * partial) {
      v.status = SeriesStatus::Converges;
      return v;
    }
    v.status = SeriesStatus::Inconclusive;
    return v;
  }
  if (growing >= (4 * ratios) / 5 && last >= 1e-6) {
    v.status = SeriesStatus::Diverges;
    v.tail_ratio = kInf;
    return v;
  }
  v.status = SeriesStatus::Inconclusive;
  v.tail_ratio = kInf;
  return v;
}

double quadrature_constant(double alpha, double p) {
  // substitute v = z^p: int_0^1 (log*(z^{-p}))^{1/alpha} dz
  const double inv_alpha = 1.0 / alpha;
  return detail::geometric_panels(
      [&](double z) { return std::pow(softplus(-p * std::log(z)), inv_alpha); }, 1.0);
}

namespace {

double k_alpha_of(double alpha) { return alpha < 1.0 ? std::pow(2.0, 1.0 / alpha) : 1.0; }

}  // namespace

Theorem1Config preset_case1(double p, double alpha) {
  Theorem1Config cfg;
  cfg.phi = power_loglog_minus(p, alpha);
  cfg.psi = power(p);
  cfg.alpha = alpha;
  cfg.M = 1.0;
  cfg.K_alpha = k_alpha_of(alpha);
  const double kq = quadrature_constant(alpha, p);
  cfg.C = std::pow(p / alpha + 2.0, p / alpha) * std::pow(cfg.K_alpha * kq, p);
  return cfg;
}

Theorem1Config preset_case2(double p, double alpha) {
  Theorem1Config cfg;
  cfg.phi = power(p);
  cfg.psi = power_loglog_plus(p, alpha);
  cfg.alpha = alpha;
  cfg.M = 1.0;
  cfg.K_alpha = k_alpha_of(alpha);
  // The denominator integral behaves like K 2^{-m/p} (log m)^{-1/alpha};
  // estimate the m-independent constant at a deep reference level.
  const int mref = 100;
  const double log_b = log_inverse(cfg.psi, -mref * kLog2);
  const double den = std::exp(detail::log_integral_zero_to(
      [&](double log_u) {
        return weight_integrand(cfg.psi, -mref * kLog2, log_u, 1.0 / alpha);
      },
      log_b));
  const double kq = den * std::pow(2.0, static_cast<double>(mref) / p) *
                    std::pow(std::log(static_cast<double>(mref)), 1.0 / alpha);
  cfg.C = std::pow(p / alpha + 2.0, p / alpha) * std::pow(cfg.K_alpha * kq, p);
  return cfg;
}

Theorem1Config preset_case3(double alpha, double beta0, double beta) {
  if (!(beta0 > 1.0 / alpha))
    throw std::invalid_argument("preset case 3: requires beta0 > 1/alpha");
  if (!(beta < 1.0 - 1.0 / alpha + beta0))
    throw std::invalid_argument("preset case 3: requires beta < 1 - 1/alpha + beta0");
  Theorem1Config cfg;
  cfg.phi = exp_beta(beta);
  cfg.psi = exp_beta(beta0);
  cfg.alpha = alpha;
  cfg.C = 1.0;
  cfg.M = 1.0;
  cfg.K_alpha = k_alpha_of(alpha);
  return cfg;
}

Theorem1Config preset_case4(double alpha, double c, double r, double v) {
  if (!(v > r)) throw std::invalid_argument("preset case 4: requires v > r");
  Theorem1Config cfg;
  cfg.phi = exp_log_pow(c, v);
  cfg.psi = exp_log_pow(c, r);
  cfg.alpha = alpha;
  cfg.C = 1.0;
  cfg.M = 1.0;
  cfg.K_alpha = k_alpha_of(alpha);
  return cfg;
}

void write_series_csv(std::ostream& out, const SeriesVerdict& verdict) {
  out << "m,y_m,x_m,term,partial_sum\n";
  char buf[160];
  for (const auto& row : verdict.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", row.m, row.y, row.x, row.term,
                  row.partial);
    out << buf;
  }
}

const char* to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Converges: return "Converges";
    case SeriesStatus::Diverges: return "Diverges";
    case SeriesStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

}  // namespace phivar
