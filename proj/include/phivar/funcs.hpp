#pragma once

#include <span>
#include <string>

namespace phivar {

// log*(x) = log(1+x) and its self-composition. Both are defined and finite
// for every x >= 0, which keeps the variation-function catalog below free of
// singularities at argument 1.
double log_star(double x);
double log_star2(double x);

enum class VfKind {
  Power,             // t^p
  PowerLogLogMinus,  // t^p (log*2(1/t))^{-p/alpha}
  PowerLogLogPlus,   // t^p (log*2(1/t))^{p/alpha}, loglog factor frozen past t_cap
  ExpBeta,           // exp(-t^{-1/beta})
  ExpLogPow,         // exp(-r (log 1/t)^c) on (0,1), linear continuation past 1
  HermiteOptimal,    // t^{1/H} (log*2(1/t))^{-m/(2H)}
  XiScale,           // t^H (log*2(1/t))^{m/2}, loglog factor frozen past t_cap
};

// A strictly increasing continuous gauge on [0, inf) with value 0 at 0.
// Construct through the factory functions; they validate parameters and,
// for the kinds whose raw formula loses monotonicity at large t, compute
// the freeze point t_cap once.
struct VariationFunction {
  VfKind kind = VfKind::Power;
  double a = 1.0;      // p | beta | c | m  (see factories)
  double b = 0.0;      // alpha | r | H
  double t_cap = 0.0;  // only PowerLogLogPlus / XiScale
  double f_cap = 0.0;  // formula value at t_cap
};

VariationFunction power(double p);
VariationFunction power_loglog_minus(double p, double alpha);
VariationFunction power_loglog_plus(double p, double alpha);
VariationFunction exp_beta(double beta);
VariationFunction exp_log_pow(double c, double r);
VariationFunction hermite_optimal(int m, double H);
VariationFunction xi_scale(int m, double H);

double eval(const VariationFunction& vf, double t);

// log(eval at t = exp(log_t)). Usable far outside the dynamic range of
// eval itself (eval underflows below ~1e-308; the series machinery in
// conditions needs arguments like 2^-200 routinely).
double log_eval(const VariationFunction& vf, double log_t);

// Inverse of eval. Closed form for Power, ExpBeta and ExpLogPow, bisection
// on [1e-12, 1e12] otherwise (max 200 iterations, |eval(t)-y| <= 1e-12 max(1,y)).
double inverse(const VariationFunction& vf, double y);

// log of the inverse at y = exp(log_y), with the monotone extension
// log_inverse -> +inf as y approaches the supremum of a bounded kind
// (ExpBeta). Wide bracket; intended for the Theorem-1 series machinery.
double log_inverse(const VariationFunction& vf, double log_y);

// True for the kinds that are convex with Phi(0)=0 and satisfy the
// Delta_2 condition, so the gauge ||f||_Phi is a norm on a vector space.
// ExpBeta and ExpLogPow fail Delta_2 and are excluded.
bool is_convex_delta2(const VariationFunction& vf);

std::string to_token(const VariationFunction& vf);
// Grammar: kind:key=val[,key=val] with kinds
//   power(p) pllm(p,alpha) pllp(p,alpha) expbeta(beta) explogpow(c,r)
//   hermite(m,H) xi(m,H).
// Throws std::invalid_argument citing the offending column.
VariationFunction parse_vf_token(const std::string& token);

// phi_alpha(x) = e^{|x|^alpha} - 1.
double phi_alpha(double x, double alpha);
double phi_alpha_inverse(double y, double alpha);

struct OrliczFamily {
  double alpha = 2.0;
  // Quasi-triangle constant: 2^{1/alpha} below alpha = 1, else 1.
  double quasi_triangle_constant() const;
};

// Smallest Delta with empirical mean of phi_alpha(sample/Delta) <= 1,
// by bisection to 1e-6 relative. Samples are normalized by their max
// modulus first, so scaling all samples by c > 0 scales the result by c.
double orlicz_norm_mc(std::span<const double> samples, double alpha);

}  // namespace phivar
