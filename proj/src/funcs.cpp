#include "phivar/funcs.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace phivar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 36.0 ? x : std::log1p(std::exp(x)); }

// log*2(1/t) given log(t).
double ls2_of_inv_log(double log_t) { return std::log1p(softplus(-log_t)); }

[[noreturn]] void bad_arg(const std::string& msg) { throw std::invalid_argument(msg); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) bad_arg(std::string(name) + " must be a positive real");
}

// Monotonicity margin of t^p (log*2(1/t))^{p/alpha}: the formula is
// increasing at t iff alpha (t+1)(1+log*(1/t)) log*2(1/t) >= 1. The same
// expression with alpha replaced by 2H/m governs XiScale.
double loglog_monotone_factor(double t) {
  const double l1 = std::log1p(1.0 / t);
  return (t + 1.0) * (1.0 + l1) * std::log1p(l1);
}

// Largest t <= 1 up to which the raw loglog-plus formula stays increasing.
double solve_t_cap(double coeff) {
  if (coeff * loglog_monotone_factor(1.0) >= 1.0 - 1e-12) return 1.0;
  double lo = 1.0, hi = 1.0;  // g < 1 at t=1; walk left until g > 1
  do {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  } while (coeff * loglog_monotone_factor(lo) < 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (coeff * loglog_monotone_factor(mid) >= 1.0 ? lo : hi) = mid;
  }
  return lo;
}

double raw_pllp(double t, double p, double expo) {
  return std::pow(t, p) * std::pow(std::log1p(std::log1p(1.0 / t)), expo);
}

}  // namespace

double log_star(double x) {
  if (x < 0.0) throw std::domain_error("log_star: negative argument");
  return std::log1p(x);
}

double log_star2(double x) {
  if (x < 0.0) throw std::domain_error("log_star2: negative argument");
  return std::log1p(std::log1p(x));
}

VariationFunction power(double p) {
  require_positive(p, "p");
  return {VfKind::Power, p, 0.0, 0.0, 0.0};
}

VariationFunction power_loglog_minus(double p, double alpha) {
  require_positive(p, "p");
  require_positive(alpha, "alpha");
  return {VfKind::PowerLogLogMinus, p, alpha, 0.0, 0.0};
}

VariationFunction power_loglog_plus(double p, double alpha) {
  require_positive(p, "p");
  require_positive(alpha, "alpha");
  VariationFunction vf{VfKind::PowerLogLogPlus, p, alpha, 0.0, 0.0};
  vf.t_cap = solve_t_cap(alpha);
  vf.f_cap = raw_pllp(vf.t_cap, p, p / alpha);
  return vf;
}

VariationFunction exp_beta(double beta) {
  require_positive(beta, "beta");
  return {VfKind::ExpBeta, beta, 0.0, 0.0, 0.0};
}

VariationFunction exp_log_pow(double c, double r) {
  require_positive(c, "c");
  require_positive(r, "r");
  return {VfKind::ExpLogPow, c, r, 0.0, 0.0};
}

VariationFunction hermite_optimal(int m, double H) {
  if (m < 1) bad_arg("m must be a positive integer");
  if (!(H > 0.0 && H < 1.0)) bad_arg("H must lie in (0,1)");
  return {VfKind::HermiteOptimal, static_cast<double>(m), H, 0.0, 0.0};
}

VariationFunction xi_scale(int m, double H) {
  if (m < 1) bad_arg("m must be a positive integer");
  if (!(H > 0.0 && H < 1.0)) bad_arg("H must lie in (0,1)");
  VariationFunction vf{VfKind::XiScale, static_cast<double>(m), H, 0.0, 0.0};
  vf.t_cap = solve_t_cap(2.0 * H / m);
  vf.f_cap = raw_pllp(vf.t_cap, H, 0.5 * m);
  return vf;
}

double eval(const VariationFunction& vf, double t) {
  if (t < 0.0) throw std::domain_error("eval: negative argument");
  if (t == 0.0) return 0.0;
  switch (vf.kind) {
    case VfKind::Power:
      return std::pow(t, vf.a);
    case VfKind::PowerLogLogMinus:
      return raw_pllp(t, vf.a, -vf.a / vf.b);
    case VfKind::PowerLogLogPlus:
      if (t <= vf.t_cap) return raw_pllp(t, vf.a, vf.a / vf.b);
      return vf.f_cap * std::pow(t / vf.t_cap, vf.a);
    case VfKind::ExpBeta:
      return std::exp(-std::pow(t, -1.0 / vf.a));
    case VfKind::ExpLogPow:
      if (t < 1.0) return std::exp(-vf.b * std::pow(-std::log(t), vf.a));
      return t;  // continuous: formula -> 1 as t -> 1-
    case VfKind::HermiteOptimal:
      return raw_pllp(t, 1.0 / vf.b, -vf.a / (2.0 * vf.b));
    case VfKind::XiScale:
      if (t <= vf.t_cap) return raw_pllp(t, vf.b, 0.5 * vf.a);
      return vf.f_cap * std::pow(t / vf.t_cap, vf.b);
  }
  return 0.0;
}

double log_eval(const VariationFunction& vf, double log_t) {
  switch (vf.kind) {
    case VfKind::Power:
      return vf.a * log_t;
    case VfKind::PowerLogLogMinus:
      return vf.a * log_t - (vf.a / vf.b) * std::log(ls2_of_inv_log(log_t));
    case VfKind::PowerLogLogPlus: {
      const double lcap = std::log(vf.t_cap);
      if (log_t <= lcap)
        return vf.a * log_t + (vf.a / vf.b) * std::log(ls2_of_inv_log(log_t));
      return std::log(vf.f_cap) + vf.a * (log_t - lcap);
    }
    case VfKind::ExpBeta:
      return -std::exp(-log_t / vf.a);
    case VfKind::ExpLogPow:
      if (log_t < 0.0) return -vf.b * std::pow(-log_t, vf.a);
      return log_t;
    case VfKind::HermiteOptimal:
      return log_t / vf.b - (vf.a / (2.0 * vf.b)) * std::log(ls2_of_inv_log(log_t));
    case VfKind::XiScale: {
      const double lcap = std::log(vf.t_cap);
      if (log_t <= lcap)
        return vf.b * log_t + (0.5 * vf.a) * std::log(ls2_of_inv_log(log_t));
      return std::log(vf.f_cap) + vf.b * (log_t - lcap);
    }
  }
  return -kInf;
}

double inverse(const VariationFunction& vf, double y) {
  if (y < 0.0) throw std::out_of_range("inverse: argument below range");
  if (y == 0.0) return 0.0;
  switch (vf.kind) {
    case VfKind::Power:
      return std::pow(y, 1.0 / vf.a);
    case VfKind::ExpBeta:
      if (y >= 1.0) throw std::out_of_range("inverse: argument outside the range of ExpBeta");
      return std::pow(-std::log(y), -vf.a);
    case VfKind::ExpLogPow:
      if (y >= 1.0) return y;
      return std::exp(-std::pow(-std::log(y) / vf.b, 1.0 / vf.a));
    default:
      break;
  }
  // Bisection in log t on the fixed bracket [1e-12, 1e12].
  double lo = std::log(1e-12), hi = std::log(1e12);
  if (eval(vf, 1e-12) > y || eval(vf, 1e12) < y)
    throw std::out_of_range("inverse: argument outside the bisection bracket");
  const double tol = 1e-12 * std::max(1.0, y);
  double mid = 0.0;
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double v = eval(vf, std::exp(mid));
    if (std::abs(v - y) <= tol) break;
    (v < y ? lo : hi) = mid;
  }
  return std::exp(mid);
}

double log_inverse(const VariationFunction& vf, double log_y) {
  switch (vf.kind) {
    case VfKind::Power:
      return log_y / vf.a;
    case VfKind::ExpBeta:
      if (log_y > 0.0) throw std::out_of_range("log_inverse: above the range of ExpBeta");
      if (log_y == 0.0) return kInf;  // monotone extension at the supremum
      return -vf.a * std::log(-log_y);
    case VfKind::ExpLogPow:
      if (log_y >= 0.0) return log_y;  // inverse of the linear continuation
      return -std::pow(-log_y / vf.b, 1.0 / vf.a);
    default:
      break;
  }
  double lo = -750.0, hi = 750.0;
  if (log_eval(vf, lo) > log_y || log_eval(vf, hi) < log_y)
    throw std::out_of_range("log_inverse: argument outside bracket");
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double v = log_eval(vf, mid);
    if (std::abs(v - log_y) <= 1e-13 * std::max(1.0, std::abs(log_y))) return mid;
    (v < log_y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool is_convex_delta2(const VariationFunction& vf) {
  switch (vf.kind) {
    case VfKind::Power:
    case VfKind::PowerLogLogMinus:
    case VfKind::PowerLogLogPlus:
      return vf.a >= 1.0;
    case VfKind::HermiteOptimal:
      return true;  // exponent 1/H > 1
    case VfKind::ExpBeta:
    case VfKind::ExpLogPow:
    case VfKind::XiScale:
      return false;
  }
  return false;
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_token(const VariationFunction& vf) {
  switch (vf.kind) {
    case VfKind::Power:
      return "power:p=" + fmt_num(vf.a);
    case VfKind::PowerLogLogMinus:
      return "pllm:p=" + fmt_num(vf.a) + ",alpha=" + fmt_num(vf.b);
    case VfKind::PowerLogLogPlus:
      return "pllp:p=" + fmt_num(vf.a) + ",alpha=" + fmt_num(vf.b);
    case VfKind::ExpBeta:
      return "expbeta:beta=" + fmt_num(vf.a);
    case VfKind::ExpLogPow:
      return "explogpow:c=" + fmt_num(vf.a) + ",r=" + fmt_num(vf.b);
    case VfKind::HermiteOptimal:
      return "hermite:m=" + fmt_num(vf.a) + ",H=" + fmt_num(vf.b);
    case VfKind::XiScale:
      return "xi:m=" + fmt_num(vf.a) + ",H=" + fmt_num(vf.b);
  }
  return {};
}

namespace {

[[noreturn]] void token_error(std::size_t col, const std::string& what) {
  std::ostringstream os;
  os << "variation-function token: " << what << " at column " << (col + 1);
  throw std::invalid_argument(os.str());
}

struct KeyVal {
  std::string key;
  double value;
  std::size_t col;
};

}  // namespace

VariationFunction parse_vf_token(const std::string& token) {
  const std::size_t colon = token.find(':');
  if (colon == std::string::npos) token_error(token.size(), "expected ':' after the kind");
  const std::string kind = token.substr(0, colon);

  std::vector<KeyVal> kvs;
  std::size_t pos = colon + 1;
  while (pos < token.size()) {
    std::size_t end = token.find(',', pos);
    if (end == std::string::npos) end = token.size();
    const std::string item = token.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) token_error(pos, "expected key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    errno = 0;
    char* endp = nullptr;
    const double v = std::strtod(val.c_str(), &endp);
    if (val.empty() || endp != val.c_str() + val.size() || errno != 0)
      token_error(pos + eq + 1, "malformed number '" + val + "'");
    kvs.push_back({key, v, pos});
    pos = end + 1;
  }

  auto get = [&](const char* key) {
    for (const auto& kv : kvs)
      if (kv.key == key) return kv.value;
    token_error(colon + 1, std::string("missing required key '") + key + "'");
  };
  auto expect_keys = [&](std::initializer_list<const char*> keys) {
    for (const auto& kv : kvs) {
      bool known = false;
      for (const char* k : keys) known |= (kv.key == k);
      if (!known) token_error(kv.col, "unknown key '" + kv.key + "'");
    }
    if (kvs.size() != keys.size()) token_error(colon + 1, "duplicate or missing keys");
  };
  auto as_int = [&](double v, const char* key) {
    const int n = static_cast<int>(std::lround(v));
    if (v != n) token_error(colon + 1, std::string(key) + " must be an integer");
    return n;
  };

  try {
    if (kind == "power") {
      expect_keys({"p"});
      return power(get("p"));
    } else if (kind == "pllm") {
      expect_keys({"p", "alpha"});
      return power_loglog_minus(get("p"), get("alpha"));
    } else if (kind == "pllp") {
      expect_keys({"p", "alpha"});
      return power_loglog_plus(get("p"), get("alpha"));
    } else if (kind == "expbeta") {
      expect_keys({"beta"});
      return exp_beta(get("beta"));
    } else if (kind == "explogpow") {
      expect_keys({"c", "r"});
      return exp_log_pow(get("c"), get("r"));
    } else if (kind == "hermite") {
      expect_keys({"m", "H"});
      return hermite_optimal(as_int(get("m"), "m"), get("H"));
    } else if (kind == "xi") {
      expect_keys({"m", "H"});
      return xi_scale(as_int(get("m"), "m"), get("H"));
    }
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).find("column") != std::string::npos) throw;
    token_error(colon + 1, e.what());
  }
  token_error(0, "unknown kind '" + kind + "'");
}

double phi_alpha(double x, double alpha) { return std::expm1(std::pow(std::abs(x), alpha)); }

double phi_alpha_inverse(double y, double alpha) {
  if (y < 0.0) throw std::domain_error("phi_alpha_inverse: negative argument");
  return std::pow(std::log1p(y), 1.0 / alpha);
}

double OrliczFamily::quasi_triangle_constant() const {
  return alpha < 1.0 ? std::pow(2.0, 1.0 / alpha) : 1.0;
}

double orlicz_norm_mc(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw std::invalid_argument("orlicz_norm_mc: empty sample list");
  double scale = 0.0;
  for (double s : samples) scale = std::max(scale, std::abs(s));
  if (scale == 0.0) return 0.0;

  // Mean of phi_alpha(u/Delta) over the normalized samples, +inf on overflow.
  auto mean_phi = [&](double delta) {
    double acc = 0.0;
    for (double s : samples) {
      const double e = std::pow(std::abs(s / scale) / delta, alpha);
      if (e > 700.0) return kInf;
      acc += std::expm1(e);
    }
    return acc / static_cast<double>(samples.size());
  };

  double lo = 1e-12, hi = 1e12;
  for (int i = 0; i < 200 && (hi - lo) > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_phi(mid) <= 1.0 ? hi : lo) = mid;
  }
  return scale * hi;
}

}  // namespace phivar
