#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace phivar::detail {

inline constexpr std::array<std::array<double, 2>, 8> kGl8 = {{
    {-9.60289856497536176e-01, 1.01228536290376689e-01},
    {-7.96666477413626728e-01, 2.22381034453374343e-01},
    {-5.25532409916328991e-01, 3.13706645877887047e-01},
    {-1.83434642495649780e-01, 3.62683783378361768e-01},
    {1.83434642495649780e-01, 3.62683783378361768e-01},
    {5.25532409916328991e-01, 3.13706645877887047e-01},
    {7.96666477413626728e-01, 2.22381034453374343e-01},
    {9.60289856497536176e-01, 1.01228536290376689e-01},
}};

inline constexpr std::array<std::array<double, 2>, 16> kGl16 = {{
    {-9.89400934991649939e-01, 2.71524594117540374e-02},
    {-9.44575023073232600e-01, 6.22535239386477063e-02},
    {-8.65631202387831755e-01, 9.51585116824925914e-02},
    {-7.55404408355002999e-01, 1.24628971255534030e-01},
    {-6.17876244402643771e-01, 1.49595988816576764e-01},
    {-4.58016777657227370e-01, 1.69156519395002619e-01},
    {-2.81603550779258915e-01, 1.82603415044923612e-01},
    {-9.50125098376374544e-02, 1.89450610455068585e-01},
    {9.50125098376374544e-02, 1.89450610455068585e-01},
    {2.81603550779258915e-01, 1.82603415044923612e-01},
    {4.58016777657227370e-01, 1.69156519395002619e-01},
    {6.17876244402643771e-01, 1.49595988816576764e-01},
    {7.55404408355002999e-01, 1.24628971255534030e-01},
    {8.65631202387831755e-01, 9.51585116824925914e-02},
    {9.44575023073232600e-01, 6.22535239386477063e-02},
    {9.89400934991649939e-01, 2.71524594117540374e-02},
}};

template <class F>
double gauss16(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& nw : kGl16) s += nw[1] * f(mid + half * nw[0]);
  return s * half;
}

template <class F>
double gauss8(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& nw : kGl8) s += nw[1] * f(mid + half * nw[0]);
  return s * half;
}

inline constexpr std::array<std::array<double, 2>, 4> kGl4 = {{
    {-8.61136311594052575e-01, 3.47854845137453857e-01},
    {-3.39981043584856265e-01, 6.52145154862546143e-01},
    {3.39981043584856265e-01, 6.52145154862546143e-01},
    {8.61136311594052575e-01, 3.47854845137453857e-01},
}};

template <class F>
double gauss4(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (const auto& nw : kGl4) s += nw[1] * f(mid + half * nw[0]);
  return s * half;
}

// geometric_panels with a selectable Gauss order (4, 8 or 16).
template <class F>
double geometric_panels_n(F&& f, double b, int max_k, int gl_order) {
  double s = 0.0;
  double hi = b;
  for (int k = 0; k <= max_k; ++k) {
    const double lo = k == max_k ? 0.0 : 0.5 * hi;
    if (gl_order <= 4)
      s += gauss4(f, lo, hi);
    else if (gl_order <= 8)
      s += gauss8(f, lo, hi);
    else
      s += gauss16(f, lo, hi);
    hi = lo;
  }
  return s;
}

// Integral over (0, b] of an integrand with at worst a logarithmic or
// integrable power singularity at 0: dyadic panels [b 2^{-k-1}, b 2^{-k}]
// with 16-point Gauss-Legendre per panel, plus a closing stub panel
// [0, b 2^{-max_k}] so bounded integrands do not lose the 2^{-max_k} mass.
template <class F>
double geometric_panels(F&& f, double b, int max_k = 60) {
  double s = 0.0;
  double hi = b;
  for (int k = 0; k < max_k; ++k) {
    const double lo = 0.5 * hi;
    s += gauss16(f, lo, hi);
    hi = lo;
  }
  s += gauss16(f, 0.0, hi);
  return s;
}

// log of \int_0^B f(u) du where B = exp(log_b) may underflow a double and
// the integrand is evaluated through log(u). Substitutes u = B w so only
// w in (0,1] is ever represented; returns log_b + log(\int_0^1 f(Bw) dw).
template <class F>
double log_integral_zero_to(F&& f_of_log_u, double log_b, int max_k = 60) {
  const double inner = geometric_panels(
      [&](double w) { return f_of_log_u(log_b + std::log(w)); }, 1.0, max_k);
  return log_b + std::log(inner);
}

}  // namespace phivar::detail
