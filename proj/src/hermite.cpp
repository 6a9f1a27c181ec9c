#include "phivar/hermite.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "phivar/detail/parallel.hpp"
#include "phivar/detail/quadrature.hpp"
#include "phivar/detail/rng.hpp"

namespace phivar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_domain(int m, double H) {
  if (m < 1 || m > 6) throw std::invalid_argument("hermite: m must be in 1..6");
  if (!(H > 0.5 && H < 1.0)) throw std::domain_error("hermite: H must lie in (1/2, 1)");
}

// Kernel evaluated from the largest coordinate and the gaps to the others,
// so near-diagonal arguments keep full precision in the gaps. `panels`/`gl`
// trade accuracy for speed (40/16 gives ~1e-9 relative).
double kernel_from_gaps(double gamma, double c0, double t, double umax,
                        std::span<const double> gaps, int panels, int gl) {
  if (umax >= t) return 0.0;
  const int m = 1 + static_cast<int>(gaps.size());
  for (double g : gaps)
    if (g == 0.0 && umax >= 0.0) return kInf;  // diagonal inside [0, t)

  const double p = 1.0 - gamma;
  const double q = 1.0 / p;
  const double lo = std::max(0.0, umax);       // lower v-limit
  const double s0 = lo - umax;                 // 0 when umax >= 0
  const double ds = t - lo;                    // s1 - s0, no cancellation
  const double w0 = std::pow(s0, p);
  // w1 - w0 through expm1: the plain difference of the powers cancels badly
  // for |umax| >> t
  const double width =
      s0 > 0.0 ? w0 * std::expm1(p * std::log1p(ds / s0)) : std::pow(ds, p);
  if (m == 1) return c0 * q * width;

  // the integrand turns over at w ~ gap^{1-gamma}; deepen the panel family
  // enough to resolve the smallest layer
  if (s0 == 0.0) {
    double min_gap = kInf;
    for (double g : gaps) min_gap = std::min(min_gap, g);
    if (min_gap > 0.0) {
      const double layer = std::pow(min_gap, p);
      if (layer < width)
        panels = std::min(360, std::max(panels, static_cast<int>(
                                                    std::log2(width / layer)) + 8));
    }
  }
  auto f = [&](double x) {
    const double sv = std::pow(w0 + x, q);
    double prod = 1.0;
    for (double g : gaps) prod *= std::pow(sv + g, -gamma);
    return prod;
  };
  return c0 * q * detail::geometric_panels_n(f, width, panels, gl);
}

double kernel_value(double gamma, double c0, double t, std::span<const double> u, int panels,
                    int gl) {
  const int m = static_cast<int>(u.size());
  std::array<double, 8> s;
  for (int i = 0; i < m; ++i) s[i] = u[i];
  std::sort(s.begin(), s.begin() + m, std::greater<>());
  std::array<double, 8> gap;
  for (int i = 1; i < m; ++i) gap[i - 1] = s[0] - s[i];
  return kernel_from_gaps(gamma, c0, t, s[0], {gap.data(), static_cast<std::size_t>(m - 1)},
                          panels, gl);
}

// integral over (-inf, b] of a polynomially decaying integrand, via the
// substitution z = b - (1-y)/y
template <class F>
double left_tail_integral(F&& g, double b, int panels = 50, int gl = 16) {
  return detail::geometric_panels_n(
      [&](double y) {
        const double z = b - (1.0 - y) / y;
        return g(z) / (y * y);
      },
      1.0, panels, gl);
}

// integral over (-inf, -a] (a > 0) of G with G(u) ~ |u|^{-d} slowly varying;
// the substitution w = s^{-(d-1)} flattens the decay exactly, which matters
// when d - 1 is small (it is U^{-(d-1)}-slow otherwise).
template <class F>
double power_tail_integral(F&& g, double a, double d, int panels = 40, int gl = 16) {
  const double e = d - 1.0;
  const double w0 = std::pow(a, -e);
  return detail::geometric_panels_n(
             [&](double w) {
               const double s = std::pow(w, -1.0 / e);
               return g(-s) * std::pow(w, -d / e);
             },
             w0, panels, gl) /
         e;
}

// integral over (0, L] of F with F(z) ~ z^{-p} near 0, 0 < p < 1;
// w = z^{1-p} makes the transformed integrand bounded.
template <class F>
double power_head_integral(F&& f, double L, double p, int panels = 24, int gl = 16) {
  const double e = 1.0 - p;
  return detail::geometric_panels_n(
             [&](double w) {
               const double z = std::pow(w, 1.0 / e);
               return f(z) * std::pow(z, p);
             },
             std::pow(L, e), panels, gl) /
         e;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

HermiteKernel make_kernel(int m, double H, double c0) {
  check_domain(m, H);
  if (!(c0 > 0.0)) throw std::invalid_argument("hermite: c0 must be positive");
  return {m, H, 0.5 + (1.0 - H) / m, c0};
}

HermiteKernel normed_kernel(int m, double H) { return make_kernel(m, H, norming_c0(m, H)); }

double kernel_Q(const HermiteKernel& k, double t, std::span<const double> u) {
  if (static_cast<int>(u.size()) != k.m) throw std::invalid_argument("kernel_Q: arity mismatch");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("kernel_Q: t must lie in [0,1]");
  return kernel_value(k.gamma, k.c0, t, u, 40, 16);
}

double q_norm_closed_form(int m, double H, double c0) {
  check_domain(m, H);
  const double x = 0.5 - (1.0 - H) / m;
  const double y = (2.0 - 2.0 * H) / m;
  const double log_beta = std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
  return c0 * std::sqrt(std::exp(m * log_beta) / (H * (2.0 * H - 1.0)));
}

double norming_c0(int m, double H) {
  return 1.0 / (std::sqrt(factorial(m)) * q_norm_closed_form(m, H, 1.0));
}

QNorm q_norm_quadrature(int m, double H, double U, int effort, double c0) {
  check_domain(m, H);
  if (m > 3) throw std::invalid_argument("q_norm_quadrature: m > 3 unsupported");
  if (!(U >= 10.0)) throw std::invalid_argument("q_norm_quadrature: U must be >= 10");
  const double gamma = 0.5 + (1.0 - H) / m;
  QNorm out;

  if (m == 1) {
    auto q2 = [&](double x) {
      const double u[1] = {x};
      return std::pow(kernel_value(gamma, c0, 1.0, u, 36, 16), 2);
    };
    double core = detail::geometric_panels([&](double z) { return q2(z); }, 0.5);
    core += detail::geometric_panels([&](double z) { return q2(1.0 - z); }, 0.5);
    core += detail::geometric_panels([&](double z) { return q2(-z); }, 1.0);
    const double inv_u = 1.0 / U;
    core += detail::geometric_panels(
        [&](double z) {
          const double x = inv_u + z;
          return q2(-1.0 / x) / (x * x);
        },
        1.0 - inv_u);
    const double tail = detail::geometric_panels(
        [&](double x) { return q2(-U / x) * U / (x * x); }, 1.0, 120);
    out.truncated = std::sqrt(core);
    out.tail = tail;
    out.value = std::sqrt(core + tail);
    return out;
  }

  // Ordered coordinates u_1 < ... < u_m < 1 times m!; each inner axis is
  // split into panels clustered at its singular upper end plus a
  // power-matched far tail.
  if (m == 2) {
    const double p_diag = 4.0 * gamma - 2.0;  // Q^2 ~ (u2-u1)^{-p_diag} on the diagonal
    const int kpan = std::max(16, effort + 8);
    // squared kernel from the top coordinate and the gap, so the diagonal
    // layer keeps full precision
    auto f2g = [&](double gap, double u2) {
      const double g[1] = {gap};
      return std::pow(kernel_from_gaps(gamma, c0, 1.0, u2, g, kpan, 8), 2);
    };
    // u1 over [lo, u2): power-matched panels across the diagonal, then a
    // smooth stretch clustered at its top
    auto inner = [&](double u2, double lo) {
      const double near = std::min(2.0, u2 - lo);
      double s =
          power_head_integral([&](double z) { return f2g(z, u2); }, near, p_diag, 24, 16);
      if (u2 - 2.0 > lo)
        s += detail::geometric_panels_n([&](double z) { return f2g(2.0 + z, u2); },
                                        u2 - 2.0 - lo, 40, 8);
      return s;
    };
    auto tail_a_inner = [&](double u2) {  // u1 < -U, u2 in the box
      return power_tail_integral([&](double u1) { return f2g(u2 - u1, u2); }, U, 2.0 * gamma,
                                 32, 8);
    };
    auto tail_b_inner = [&](double u2) {  // u2 < -U, u1 < u2
      return power_head_integral([&](double z) { return f2g(z, u2); }, 2.0, p_diag, 24, 16) +
             power_tail_integral([&](double u1) { return f2g(u2 - u1, u2); }, 2.0 - u2,
                                 2.0 * gamma, 32, 8);
    };
    auto outer_box = [&](auto&& fn) {  // u2 over [-U, 1]; kernel kink at 0
      return detail::geometric_panels_n([&](double z) { return fn(z); }, 0.5, 40, 16) +
             detail::geometric_panels_n([&](double z) { return fn(1.0 - z); }, 0.5, 40, 16) +
             detail::geometric_panels_n([&](double z) { return fn(-z); }, U, 40, 16);
    };
    const double core = 2.0 * outer_box([&](double u2) { return inner(u2, -U); });
    double tail = 2.0 * outer_box(tail_a_inner);
    tail += 2.0 * power_tail_integral([&](double u2) { return tail_b_inner(u2); }, U,
                                      4.0 * gamma - 1.0, 32, 8);
    out.truncated = std::sqrt(core);
    out.tail = tail;
    out.value = std::sqrt(core + tail);
    return out;
  }

  // m == 3: ordered coordinates u1 < u2 < u3 < 1, times 3!. Two passes:
  // the full integral (power-matched tails) and the [-U,1]^3 box.
  const double p_diag = 4.0 * gamma - 2.0;
  const int pan = std::max(12, effort), gl = 4;
  auto f3g = [&](double u3, double g2, double g1) {  // gaps u3-u2, u3-u1
    const double g[2] = {g2, g1};
    return std::pow(kernel_from_gaps(gamma, c0, 1.0, u3, g, 16, 4), 2);
  };
  // u1 over [lo1, u2), u2 = u3 - g2
  auto in1_box = [&](double g2, double u3, double lo1) {
    const double u2 = u3 - g2;
    if (u2 <= lo1) return 0.0;
    double s = power_head_integral([&](double z) { return f3g(u3, g2, g2 + z); },
                                   std::min(2.0, u2 - lo1), p_diag, pan, gl);
    if (u2 - 2.0 > lo1)
      s += detail::geometric_panels_n([&](double z) { return f3g(u3, g2, g2 + 2.0 + z); },
                                      u2 - 2.0 - lo1, pan, gl);
    return s;
  };
  auto in1_full = [&](double g2, double u3) {
    const double a1 = std::max(U, 2.0 - (u3 - g2));
    return in1_box(g2, u3, -a1) +
           power_tail_integral([&](double u1) { return f3g(u3, g2, u3 - u1); }, a1,
                               2.0 * gamma, pan, gl);
  };
  // u2 over [lo2, u3) through the gap g2
  auto in2_of = [&](double u3, double lo2, auto&& in1_fn) {
    if (u3 <= lo2) return 0.0;
    double s = power_head_integral([&](double z) { return in1_fn(z, u3); },
                                   std::min(2.0, u3 - lo2), p_diag, pan, gl);
    if (u3 - 2.0 > lo2)
      s += detail::geometric_panels_n([&](double z) { return in1_fn(2.0 + z, u3); },
                                      u3 - 2.0 - lo2, pan, gl);
    return s;
  };
  auto in2_box = [&](double u3) {
    return in2_of(u3, -U, [&](double g2, double u3v) { return in1_box(g2, u3v, -U); });
  };
  auto in2_full = [&](double u3) {
    const double a2 = std::max(U, 2.0 - u3);
    return in2_of(u3, -a2, in1_full) +
           power_tail_integral([&](double u2) { return in1_full(u3 - u2, u3); }, a2,
                               4.0 * gamma - 1.0, pan, gl);
  };
  // outer u3 axis, split at the kernel kink u3 = 0
  auto outer = [&](auto&& fn) {
    return detail::geometric_panels_n([&](double z) { return fn(z); }, 0.5, pan, gl) +
           detail::geometric_panels_n([&](double z) { return fn(1.0 - z); }, 0.5, pan, gl) +
           detail::geometric_panels_n([&](double z) { return fn(-z); }, U, pan, gl);
  };
  const double whole =
      6.0 * (outer(in2_full) + power_tail_integral([&](double u3) { return in2_full(u3); }, U,
                                                   6.0 * gamma - 2.0, pan, gl));
  const double core = 6.0 * outer(in2_box);
  out.truncated = std::sqrt(std::min(core, whole));
  out.tail = std::max(0.0, whole - core);
  out.value = std::sqrt(whole);
  return out;
}

// ----------------------------------------------------------- discretization

namespace {

void append_gl8(std::vector<double>& nodes, std::vector<double>& weights, double lo, double hi) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (const auto& nw : detail::kGl8) {
    nodes.push_back(mid + half * nw[0]);
    weights.push_back(half * nw[1]);
  }
}

// panels geometric toward `a` on [a, b]
void append_region(std::vector<double>& nodes, std::vector<double>& weights, double a, double b,
                   int panels) {
  double hi = b - a;
  for (int k = 0; k + 1 < panels; ++k) {
    const double lo = 0.5 * hi;
    append_gl8(nodes, weights, a + lo, a + hi);
    hi = lo;
  }
  append_gl8(nodes, weights, a, a + hi);  // stub down to a
}

struct AxisRule {
  Eigen::VectorXd nodes, weights;
};

AxisRule axis_rule(double U, int total_nodes) {
  const int P = std::max(8, total_nodes / 8);
  const int p_unit = P / 4;
  const int p_far = P - 3 * p_unit;
  std::vector<double> n, w;
  n.reserve(static_cast<std::size_t>(P) * 8);
  w.reserve(static_cast<std::size_t>(P) * 8);
  append_region(n, w, 0.0, 0.5, p_unit);       // [0, 1/2], refined at 0
  {                                            // [1/2, 1], refined at 1
    std::vector<double> rn, rw;
    append_region(rn, rw, 0.0, 0.5, p_unit);
    for (std::size_t i = 0; i < rn.size(); ++i) {
      n.push_back(1.0 - rn[i]);
      w.push_back(rw[i]);
    }
  }
  {                                            // [-1, 0], refined at 0
    std::vector<double> rn, rw;
    append_region(rn, rw, 0.0, 1.0, p_unit);
    for (std::size_t i = 0; i < rn.size(); ++i) {
      n.push_back(-rn[i]);
      w.push_back(rw[i]);
    }
  }
  {  // (-U, -1] through x = -1/u, log-even panels on [1/U, 1]
    const double ratio = std::pow(1.0 / U, 1.0 / p_far);
    double hi = 1.0;
    for (int k = 0; k < p_far; ++k) {
      const double lo = hi * ratio;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (const auto& nw : detail::kGl8) {
        const double x = mid + half * nw[0];
        n.push_back(-1.0 / x);
        w.push_back(half * nw[1] / (x * x));
      }
      hi = lo;
    }
  }
  AxisRule rule;
  rule.nodes = Eigen::Map<Eigen::VectorXd>(n.data(), static_cast<Eigen::Index>(n.size()));
  rule.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return rule;
}

// integral of Q(u0, s) ds over s in [-U, 1], via the gap form so the
// near-diagonal panels keep full precision
double row_integral(double gamma, double c0, double u0, double U) {
  double v = 0.0;
  if (u0 < 1.0)
    v += detail::geometric_panels(
        [&](double z) {
          const double g[1] = {z};
          return kernel_from_gaps(gamma, c0, 1.0, u0 + z, g, 30, 8);
        },
        1.0 - u0);
  if (u0 > -U)
    v += detail::geometric_panels(
        [&](double z) {
          const double g[1] = {z};
          return kernel_from_gaps(gamma, c0, 1.0, u0, g, 30, 8);
        },
        u0 + U);
  return v;
}

}  // namespace

DiscretizedKernel discretize_kernel(int m, double H, double U, int nodes) {
  check_domain(m, H);
  if (m > 3) throw std::invalid_argument("discretize_kernel: m > 3 unsupported");
  if (U == 0.0) U = m == 1 ? 1e6 : (m == 2 ? 2000.0 : 200.0);
  if (nodes == 0) nodes = m == 1 ? 2048 : (m == 2 ? 128 : 48);
  if (!(U >= 10.0)) throw std::invalid_argument("discretize_kernel: U must be >= 10");

  DiscretizedKernel disc;
  disc.m = m;
  disc.H = H;
  disc.U = U;
  disc.nodes = nodes;
  disc.c0 = norming_c0(m, H);
  const AxisRule rule = axis_rule(U, nodes);
  disc.axis_nodes = rule.nodes;
  disc.axis_weights = rule.weights;
  const int n = static_cast<int>(rule.nodes.size());
  const double gamma = 0.5 + (1.0 - H) / m;
  const double c0 = disc.c0;

  if (m == 1) {
    disc.vec.resize(n);
    for (int i = 0; i < n; ++i) {
      const double u[1] = {rule.nodes[i]};
      disc.vec[i] = kernel_value(gamma, c0, 1.0, u, 40, 16);
    }
    auto q2 = [&](double x) {
      const double u[1] = {x};
      return std::pow(kernel_value(gamma, c0, 1.0, u, 30, 8), 2);
    };
    disc.tail_l2 = detail::geometric_panels(
        [&](double x) { return q2(-U / x) * U / (x * x); }, 1.0);
    return disc;
  }

  if (m == 2) {
    disc.mat.resize(n, n);
    detail::parallel_for(n, [&](std::size_t i) {
      for (int j = static_cast<int>(i) + 1; j < n; ++j) {
        const double u[2] = {rule.nodes[static_cast<Eigen::Index>(i)], rule.nodes[j]};
        const double v = kernel_value(gamma, c0, 1.0, u, 32, 16);
        disc.mat(static_cast<Eigen::Index>(i), j) = v;
        disc.mat(j, static_cast<Eigen::Index>(i)) = v;
      }
    });
    std::vector<double> sigma_row(n);
    detail::parallel_for(n, [&](std::size_t i) {
      sigma_row[i] = row_integral(gamma, c0, rule.nodes[static_cast<Eigen::Index>(i)], U);
    });
    for (int i = 0; i < n; ++i) {
      double off = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) off += rule.weights[j] * disc.mat(i, j);
      disc.mat(i, i) = (sigma_row[i] - off) / rule.weights[i];
    }
    // first-order estimate of the squared mass with one coordinate < -U
    double marg = 0.0;
    for (int j = 0; j < n; ++j) {
      const double u[1] = {rule.nodes[j]};
      marg += rule.weights[j] * std::pow(kernel_value(gamma, 1.0, 1.0, u, 24, 8), 2);
    }
    disc.tail_l2 =
        2.0 * c0 * c0 * std::pow(U, 1.0 - 2.0 * gamma) / (2.0 * gamma - 1.0) * marg;
    return disc;
  }

  // m == 3
  disc.tens.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  const double half_gap = 1e-4;  // surrogate offset for repeated indices
  detail::parallel_for(n, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double u[3] = {rule.nodes[i], rule.nodes[j], rule.nodes[k]};
        if (j == i) u[1] += half_gap;
        if (k == j) u[2] += 2 * half_gap;
        const double v = kernel_value(gamma, c0, 1.0, u, 24, 8);
        const std::size_t N = static_cast<std::size_t>(n);
        const int a = i, b = j, c = k;
        const std::array<std::array<int, 3>, 6> perms = {{{a, b, c},
                                                          {a, c, b},
                                                          {b, a, c},
                                                          {b, c, a},
                                                          {c, a, b},
                                                          {c, b, a}}};
        for (const auto& pm : perms)
          disc.tens[(static_cast<std::size_t>(pm[0]) * N + pm[1]) * N + pm[2]] = v;
      }
  });
  double marg2 = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double u[2] = {rule.nodes[j], rule.nodes[k]};
      if (j == k) u[1] += half_gap;
      marg2 += rule.weights[j] * rule.weights[k] *
               std::pow(kernel_value(gamma, 1.0, 1.0, u, 16, 4), 2);
    }
  disc.tail_l2 =
      3.0 * c0 * c0 * std::pow(U, 1.0 - 2.0 * gamma) / (2.0 * gamma - 1.0) * marg2;
  return disc;
}

// ----------------------------------------------------------------- sigma

SigmaResult sigma_mH(const DiscretizedKernel& disc) {
  SigmaResult res;
  const double H = disc.H;
  if (disc.m == 1) {
    double mass = disc.tail_l2;
    for (int i = 0; i < disc.vec.size(); ++i)
      mass += disc.axis_weights[i] * disc.vec[i] * disc.vec[i];
    res.spectral_sup = std::sqrt(mass);
    res.method = "discrete-l2";
  } else if (disc.m == 2) {
    const int n = static_cast<int>(disc.mat.rows());
    Eigen::VectorXd sq = disc.axis_weights.cwiseSqrt();
    Eigen::MatrixXd S = sq.asDiagonal() * disc.mat * sq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    res.spectral_sup = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
    res.method = "dense-eig";
  } else {
    return sigma_power_iteration(disc);
  }
  res.sigma = std::pow(2.0, disc.m / (2.0 * H)) * std::pow(res.spectral_sup, 1.0 / H);
  return res;
}

SigmaResult sigma_power_iteration(const DiscretizedKernel& disc, int restarts,
                                  std::uint64_t seed) {
  if (disc.m < 2) throw std::invalid_argument("sigma_power_iteration: needs m >= 2");
  const int n = static_cast<int>(disc.axis_nodes.size());
  const Eigen::VectorXd sq = disc.axis_weights.cwiseSqrt();

  // weighted symmetric form acting on unit vectors of R^n
  Eigen::MatrixXd S;
  std::vector<double> T;
  if (disc.m == 2) {
    S = sq.asDiagonal() * disc.mat * sq.asDiagonal();
  } else {
    T.assign(disc.tens.size(), 0.0);
    const std::size_t N = n;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k)
          T[(i * N + j) * N + k] = disc.tens[(i * N + j) * N + k] * sq[i] * sq[j] * sq[k];
  }

  auto apply = [&](const Eigen::VectorXd& z) {
    if (disc.m == 2) return Eigen::VectorXd(S * z);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    const std::size_t N = n;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      const double* Ti = T.data() + i * N * N;
      for (std::size_t j = 0; j < N; ++j) {
        const double zj = z[j];
        if (zj == 0.0) continue;
        const double* Tij = Ti + j * N;
        double inner = 0.0;
        for (std::size_t k = 0; k < N; ++k) inner += Tij[k] * z[k];
        acc += zj * inner;
      }
      y[i] = acc;
    }
    return y;
  };

  double norm_est = 0.0;  // crude scale for the convexity shift
  if (disc.m == 2)
    norm_est = S.cwiseAbs().rowwise().sum().maxCoeff();
  else {
    for (double v : T) norm_est += v * v;
    norm_est = std::sqrt(norm_est);
  }
  const double shift = (disc.m - 1) * norm_est;

  double best = 0.0;
  bool best_converged = false;
  for (int sgn = 0; sgn < 2; ++sgn) {
    const double s = sgn == 0 ? 1.0 : -1.0;
    for (int r = 0; r < restarts; ++r) {
      detail::GaussianStream g(detail::substream_seed(seed, (sgn * restarts + r)));
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = g();
      z.normalize();
      double f_prev = 0.0;
      bool conv = false;
      for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd y = apply(z);
        const double f = z.dot(y);
        z = (s * y + shift * z).normalized();
        if (it > 2 && std::abs(f - f_prev) <= 1e-13 * std::max(1.0, std::abs(f))) {
          conv = true;
          f_prev = f;
          break;
        }
        f_prev = f;
      }
      if (std::abs(f_prev) > std::abs(best)) {
        best = f_prev;
        best_converged = conv;
      }
    }
  }
  SigmaResult res;
  res.spectral_sup = std::abs(best);
  res.converged = best_converged;
  res.method = disc.m == 2 ? "ss-hopm" : "ss-hopm (lower bound)";
  res.sigma = std::pow(2.0, disc.m / (2.0 * disc.H)) * std::pow(res.spectral_sup, 1.0 / disc.H);
  return res;
}

// ------------------------------------------------------------------- a_n

double a_n(int n) {
  if (n < 1) throw std::invalid_argument("a_n: n must be >= 1");
  const double e = 2.718281828459045;
  const double b_max = (n / (2.0 * e)) * (1.0 - 1e-9);

  auto lhs_le_2 = [&](double a) {
    double acc = n * std::pow(a, 1.0 / n);
    if (acc > 2.0) return false;
    const double b = std::pow(a, 2.0 / n);
    const double log_coef = std::log(b * 2.0 / n);
    for (int k = n + 1; k < 2'000'000; ++k) {
      const double lt = k * (std::log(static_cast<double>(k)) + log_coef) -
                        std::lgamma(static_cast<double>(k) + 1.0);
      const double term = std::exp(lt);
      acc += term;
      if (acc > 2.0) return false;
      if (term < 1e-19 && k > n + 4) break;
    }
    return acc <= 2.0;
  };

  double lo = 0.0, hi = std::pow(b_max, n / 2.0);
  if (lhs_le_2(hi)) return hi;  // unreachable for n in range, kept as a guard
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs_le_2(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ------------------------------------------------------------------ cache

namespace {
constexpr std::uint32_t kCacheMagic = 0x5048494bu;  // "PHIK"
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
bool get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return static_cast<bool>(in);
}
}  // namespace

void save_kernel_cache(const std::filesystem::path& file, const DiscretizedKernel& disc) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("save_kernel_cache: cannot open " + file.string());
  put(out, kCacheMagic);
  put(out, kCacheVersion);
  put(out, disc.m);
  put(out, disc.H);
  put(out, disc.U);
  put(out, disc.nodes);
  put(out, disc.c0);
  put(out, disc.tail_l2);
  const std::int64_t n = disc.axis_nodes.size();
  put(out, n);
  out.write(reinterpret_cast<const char*>(disc.axis_nodes.data()), n * 8);
  out.write(reinterpret_cast<const char*>(disc.axis_weights.data()), n * 8);
  const std::int64_t nv = disc.vec.size();
  put(out, nv);
  out.write(reinterpret_cast<const char*>(disc.vec.data()), nv * 8);
  const std::int64_t nm = disc.mat.size();
  put(out, nm);
  out.write(reinterpret_cast<const char*>(disc.mat.data()), nm * 8);
  const std::int64_t nt = static_cast<std::int64_t>(disc.tens.size());
  put(out, nt);
  out.write(reinterpret_cast<const char*>(disc.tens.data()), nt * 8);
}

std::optional<DiscretizedKernel> load_kernel_cache(const std::filesystem::path& file, int m,
                                                   double H, double U, int nodes) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint32_t magic = 0, version = 0;
  DiscretizedKernel disc;
  if (!get(in, magic) || magic != kCacheMagic) return std::nullopt;
  if (!get(in, version) || version != kCacheVersion) return std::nullopt;
  if (!get(in, disc.m) || !get(in, disc.H) || !get(in, disc.U) || !get(in, disc.nodes) ||
      !get(in, disc.c0) || !get(in, disc.tail_l2))
    return std::nullopt;
  if (disc.m != m || disc.H != H || disc.U != U || disc.nodes != nodes) return std::nullopt;
  std::int64_t n = 0;
  if (!get(in, n) || n <= 0) return std::nullopt;
  disc.axis_nodes.resize(n);
  disc.axis_weights.resize(n);
  in.read(reinterpret_cast<char*>(disc.axis_nodes.data()), n * 8);
  in.read(reinterpret_cast<char*>(disc.axis_weights.data()), n * 8);
  std::int64_t nv = 0;
  if (!get(in, nv)) return std::nullopt;
  disc.vec.resize(nv);
  in.read(reinterpret_cast<char*>(disc.vec.data()), nv * 8);
  std::int64_t nm = 0;
  if (!get(in, nm)) return std::nullopt;
  const auto side = static_cast<Eigen::Index>(nm > 0 ? static_cast<std::int64_t>(std::llround(
                                                           std::sqrt(static_cast<double>(nm))))
                                                     : 0);
  disc.mat.resize(side, side);
  if (nm > 0) in.read(reinterpret_cast<char*>(disc.mat.data()), nm * 8);
  std::int64_t nt = 0;
  if (!get(in, nt)) return std::nullopt;
  disc.tens.resize(static_cast<std::size_t>(nt));
  if (nt > 0) in.read(reinterpret_cast<char*>(disc.tens.data()), nt * 8);
  if (!in) return std::nullopt;
  return disc;
}

}  // namespace phivar
