#include "phivar/simulate.hpp"

#include <unsupported/Eigen/FFT>

#include <Eigen/Cholesky>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "phivar/detail/rng.hpp"
#include "phivar/hermite.hpp"

namespace phivar {

namespace {

bool is_pow2(int n) { return n >= 2 && (n & (n - 1)) == 0; }

// autocovariance of unit-spaced fractional Gaussian noise
double fgn_rho(int k, double H) {
  const double a = std::abs(static_cast<double>(k));
  return 0.5 * (std::pow(a + 1.0, 2 * H) - 2.0 * std::pow(a, 2 * H) +
                std::pow(std::abs(a - 1.0), 2 * H));
}

SamplePath integrate_increments(const Eigen::VectorXd& fgn, double H, int n,
                                std::uint64_t seed, const char* generator) {
  SamplePath p;
  p.values.resize(n + 1);
  p.values[0] = 0.0;
  const double scale = std::pow(static_cast<double>(n), -H);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += fgn[i];
    p.values[i + 1] = scale * acc;
  }
  p.meta = {generator, 1, H, seed};
  return p;
}

// Cached Cholesky factors of the fGn covariance for the dense route.
const Eigen::MatrixXd& dense_factor(double H, int n) {
  static std::map<std::pair<double, int>, Eigen::MatrixXd> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  const auto key = std::make_pair(H, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) C(i, j) = fgn_rho(i - j, H);
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("simulate_fbm_dense: covariance factorization failed");
  return cache.emplace(key, Eigen::MatrixXd(llt.matrixL())).first->second;
}

}  // namespace

SamplePath simulate_fbm_dense(double H, int n, std::uint64_t seed) {
  if (!(H > 0.0 && H < 1.0)) throw std::domain_error("simulate_fbm: H must lie in (0,1)");
  if (n < 2 || n > 2048) throw std::invalid_argument("simulate_fbm_dense: n must be in [2, 2048]");
  const Eigen::MatrixXd& L = dense_factor(H, n);
  detail::GaussianStream g(detail::substream_seed(seed, 0x0fb3));
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = g();
  const Eigen::VectorXd fgn = L * z;
  SamplePath p = integrate_increments(fgn, H, n, seed, "fbm-dense");
  return p;
}

SamplePath simulate_fbm(double H, int n, std::uint64_t seed) {
  if (!(H > 0.0 && H < 1.0)) throw std::domain_error("simulate_fbm: H must lie in (0,1)");
  if (!is_pow2(n)) throw std::invalid_argument("simulate_fbm: n must be a power of two >= 2");

  // circulant embedding of the fGn covariance
  const int M = 2 * n;
  std::vector<std::complex<double>> c(M);
  for (int k = 0; k <= n; ++k) c[k] = fgn_rho(k, H);
  for (int k = 1; k < n; ++k) c[2 * n - k] = fgn_rho(k, H);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> lambda(M);
  fft.fwd(lambda, c);

  double min_l = 0.0, max_l = 0.0;
  for (const auto& l : lambda) {
    min_l = std::min(min_l, l.real());
    max_l = std::max(max_l, l.real());
  }
  if (min_l < -1e-9 * max_l) {
    if (n <= 2048) return simulate_fbm_dense(H, n, seed);
    throw std::runtime_error("simulate_fbm: circulant embedding not nonnegative");
  }

  detail::GaussianStream g(detail::substream_seed(seed, 0x0fb1));
  std::vector<std::complex<double>> a(M);
  const double inv_m = 1.0 / static_cast<double>(M);
  a[0] = std::sqrt(std::max(0.0, lambda[0].real()) * inv_m) * g();
  a[n] = std::sqrt(std::max(0.0, lambda[n].real()) * inv_m) * g();
  for (int j = 1; j < n; ++j) {
    const double s = std::sqrt(std::max(0.0, lambda[j].real()) * inv_m * 0.5);
    const double re = g(), im = g();
    a[j] = std::complex<double>(s * re, s * im);
    a[M - j] = std::conj(a[j]);
  }
  std::vector<std::complex<double>> x(M);
  fft.fwd(x, a);
  Eigen::VectorXd fgn(n);
  for (int i = 0; i < n; ++i) fgn[i] = x[i].real();
  return integrate_increments(fgn, H, n, seed, "fbm");
}

// ------------------------------------------------------------------ hermite

HermiteSimulator::HermiteSimulator(int m, double H, int n, HermiteSimOptions opt)
    : m_(m), H_(H), n_(n) {
  if (m < 1 || m > 3) throw std::invalid_argument("simulate_hermite: m must be 1..3");
  if (!(H > 0.5 && H < 1.0)) throw std::domain_error("simulate_hermite: H must lie in (1/2,1)");
  const int cap = m == 1 ? 8192 : (m == 2 ? 4096 : 512);
  if (n < 2 || n > cap)
    throw std::invalid_argument(
        "simulate_hermite: grid too large for m (caps: m=1 8192, m=2 4096, m=3 512); "
        "use simulate_fbm for large m=1 grids");
  if (!(opt.U >= 10.0) || !(opt.growth > 1.0))
    throw std::invalid_argument("simulate_hermite: bad discretization options");

  gamma_ = 0.5 + (1.0 - H) / m;
  c0_ = norming_c0(m, H);
  const double h = 1.0 / n;

  // Toeplitz lags for inner cells: nodes u_j = j h, v_q = (q + 1/2) h
  kvec_.resize(n);
  for (int l = 0; l < n; ++l) kvec_[l] = std::pow((l + 0.5) * h, -gamma_);
  kvec2_ = kvec_.array().square().matrix();
  kvec3_ = kvec_.array().cube().matrix();

  // far cells with geometrically growing width
  std::vector<double> node, var;
  double x0 = 0.0, width = h;
  while (x0 < opt.U) {
    const double x1 = x0 + width;
    node.push_back(-0.5 * (x0 + x1));
    var.push_back(width);
    x0 = x1;
    width *= opt.growth;
  }
  const int K = static_cast<int>(node.size());
  neg_node_ = Eigen::Map<Eigen::VectorXd>(node.data(), K);
  neg_var_ = Eigen::Map<Eigen::VectorXd>(var.data(), K);
  neg_a_.resize(n, K);
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < K; ++k) neg_a_(q, k) = std::pow((q + 0.5) * h - neg_node_[k], -gamma_);
  if (m >= 2) neg_a2_ = neg_a_.array().square().matrix();
  if (m >= 3) neg_a3_ = neg_a_.array().cube().matrix();

  // padded kernel spectra for per-path convolution
  Eigen::FFT<double> fft;
  auto spectrum = [&](const Eigen::VectorXd& kv, std::vector<std::complex<double>>& out) {
    std::vector<std::complex<double>> padded(2 * n, 0.0);
    for (int i = 0; i < n; ++i) padded[i] = kv[i];
    fft.fwd(out, padded);
  };
  spectrum(kvec_, kfft_);
  if (m >= 2) spectrum(kvec2_, k2fft_);
  if (m >= 3) spectrum(kvec3_, k3fft_);

  compute_variance();
  rescale_ = 1.0 / std::sqrt(raw_var_);
}

void HermiteSimulator::compute_variance() {
  const int n = n_, K = static_cast<int>(neg_node_.size());
  const double h = 1.0 / n;
  const double ch = c0_ * h;

  if (m_ == 1) {
    // E X(1)^2 = sum_j (c0 h column-sum_j)^2 var_j
    double e = 0.0;
    double prefix = 0.0;
    // inner cells: column sum over q >= j equals prefix of kvec
    std::vector<double> colsum(n);
    for (int l = 0; l < n; ++l) {
      prefix += kvec_[l];
      colsum[n - 1 - l] = prefix;
    }
    for (int j = 0; j < n; ++j) e += h * std::pow(ch * colsum[j], 2);
    for (int k = 0; k < K; ++k) e += neg_var_[k] * std::pow(ch * neg_a_.col(k).sum(), 2);
    raw_var_ = e;
    return;
  }

  // assemble A = [toeplitz | far] with variance-weighted columns
  Eigen::MatrixXd B(n, n + K);
  B.setZero();
  for (int q = 0; q < n; ++q)
    for (int j = 0; j <= q; ++j) B(q, j) = kvec_[q - j];
  B.rightCols(K) = neg_a_;
  Eigen::VectorXd v(n + K);
  v.head(n).setConstant(h);
  v.tail(K) = neg_var_;
  const Eigen::VectorXd sv = v.cwiseSqrt();
  const Eigen::MatrixXd Bw = B * sv.asDiagonal();
  const Eigen::MatrixXd G = Bw * Bw.transpose();  // G(q,q') = sum_j A A' var_j

  // diagonal coefficients K_jj = c0 h sum_q A_qj^2
  Eigen::VectorXd kdiag(n + K);
  {
    double prefix = 0.0;
    std::vector<double> colsum2(n);
    for (int l = 0; l < n; ++l) {
      prefix += kvec2_[l];
      colsum2[n - 1 - l] = prefix;
    }
    for (int j = 0; j < n; ++j) kdiag[j] = ch * colsum2[j];
    for (int k = 0; k < K; ++k) kdiag[n + k] = ch * neg_a2_.col(k).sum();
  }

  if (m_ == 2) {
    const double all = ch * ch * G.array().square().sum();
    double diag = 0.0;
    for (int j = 0; j < n + K; ++j) diag += std::pow(kdiag[j] * v[j], 2);
    raw_var_ = 2.0 * (all - diag);
    return;
  }

  // m == 3: 6 [ sum_all - 3 sum_{i=j,k} + 2 sum_{i=j=k} ] of K^2 v v v
  const Eigen::MatrixXd A2 = B.array().square().matrix();
  const Eigen::VectorXd v2 = v.array().square().matrix();
  const Eigen::MatrixXd H2 = A2 * v2.asDiagonal() * A2.transpose();
  const Eigen::MatrixXd A3 = B.array().cube().matrix();
  const Eigen::VectorXd v3 = v.array().cube().matrix();
  const Eigen::MatrixXd H3 = A3 * v3.asDiagonal() * A3.transpose();

  const double all = std::pow(ch, 2.0) * G.array().cube().sum();
  const double pair = std::pow(ch, 2.0) * (H2.array() * G.array()).sum();
  const double triple = std::pow(ch, 2.0) * H3.array().sum();
  raw_var_ = 6.0 * (all - 3.0 * pair + 2.0 * triple);
}

SamplePath HermiteSimulator::path(std::uint64_t seed) const {
  const int n = n_, K = static_cast<int>(neg_node_.size());
  const double h = 1.0 / n;
  detail::GaussianStream g(detail::substream_seed(seed, 0x4e72));

  Eigen::VectorXd db(n), dbn(K);
  const double sqrt_h = std::sqrt(h);
  for (int j = 0; j < n; ++j) db[j] = sqrt_h * g();
  for (int k = 0; k < K; ++k) dbn[k] = std::sqrt(neg_var_[k]) * g();

  Eigen::FFT<double> fft;
  auto conv = [&](const std::vector<std::complex<double>>& kf,
                  const Eigen::VectorXd& x) {
    std::vector<std::complex<double>> padded(2 * n, 0.0), xf, prod(2 * n);
    for (int i = 0; i < n; ++i) padded[i] = x[i];
    fft.fwd(xf, padded);
    for (int i = 0; i < 2 * n; ++i) prod[i] = xf[i] * kf[i];
    std::vector<std::complex<double>> res;
    fft.inv(res, prod);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = res[i].real();
    return out;
  };

  const Eigen::VectorXd S = conv(kfft_, db) + neg_a_ * dbn;
  Eigen::VectorXd term;
  if (m_ == 1) {
    term = S;
  } else if (m_ == 2) {
    const Eigen::VectorXd db2 = db.array().square().matrix();
    const Eigen::VectorXd dbn2 = dbn.array().square().matrix();
    const Eigen::VectorXd P = conv(k2fft_, db2) + neg_a2_ * dbn2;
    term = (S.array().square() - P.array()).matrix();
  } else {
    const Eigen::VectorXd db2 = db.array().square().matrix();
    const Eigen::VectorXd dbn2 = dbn.array().square().matrix();
    const Eigen::VectorXd db3 = db.array().cube().matrix();
    const Eigen::VectorXd dbn3 = dbn.array().cube().matrix();
    const Eigen::VectorXd P = conv(k2fft_, db2) + neg_a2_ * dbn2;
    const Eigen::VectorXd T = conv(k3fft_, db3) + neg_a3_ * dbn3;
    term =
        (S.array().cube() - 3.0 * (P.array() * S.array()) + 2.0 * T.array()).matrix();
  }

  SamplePath p;
  p.values.resize(n + 1);
  p.values[0] = 0.0;
  double acc = 0.0;
  const double scale = c0_ * h * rescale_;
  for (int i = 0; i < n; ++i) {
    acc += term[i];
    p.values[i + 1] = scale * acc;
  }
  p.meta = {"hermite", m_, H_, seed};
  return p;
}

SamplePath simulate_hermite(int m, double H, int n, std::uint64_t seed, HermiteSimOptions opt) {
  return HermiteSimulator(m, H, n, opt).path(seed);
}

// --------------------------------------------------------------- covariance

CovarianceReport covariance_report(const std::vector<SamplePath>& paths, int subgrid) {
  if (paths.size() < 100) throw std::invalid_argument("covariance_report: need >= 100 paths");
  const int n = paths.front().grid_size();
  for (const auto& p : paths)
    if (p.grid_size() != n) throw std::invalid_argument("covariance_report: mixed grids");
  if (subgrid < 1 || subgrid > n) throw std::invalid_argument("covariance_report: bad subgrid");

  const double H = paths.front().meta.H;
  const int P = static_cast<int>(paths.size());
  CovarianceReport rep;
  rep.times.resize(subgrid);
  std::vector<int> idx(subgrid);
  for (int k = 0; k < subgrid; ++k) {
    idx[k] = static_cast<int>(std::lround(static_cast<double>(k + 1) * n / subgrid));
    rep.times[k] = static_cast<double>(idx[k]) / n;
  }
  rep.empirical.setZero(subgrid, subgrid);
  rep.model.resize(subgrid, subgrid);
  rep.deviation.resize(subgrid, subgrid);
  rep.mc_sigma.resize(subgrid, subgrid);

  Eigen::MatrixXd sum(subgrid, subgrid), sum2(subgrid, subgrid);
  sum.setZero();
  sum2.setZero();
  for (const auto& p : paths)
    for (int a = 0; a < subgrid; ++a)
      for (int b = 0; b < subgrid; ++b) {
        const double prod = p.values[idx[a]] * p.values[idx[b]];
        sum(a, b) += prod;
        sum2(a, b) += prod * prod;
      }
  rep.max_abs_dev = 0.0;
  rep.max_sigma_units = 0.0;
  for (int a = 0; a < subgrid; ++a)
    for (int b = 0; b < subgrid; ++b) {
      const double s = rep.times[a], t = rep.times[b];
      const double mean = sum(a, b) / P;
      const double var = std::max(0.0, sum2(a, b) / P - mean * mean);
      rep.empirical(a, b) = mean;
      rep.model(a, b) = 0.5 * (std::pow(s, 2 * H) + std::pow(t, 2 * H) -
                               std::pow(std::abs(t - s), 2 * H));
      rep.deviation(a, b) = mean - rep.model(a, b);
      rep.mc_sigma(a, b) = std::sqrt(var / P);
      rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(rep.deviation(a, b)));
      if (rep.mc_sigma(a, b) > 0.0)
        rep.max_sigma_units =
            std::max(rep.max_sigma_units, std::abs(rep.deviation(a, b)) / rep.mc_sigma(a, b));
    }
  return rep;
}

}  // namespace phivar
