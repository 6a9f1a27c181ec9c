#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

#include "phivar/sample_path.hpp"

namespace phivar {

// Exact fractional Brownian motion on t_i = i/n via circulant embedding of
// the fractional-Gaussian-noise covariance; n must be a power of two. Falls
// back to the dense square-root factorization for n <= 2048 if the
// embedding has a negative eigenvalue.
SamplePath simulate_fbm(double H, int n, std::uint64_t seed);

// Dense-factorization route (n <= 2048); the distributional cross-check of
// the circulant path.
SamplePath simulate_fbm_dense(double H, int n, std::uint64_t seed);

struct HermiteSimOptions {
  double U = 1e5;        // noise-domain truncation [-U, 1]
  double growth = 1.15;  // geometric cell growth toward -U
};

// Discretized multiple Wiener-Ito integral of the Hermite kernel: the
// off-diagonal sum over noise cells, evaluated through per-path FFT
// convolutions. Construction precomputes the kernel lattice and the exact
// variance of the discrete model; paths are then cheap and rescaled so
// that E X(1)^2 = 1 exactly in the discrete law.
class HermiteSimulator {
 public:
  HermiteSimulator(int m, double H, int n, HermiteSimOptions opt = {});

  SamplePath path(std::uint64_t seed) const;
  int grid_size() const { return n_; }
  double raw_variance() const { return raw_var_; }  // E X(1)^2 before rescale

 private:
  int m_;
  double H_;
  int n_;
  double gamma_;
  double c0_;
  double rescale_;
  double raw_var_ = 1.0;
  Eigen::VectorXd kvec_, kvec2_, kvec3_;        // Toeplitz kernel lags, powers
  std::vector<std::complex<double>> kfft_, k2fft_, k3fft_;  // padded spectra
  Eigen::MatrixXd neg_a_, neg_a2_, neg_a3_;     // far-cell kernel columns
  Eigen::VectorXd neg_var_;                     // far-cell variances
  Eigen::VectorXd neg_node_;

  void compute_variance();
};

SamplePath simulate_hermite(int m, double H, int n, std::uint64_t seed,
                            HermiteSimOptions opt = {});

struct CovarianceReport {
  Eigen::VectorXd times;
  Eigen::MatrixXd empirical;
  Eigen::MatrixXd model;
  Eigen::MatrixXd deviation;
  Eigen::MatrixXd mc_sigma;
  double max_abs_dev = 0.0;
  double max_sigma_units = 0.0;
};

// Empirical covariance on a coarse sub-grid against the fBm formula (the
// covariance of every Hermite order coincides with it).
CovarianceReport covariance_report(const std::vector<SamplePath>& paths, int subgrid = 8);

}  // namespace phivar
