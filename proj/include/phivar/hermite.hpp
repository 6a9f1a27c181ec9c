#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phivar {

// Kernel Q_t(u_1..u_m) = c0 int_0^t prod (v - u_i)_+^{-gamma} dv with
// gamma = 1/2 + (1-H)/m.
struct HermiteKernel {
  int m = 1;
  double H = 0.75;
  double gamma = 0.75;
  double c0 = 1.0;
};

HermiteKernel make_kernel(int m, double H, double c0 = 1.0);
HermiteKernel normed_kernel(int m, double H);  // c0 such that m! ||Q_1||^2 = 1

// Pointwise kernel value; the v-integral is regularized by the substitution
// w = (v - max u)^{1-gamma}. Returns 0 when max(u) >= t and +inf when the
// maximum is attained by two coordinates inside [0, t).
double kernel_Q(const HermiteKernel& k, double t, std::span<const double> u);

// ||Q_1||_{L2} from the beta-function identity.
double q_norm_closed_form(int m, double H, double c0 = 1.0);

struct QNorm {
  double value = 0.0;      // ||Q_1||_{L2}, truncated part plus tail
  double truncated = 0.0;  // L2 mass over [-U, 1]^m
  double tail = 0.0;       // computed mass beyond the box
};

// Direct u-space quadrature (m <= 3). `effort` scales the panel budget;
// 16 is the default.
QNorm q_norm_quadrature(int m, double H, double U = 1000.0, int effort = 16, double c0 = 1.0);

double norming_c0(int m, double H);

// Per-axis quadrature rule on (-U, 1] together with the kernel sampled on
// the node lattice. For m = 2 the diagonal carries the singularity-
// subtraction value (sigma_i - sum_{j!=i} w_j Q_ij)/w_i, keeping the
// Nystrom rule exact on constants.
struct DiscretizedKernel {
  int m = 1;
  double H = 0.75;
  double U = 0.0;
  int nodes = 0;
  double c0 = 1.0;
  Eigen::VectorXd axis_nodes;
  Eigen::VectorXd axis_weights;
  Eigen::VectorXd vec;        // m = 1
  Eigen::MatrixXd mat;        // m = 2
  std::vector<double> tens;   // m = 3, row-major n^3
  double tail_l2 = 0.0;       // estimated squared L2 mass beyond -U
};

DiscretizedKernel discretize_kernel(int m, double H, double U = 0.0, int nodes = 0);

void save_kernel_cache(const std::filesystem::path& file, const DiscretizedKernel& disc);
std::optional<DiscretizedKernel> load_kernel_cache(const std::filesystem::path& file, int m,
                                                   double H, double U, int nodes);

struct SigmaResult {
  double sigma = 0.0;         // 2^{m/(2H)} spectral_sup^{1/H}
  double spectral_sup = 0.0;  // sup over the L2 unit ball of |<Q, xi x...x xi>|
  bool converged = true;
  std::string method;
};

// m=1: discrete L2 norm; m=2: dense symmetric eigensolve; m=3: shifted
// symmetric power iteration with restarts (lower-bound semantics).
SigmaResult sigma_mH(const DiscretizedKernel& disc);
// Power-iteration route for m >= 2 (cross-check of the dense solve at m=2).
SigmaResult sigma_power_iteration(const DiscretizedKernel& disc, int restarts = 20,
                                  std::uint64_t seed = 0x5eedULL);

// Largest a with n a^{1/n} + sum_{k>n} (k a^{2/n} 2/n)^k / k! <= 2.
double a_n(int n);

}  // namespace phivar
