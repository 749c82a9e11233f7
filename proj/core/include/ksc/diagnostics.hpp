#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ksc/kernels.hpp"
#include "ksc/mean_kernel.hpp"
#include "ksc/models.hpp"
#include "ksc/rng.hpp"
#include "ksc/types.hpp"

namespace ksc {

// Block statistics of a mean kernel over labeled points. Psi holds block
// means, v2 within-block variances, D the pi-weighted squared separations
// between rows of Psi. gamma2 = min_{k != l} D_kl and gamma2_tilde the same
// minimum of pi_l * D_kl; vbar2 = sum_kl pi_k pi_l v2_kl.
struct ClusterStats {
  Matrix Psi;
  Matrix v2;
  Matrix D;
  double gamma2 = 0.0;
  double gamma2_tilde = 0.0;
  double vbar2 = 0.0;
  Vector pi;
};

struct BoundReport {
  double deviation = 0.0;
  double bound = 0.0;
  double t = 0.0;
  bool violated = false;  // deviation > bound
  std::map<std::string, double> context;
};

// largest singular value
double operator_norm(const Matrix& M);

// deviation bound for an L-Lipschitz kernel of noise scale sigma_inf and
// sub-gaussian constant omega: 2 L omega sigma_inf (n / sqrt(c) + sqrt(n) t)
double lipschitz_bound(double L, double omega, double sigma_inf, int n,
                       double t, double c = 0.5);

// deviation bound for the inner-product kernel:
// kappa^2 sigma_inf^2 (n + sqrt(n d)) + kappa sigma_inf sqrt(n) opnorm_M
double euclidean_bound(double kappa, double sigma_inf, int n, int d,
                       double opnorm_M);

using MeanKernelFn = std::function<double(const Vector&, const Vector&)>;

// Statistics of the empirical pair measures: block (k, l) ranges over all
// ordered pairs of points with those labels, including i = j. Errors on an
// empty cluster.
ClusterStats empirical_stats(const MeanKernelFn& mean_kernel, const Matrix& mu,
                             const std::vector<int>& labels, int R,
                             int n_threads = 1);

// Same statistics from a precomputed matrix of mean kernel values whose
// diagonal holds the function evaluated at equal arguments.
ClusterStats empirical_stats(const Matrix& mean_values,
                             const std::vector<int>& labels, int R);

// Population version: blocks are sampled from the product of mixture
// components, n_mc independent pairs each; pi comes from the priors.
ClusterStats population_stats(const MeanKernelFn& mean_kernel,
                              const MixtureConfig& cfg, std::int64_t n_mc,
                              Rng& rng);

// n x n matrix with entry (i, j) = Psi(labels_i, labels_j)
Matrix block_constant(const ClusterStats& stats, const std::vector<int>& labels);

struct MisBound {
  double F = 0.0;        // F evaluated at gamma2
  double F_tilde = 0.0;  // F evaluated at gamma2_tilde
  double C1 = 0.0;
  bool valid = false;    // F_tilde <= 1 / C1
  double bound = 0.0;    // C1 * F
};

// F(g) = (16 R / g) [ (4 L^2 sigma^2 / d)(1 + t / sqrt(n))^2 max_op_sigma
//                     + vbar2 ]
MisBound mis_bound(const ClusterStats& stats, double L, double sigma, int d,
                   int n, double t, double max_op_sigma,
                   double kappa_kmeans = 1.0);

using SamplerFn = std::function<Matrix(Rng&)>;

// One concentration trial: draws data, forms the kernel matrix and compares
// opnorm(K - mean_K) / n against lipschitz_bound(...) / n. The pass/fail
// constant c is exact for Gaussian noise (c = 1/2); other noise makes the
// report informational.
BoundReport concentration_trial(const SamplerFn& sample_data,
                                const Matrix& mean_K, const KernelSpec& spec,
                                double omega, double sigma_inf, double t,
                                double c, std::uint64_t seed);

// isotropic Gaussian noise around fixed signal points with the Gaussian
// kernel; per-n bound (4 / e)(sigma / tau)(1 / sqrt d)(1 + t / sqrt n)
BoundReport gaussian_concentration_trial(const Matrix& mu, double sigma,
                                         double tau, double t,
                                         std::uint64_t seed);

// scalar clamp kernel on n uniform(-2 sigma, 2 sigma) points; reports the
// deviation opnorm(K - EK) against the level L sigma n / 8, where
// EK = (2 L sigma / 3) I
BoundReport lower_bound_trial(double L, double sigma, int n,
                              std::uint64_t seed);

struct VarianceReport {
  double variance = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // 8 L^2 sigma_inf^2
  bool within_bound = false;
  std::int64_t n_mc = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo variance of K(X1, X2) for X_i = mu_i + sigma_inf w_i with
// standard Gaussian w_i, compared against 8 L^2 sigma_inf^2 with 4-stderr
// slack.
VarianceReport variance_check(const KernelSpec& spec, const Vector& mu1,
                              const Vector& mu2, double sigma_inf,
                              std::int64_t n_mc, std::uint64_t seed);

struct ChaosTailReport {
  double ez = 0.0;        // analytic mean of the quadratic form
  double mean_mc = 0.0;
  double var_mc = 0.0;
  double fro2_weighted = 0.0;  // d * |A|_F^2
  double cross_fro2 = 0.0;     // |M A^S|_F^2, A^S the symmetrized A
  double op_A = 0.0;
  double c_fit = 0.0;  // largest c with log P(|Z - EZ| > s) <= -c min(s^2/v, s)
  double v_fit = 0.0;
  bool envelope_ok = false;
  std::int64_t n_mc = 0;
};

// Tail profile of Z = sum_ij A_ij <X_i, X_j> for X_i = mu_i + sigma_inf g_i.
// EZ = sum_ij A_ij <mu_i, mu_j> + sigma_inf^2 d tr(A). The fit runs over the
// upper half of the observed deviation quantiles.
ChaosTailReport hw_chaos_trial(const Matrix& A, const Matrix& mu,
                               double sigma_inf, std::int64_t n_mc,
                               std::uint64_t seed);

struct LowRankCheck {
  double lhs = 0.0;  // |A_recon - B|_F^2
  double rhs = 0.0;  // 8 R |A - B|_op^2
  bool holds = false;
};

// Frobenius error of a rank-R spectral truncation of A against any rank-R
// target B, controlled by the operator-norm distance of A to B.
LowRankCheck low_rank_approx_check(const Matrix& A_recon, const Matrix& A,
                                   const Matrix& B, int R);

}  // namespace ksc
