#pragma once

#include <cstdint>
#include <vector>

#include "ksc/kernels.hpp"
#include "ksc/models.hpp"
#include "ksc/rng.hpp"
#include "ksc/types.hpp"

namespace ksc {

// Shared parameters of the closed-form mean kernels: Gaussian bandwidth tau,
// noise level sigma, ambient dimension d.
struct MeanKernelParams {
  double tau = 1.0;
  double sigma = 0.0;
  int d = 1;
};

// E exp(-(m + t w)^2 / 2) for w ~ N(0,1): equals (1/s) exp(-m^2 / (2 s^2))
// with s^2 = 1 + t^2.
double kt_1d(double m, double t);

// mean Gaussian kernel under isotropic noise with per-point levels
// sigma_i, sigma_j: s^{-d} exp(-|u-v|^2 / (2 s^2 tau^2)),
// s^2 = 1 + (sigma_i^2 + sigma_j^2) / (d tau^2)
double mean_gauss_isotropic(const Vector& u, const Vector& v, double sigma_i,
                            double sigma_j, const MeanKernelParams& p);

// mean Gaussian kernel under rank-one radial noise. Defined for nonzero
// u, v with cos angle alpha != 0 and u != v; other inputs throw.
double mean_gauss_radial(const Vector& u, const Vector& v,
                         const MeanKernelParams& p);

// same, but inputs outside the closed form's domain are answered by a
// fixed-seed Monte Carlo estimate instead of an error
double mean_gauss_radial_or_mc(const Vector& u, const Vector& v,
                               const MeanKernelParams& p);

// mean Gaussian kernel under diagonal-covariance noise; one kt_1d factor
// per coordinate
double mean_gauss_constant_diag(const Vector& u, const Vector& v,
                                const std::vector<double>& diag_values,
                                const MeanKernelParams& p);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// Monte Carlo estimate of E K(X1, X2) for independent noisy copies of u and
// v. Works for any kernel/noise combination the sampler supports.
McEstimate mc_mean_kernel(const KernelSpec& spec, NoiseKind noise_kind,
                          const Vector& u, const Vector& v, double sigma,
                          int d, std::int64_t n_samples, Rng& rng,
                          const std::vector<double>& diag_values = {});

// E exp(u <theta, theta'>) for independent uniform unit vectors in R^d,
// d >= 2, by adaptive Gauss-Kronrod quadrature in angular coordinates
double psi_d(double u, int d);

// the same moment by direct simulation of unit-vector pairs
McEstimate psi_d_mc(double u, int d, std::int64_t n_samples, Rng& rng);

// exp(u^2 / (4 d)): the value obtained by modeling the unit-vector inner
// product as N(0, 1/(2d)). Tests report its measured accuracy; the exact
// variance of the inner product is 1/d.
double psi_d_normal_approx(double u, int d);

enum class MeanKernelMethod { closed_form, monte_carlo };

// Matrix of mean kernel values over the columns of mu. Off-diagonal entries
// are E K(X_i, X_j) for independent noise; diagonal entries are
// E K(X_i, X_i) for a single noisy copy (exactly 1 for the Gaussian kernel).
Matrix mean_kernel_matrix(const KernelSpec& spec, NoiseKind noise_kind,
                          const Matrix& mu, double sigma, double tau,
                          MeanKernelMethod method, std::int64_t n_mc = 100000,
                          std::uint64_t mc_seed = 1,
                          const std::vector<double>& diag_values = {},
                          int n_threads = 1);

}  // namespace ksc
