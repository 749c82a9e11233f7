#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksc/rng.hpp"
#include "ksc/types.hpp"

namespace ksc {

enum class NoiseKind { isotropic, radial, constant_diag };

// Mixture of uniform distributions on concentric spheres with additive
// noise scaled by sigma / sqrt(d).
struct MixtureConfig {
  std::vector<double> radii;
  std::vector<double> priors;  // empty means uniform
  NoiseKind noise_kind = NoiseKind::isotropic;
  double sigma = 0.0;
  std::vector<double> diag_values;  // constant_diag covariance diagonal
  int d = 1;
  int n = 1;

  int components() const { return static_cast<int>(radii.size()); }
  std::vector<double> effective_priors() const;
  void validate() const;
};

struct MixtureSample {
  Matrix X;                 // d x n observed points
  Matrix mu;                // d x n latent signal points
  std::vector<int> labels;  // component of each point
  std::uint64_t seed = 0;
};

// uniform on the unit sphere in R^d; a normalized standard Gaussian
Vector sample_unit_sphere(int d, Rng& rng);

MixtureSample sample_mixture(const MixtureConfig& cfg, std::uint64_t seed);

// mu + sqrt_sigma * w with w_j iid uniform on [-half_width, half_width]
Vector sample_lc_uniform(const Vector& mu, const Matrix& sqrt_sigma,
                         double half_width, Rng& rng);

// one row per point: label, x_0..x_{d-1}[, mu_0..mu_{d-1}]
void write_csv(const MixtureSample& sample, const std::string& path,
               bool include_mu = false);

}  // namespace ksc
