#pragma once

#include <functional>
#include <optional>

#include "ksc/types.hpp"

namespace ksc {

enum class KernelKind { gaussian, pair_dist, euclidean, product_threshold };

// Tagged kernel description. tau is the Gaussian bandwidth; L and sigma
// parameterize the scalar clamp kernel phi(x)phi(y) with
// phi(t) = clamp(t, -sigma, sigma) * sqrt(L / sigma).
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double tau = 1.0;
  double L = 1.0;
  double sigma = 1.0;

  static KernelSpec gaussian(double tau);
  static KernelSpec pair_dist();
  static KernelSpec euclidean();
  static KernelSpec product_threshold(double L, double sigma);

  void validate() const;
};

// throws std::invalid_argument on empty or non-finite input
void validate_data(const Matrix& X);

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y);

// n x n kernel matrix over the columns of X. Each unordered pair is
// evaluated once and mirrored, so the result is symmetric bit for bit.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X,
                     int n_threads = 1);

// Caller-supplied kernel. Any Lipschitz constant needed downstream must be
// provided by the caller; it is not checked here.
using KernelFn = std::function<double(const Vector&, const Vector&)>;
Matrix kernel_matrix(const KernelFn& fn, const Matrix& X, int n_threads = 1);

// Lipschitz constant w.r.t. perturbations of either argument, when one
// exists: gaussian sqrt(2)/(e tau), pair_dist 1, product_threshold L.
std::optional<double> lipschitz_constant(const KernelSpec& spec);

}  // namespace ksc
