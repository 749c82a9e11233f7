#include "ksc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ksc/parallel.hpp"

namespace ksc {

KernelSpec KernelSpec::gaussian(double tau) {
  KernelSpec s;
  s.kind = KernelKind::gaussian;
  s.tau = tau;
  s.validate();
  return s;
}

KernelSpec KernelSpec::pair_dist() {
  KernelSpec s;
  s.kind = KernelKind::pair_dist;
  return s;
}

KernelSpec KernelSpec::euclidean() {
  KernelSpec s;
  s.kind = KernelKind::euclidean;
  return s;
}

KernelSpec KernelSpec::product_threshold(double L, double sigma) {
  KernelSpec s;
  s.kind = KernelKind::product_threshold;
  s.L = L;
  s.sigma = sigma;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian) {
    if (!(tau > 0.0) || !std::isfinite(tau))
      throw std::invalid_argument("KernelSpec: gaussian requires tau > 0");
  }
  if (kind == KernelKind::product_threshold) {
    if (!(L > 0.0) || !std::isfinite(L))
      throw std::invalid_argument("KernelSpec: product_threshold requires L > 0");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument(
          "KernelSpec: product_threshold requires sigma > 0");
  }
}

void validate_data(const Matrix& X) {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("data matrix must be at least 1 x 1");
  if (!X.allFinite())
    throw std::invalid_argument("data matrix has non-finite entries");
}

namespace {

double clamp_feature(double t, double L, double sigma) {
  return std::clamp(t, -sigma, sigma) * std::sqrt(L / sigma);
}

}  // namespace

double eval_kernel(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("eval_kernel: dimension mismatch");
  switch (spec.kind) {
    case KernelKind::gaussian:
      return std::exp(-(x - y).squaredNorm() / (2.0 * spec.tau * spec.tau));
    case KernelKind::pair_dist:
      return (x - y).norm();
    case KernelKind::euclidean:
      return x.dot(y);
    case KernelKind::product_threshold:
      if (x.size() != 1)
        throw std::invalid_argument(
            "eval_kernel: product_threshold is a scalar kernel");
      return clamp_feature(x[0], spec.L, spec.sigma) *
             clamp_feature(y[0], spec.L, spec.sigma);
  }
  throw std::logic_error("eval_kernel: unknown kernel kind");
}

namespace {

// Fills row i for j >= i and mirrors. Rows are claimed dynamically to
// balance the triangular work; every write targets a distinct cell.
Matrix pairwise_matrix(const Matrix& X,
                       const std::function<double(int, int)>& entry,
                       int n_threads) {
  const auto n = static_cast<int>(X.cols());
  Matrix K(n, n);
  parallel_for(n, n_threads, [&](std::int64_t i) {
    const int ii = static_cast<int>(i);
    for (int j = ii; j < n; ++j) {
      const double v = entry(ii, j);
      K(ii, j) = v;
      K(j, ii) = v;
    }
  });
  return K;
}

}  // namespace

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& X, int n_threads) {
  spec.validate();
  validate_data(X);
  return pairwise_matrix(
      X, [&](int i, int j) { return eval_kernel(spec, X.col(i), X.col(j)); },
      n_threads);
}

Matrix kernel_matrix(const KernelFn& fn, const Matrix& X, int n_threads) {
  validate_data(X);
  return pairwise_matrix(
      X, [&](int i, int j) { return fn(X.col(i), X.col(j)); }, n_threads);
}

std::optional<double> lipschitz_constant(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::gaussian:
      return std::sqrt(2.0) / (std::exp(1.0) * spec.tau);
    case KernelKind::pair_dist:
      return 1.0;
    case KernelKind::product_threshold:
      return spec.L;
    case KernelKind::euclidean:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace ksc
