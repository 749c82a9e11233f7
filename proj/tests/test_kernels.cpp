#include <cmath>
#include <doctest.h>

#include "helpers.hpp"
#include "ksc/kernels.hpp"

using namespace ksc;

namespace {

// reference oracle: plain double loop over all ordered pairs
Matrix brute_force_matrix(const KernelSpec& spec, const Matrix& X) {
  const auto n = X.cols();
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K(i, j) = eval_kernel(spec, X.col(i), X.col(j));
  return K;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("eval_kernel closed-form examples") {
  Rng rng(11);
  const Vector x = test::random_vector(7, rng);

  CHECK(eval_kernel(KernelSpec::gaussian(0.37), x, x) == 1.0);
  CHECK(eval_kernel(KernelSpec::pair_dist(), vec2(0, 0), vec2(3, 4)) ==
        doctest::Approx(5.0).epsilon(1e-14));

  const Vector y = test::random_vector(7, rng);
  CHECK(eval_kernel(KernelSpec::euclidean(), x, y) ==
        doctest::Approx(x.dot(y)).epsilon(1e-14));

  // clamp feature at L = sigma = 1 saturates at +-1
  const KernelSpec pt = KernelSpec::product_threshold(1.0, 1.0);
  CHECK(eval_kernel(pt, vec1(2.0), vec1(-2.0)) == doctest::Approx(-1.0));
  CHECK(eval_kernel(pt, vec1(0.5), vec1(0.25)) == doctest::Approx(0.125));
}

TEST_CASE("eval_kernel input validation") {
  CHECK_THROWS_AS(eval_kernel(KernelSpec::gaussian(1.0), vec1(0.0), vec2(0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      eval_kernel(KernelSpec::product_threshold(1, 1), vec2(0, 0), vec2(0, 0)),
      std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::gaussian(0.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::gaussian(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::product_threshold(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::product_threshold(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("gaussian values lie in (0, 1] with unit diagonal") {
  Rng rng(21);
  const Matrix X = test::random_matrix(6, 30, rng, 2.0);
  const Matrix K = kernel_matrix(KernelSpec::gaussian(0.8), X);
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    CHECK(K(i, i) == 1.0);
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      CHECK(K(i, j) > 0.0);
      CHECK(K(i, j) <= 1.0);
    }
  }
}

TEST_CASE("kernel_matrix equals the double-loop oracle") {
  Rng rng(31);
  const Matrix X = test::random_matrix(5, 17, rng);
  for (const KernelSpec& spec :
       {KernelSpec::gaussian(1.3), KernelSpec::pair_dist(),
        KernelSpec::euclidean()}) {
    const Matrix K = kernel_matrix(spec, X);
    CHECK(test::bitwise_equal(K, brute_force_matrix(spec, X)));
    CHECK(test::bitwise_equal(K, K.transpose()));
  }
  const Matrix S = test::random_matrix(1, 23, rng, 1.5);
  const KernelSpec pt = KernelSpec::product_threshold(2.0, 0.9);
  CHECK(test::bitwise_equal(kernel_matrix(pt, S), brute_force_matrix(pt, S)));
}

TEST_CASE("kernel_matrix is identical across thread counts") {
  Rng rng(41);
  const Matrix X = test::random_matrix(8, 41, rng);
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  CHECK(test::bitwise_equal(kernel_matrix(spec, X, 1),
                            kernel_matrix(spec, X, 4)));
}

TEST_CASE("caller-supplied kernel functions") {
  Rng rng(51);
  const Matrix X = test::random_matrix(4, 12, rng);
  const KernelFn fn = [](const Vector& a, const Vector& b) {
    return (a - b).lpNorm<1>();
  };
  const Matrix K = kernel_matrix(fn, X, 2);
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j)
      CHECK(K(i, j) == doctest::Approx((X.col(i) - X.col(j)).lpNorm<1>()));
}

TEST_CASE("lipschitz_constant per kernel") {
  const double c = lipschitz_constant(KernelSpec::gaussian(1.0)).value();
  CHECK(c == doctest::Approx(std::sqrt(2.0) / std::exp(1.0)).epsilon(1e-15));
  CHECK(c == doctest::Approx(0.5203).epsilon(1e-4));
  CHECK(lipschitz_constant(KernelSpec::gaussian(2.0)).value() ==
        doctest::Approx(c / 2.0).epsilon(1e-15));
  CHECK(lipschitz_constant(KernelSpec::pair_dist()).value() == 1.0);
  CHECK(lipschitz_constant(KernelSpec::product_threshold(3.5, 0.7)).value() ==
        3.5);
  CHECK(!lipschitz_constant(KernelSpec::euclidean()).has_value());
}

TEST_CASE("lipschitz property on random argument pairs") {
  Rng rng(61);
  const std::vector<KernelSpec> specs = {KernelSpec::gaussian(0.9),
                                         KernelSpec::pair_dist(),
                                         KernelSpec::product_threshold(2.0, 1.1)};
  for (const auto& spec : specs) {
    const int d = spec.kind == KernelKind::product_threshold ? 1 : 8;
    const double L = lipschitz_constant(spec).value();
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x1 = test::random_vector(d, rng, 2.0);
      const Vector x2 = test::random_vector(d, rng, 2.0);
      const Vector y1 = x1 + test::random_vector(d, rng, 0.5);
      const Vector y2 = x2 + test::random_vector(d, rng, 0.5);
      const double lhs =
          std::abs(eval_kernel(spec, x1, x2) - eval_kernel(spec, y1, y2));
      const double rhs = L * ((x1 - y1).norm() + (x2 - y2).norm());
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("matrix-level perturbation inequality") {
  // |K(X) - K(Y)|_F <= 2 sqrt(n) L |X - Y|_F for Lipschitz kernels
  Rng rng(71);
  const int n = 20, d = 10;
  for (const auto& spec : {KernelSpec::gaussian(1.0), KernelSpec::pair_dist()}) {
    const double L = lipschitz_constant(spec).value();
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix X = test::random_matrix(d, n, rng);
      const Matrix Y = X + test::random_matrix(d, n, rng, 0.3);
      const double lhs =
          (kernel_matrix(spec, X) - kernel_matrix(spec, Y)).norm();
      const double rhs = 2.0 * std::sqrt(static_cast<double>(n)) * L *
                         (X - Y).norm();
      CHECK(lhs <= rhs + 1e-12);
    }
  }
}

TEST_CASE("validate_data") {
  Matrix X = Matrix::Zero(2, 3);
  CHECK_NOTHROW(validate_data(X));
  X(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_data(X), std::invalid_argument);
  CHECK_THROWS_AS(validate_data(Matrix(0, 0)), std::invalid_argument);
}

TEST_SUITE_END();
