#pragma once

#include "ksc/rng.hpp"
#include "ksc/types.hpp"

namespace ksc::test {

inline Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Matrix X(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) X(i, j) = scale * rng.normal();
  return X;
}

inline Vector random_vector(int d, Rng& rng, double scale = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace ksc::test
