#include "ksc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ksc {

namespace {

Matrix confusion(const std::vector<int>& pred, const std::vector<int>& truth,
                 int R) {
  if (R < 1) throw std::invalid_argument("metrics: R must be >= 1");
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("metrics: label vectors must match and be nonempty");
  Matrix C = Matrix::Zero(R, R);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i];
    const int t = truth[i];
    if (p < 0 || p >= R || t < 0 || t >= R)
      throw std::invalid_argument("metrics: label outside [0, R)");
    C(p, t) += 1.0;
  }
  return C;
}

// minimum-cost assignment by shortest augmenting paths with potentials
std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] != 0)
      perm[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return perm;
}

}  // namespace

namespace detail {

std::vector<int> best_assignment(const Matrix& agreement) {
  if (agreement.rows() != agreement.cols() || agreement.rows() < 1)
    throw std::invalid_argument("best_assignment: square matrix required");
  const int R = static_cast<int>(agreement.rows());
  if (R <= 10) {
    std::vector<int> perm(static_cast<std::size_t>(R));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_score = -std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int k = 0; k < R; ++k)
        s += agreement(k, perm[static_cast<std::size_t>(k)]);
      if (s > best_score) {
        best_score = s;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  const Matrix cost = Matrix::Constant(R, R, agreement.maxCoeff()) - agreement;
  return min_cost_assignment(cost);
}

}  // namespace detail

double misclassification_rate(const std::vector<int>& pred,
                              const std::vector<int>& truth, int R) {
  const Matrix C = confusion(pred, truth, R);
  const auto perm = detail::best_assignment(C);
  double agree = 0.0;
  for (int k = 0; k < R; ++k) agree += C(k, perm[static_cast<std::size_t>(k)]);
  return 1.0 - agree / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, int R) {
  const Matrix C = confusion(pred, truth, R);
  const double n = static_cast<double>(pred.size());
  const Vector rows = C.rowwise().sum();
  const Vector cols = C.colwise().sum();

  auto entropy = [&](const Vector& counts) {
    double h = 0.0;
    for (Eigen::Index k = 0; k < counts.size(); ++k) {
      if (counts[k] <= 0.0) continue;
      const double q = counts[k] / n;
      h -= q * std::log(q);
    }
    return h;
  };

  const double hp = entropy(rows);
  const double ht = entropy(cols);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  if (hp == 0.0 || ht == 0.0) return 0.0;

  auto term = [&](Eigen::Index a, Eigen::Index b) {
    if (C(a, b) <= 0.0) return 0.0;
    const double joint = C(a, b) / n;
    return joint * std::log(joint * n * n / (rows[a] * cols[b]));
  };
  // transposed cells are paired so the sum is identical when the
  // arguments are swapped
  double mi = 0.0;
  for (Eigen::Index a = 0; a < C.rows(); ++a) mi += term(a, a);
  for (Eigen::Index a = 0; a < C.rows(); ++a)
    for (Eigen::Index b = a + 1; b < C.cols(); ++b)
      mi += term(a, b) + term(b, a);
  return std::clamp(mi / std::sqrt(hp * ht), 0.0, 1.0);
}

}  // namespace ksc
