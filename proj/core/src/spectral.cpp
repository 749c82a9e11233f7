#include "ksc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ksc/parallel.hpp"
#include "ksc/rng.hpp"

namespace ksc {

Matrix TruncatedEVD::reconstruction() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Matrix normalize_kernel(const Matrix& K) {
  if (K.rows() != K.cols() || K.rows() < 1)
    throw std::invalid_argument("normalize_kernel: K must be square");
  return K / static_cast<double>(K.rows());
}

TruncatedEVD truncated_evd(const Matrix& A, int R) {
  const auto n = A.rows();
  if (A.cols() != n || n < 1)
    throw std::invalid_argument("truncated_evd: matrix must be square");
  if (R < 1 || R > n)
    throw std::invalid_argument("truncated_evd: R out of range");
  if (!A.allFinite())
    throw std::invalid_argument("truncated_evd: non-finite entries");
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8)
    throw std::invalid_argument("truncated_evd: matrix is not symmetric");

  const Matrix S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("truncated_evd: eigensolver failed");
  const Vector& vals = solver.eigenvalues();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(vals[a]);
    const double mb = std::abs(vals[b]);
    if (ma != mb) return ma > mb;
    return vals[a] > vals[b];
  });

  TruncatedEVD out;
  out.eigenvalues.resize(R);
  out.eigenvectors.resize(n, R);
  for (int r = 0; r < R; ++r) {
    out.eigenvalues[r] = vals[order[static_cast<std::size_t>(r)]];
    out.eigenvectors.col(r) =
        solver.eigenvectors().col(order[static_cast<std::size_t>(r)]);
  }
  out.embedding = out.eigenvectors * out.eigenvalues.asDiagonal();
  return out;
}

namespace {

struct LloydRun {
  std::vector<int> labels;
  Matrix centers;
  double cost = std::numeric_limits<double>::infinity();
};

int nearest_center(const Matrix& points, const Matrix& centers,
                   Eigen::Index i) {
  int best = 0;
  double best_d = (points.row(i) - centers.row(0)).squaredNorm();
  for (Eigen::Index k = 1; k < centers.rows(); ++k) {
    const double d = (points.row(i) - centers.row(k)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

Matrix seed_centers(const Matrix& points, int R, Rng& rng) {
  const auto n = points.rows();
  Matrix centers(R, points.cols());
  std::vector<double> dist2(static_cast<std::size_t>(n));
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.uniform_index(
      static_cast<std::uint64_t>(n))));
  for (int k = 1; k < R; ++k) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c)
        best = std::min(best, (points.row(i) - centers.row(c)).squaredNorm());
      dist2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2[static_cast<std::size_t>(i)];
        if (r < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(
          rng.uniform_index(static_cast<std::uint64_t>(n)));
    }
    centers.row(k) = points.row(pick);
  }
  return centers;
}

LloydRun lloyd(const Matrix& points, int R, const KMeansOptions& opt,
               std::uint64_t restart_seed) {
  const auto n = points.rows();
  Rng rng(restart_seed);
  LloydRun run;
  run.centers = seed_centers(points, R, rng);
  run.labels.assign(static_cast<std::size_t>(n), 0);

  Matrix new_centers(R, points.cols());
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(R));

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i)
      run.labels[static_cast<std::size_t>(i)] =
          nearest_center(points, run.centers, i);

    new_centers.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)]);
      new_centers.row(static_cast<Eigen::Index>(k)) += points.row(i);
      ++counts[k];
    }
    for (int k = 0; k < R; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) {
        new_centers.row(k) /=
            static_cast<double>(counts[static_cast<std::size_t>(k)]);
      } else {
        // reseed an emptied cluster with the point farthest from its
        // current center; lowest index wins distance ties
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto c = run.labels[static_cast<std::size_t>(i)];
          const double d = (points.row(i) - run.centers.row(c)).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        new_centers.row(k) = points.row(far);
      }
    }

    const double moved =
        (new_centers - run.centers).rowwise().norm().maxCoeff();
    run.centers = new_centers;
    if (moved < opt.tol) break;
  }

  run.cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    run.labels[static_cast<std::size_t>(i)] =
        nearest_center(points, run.centers, i);
    run.cost += (points.row(i) -
                 run.centers.row(run.labels[static_cast<std::size_t>(i)]))
                    .squaredNorm();
  }
  return run;
}

}  // namespace

ClusterResult kmeans(const Matrix& points, int R, const KMeansOptions& opt,
                     std::uint64_t seed) {
  const auto n = points.rows();
  if (n < 1) throw std::invalid_argument("kmeans: empty input");
  if (R < 1 || R > n) throw std::invalid_argument("kmeans: R out of range");
  if (!points.allFinite())
    throw std::invalid_argument("kmeans: non-finite entries");
  if (opt.n_restarts < 1 || opt.max_iters < 1)
    throw std::invalid_argument("kmeans: bad options");

  std::vector<LloydRun> runs(static_cast<std::size_t>(opt.n_restarts));
  parallel_for(opt.n_restarts, opt.n_threads, [&](std::int64_t r) {
    runs[static_cast<std::size_t>(r)] =
        lloyd(points, R, opt, Rng::mix(seed, static_cast<std::uint64_t>(r)));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].cost < runs[best].cost) best = r;

  ClusterResult out;
  out.labels = std::move(runs[best].labels);
  out.centers = std::move(runs[best].centers);
  out.cost = runs[best].cost;
  out.restarts_used = opt.n_restarts;
  out.seed = seed;
  return out;
}

ClusterResult ksc(const Matrix& X, const KernelSpec& spec, int R,
                  const KMeansOptions& opt, std::uint64_t seed,
                  int n_threads) {
  validate_data(X);
  const Matrix K = kernel_matrix(spec, X, n_threads);
  const Matrix A = normalize_kernel(K);
  const TruncatedEVD evd = truncated_evd(A, R);
  return kmeans(evd.embedding, R, opt, seed);
}

}  // namespace ksc
