#pragma once

#include <cstdint>
#include <vector>

#include "ksc/kernels.hpp"
#include "ksc/types.hpp"

namespace ksc {

struct TruncatedEVD {
  Vector eigenvalues;   // length R, sorted by |lambda| descending
  Matrix eigenvectors;  // n x R, orthonormal columns
  Matrix embedding;     // eigenvectors * diag(eigenvalues)

  Matrix reconstruction() const;  // U diag(lambda) U^T
};

// A = K / n
Matrix normalize_kernel(const Matrix& K);

// Dense symmetric EVD truncated to the R eigenvalues largest in magnitude.
// Magnitude ties keep the more positive eigenvalue first.
TruncatedEVD truncated_evd(const Matrix& A, int R);

struct KMeansOptions {
  int n_restarts = 20;
  int max_iters = 300;
  double tol = 1e-10;  // max center movement declaring convergence
  int n_threads = 1;
};

struct ClusterResult {
  std::vector<int> labels;
  Matrix centers;  // R x m, one row per cluster
  double cost = 0.0;
  int restarts_used = 0;
  std::uint64_t seed = 0;
};

// Lloyd iterations from D^2-weighted seeding, best of n_restarts runs.
// Rows of points are the observations. An emptied cluster is reseeded with
// the point farthest from its current center. Restarts use independent
// substreams of seed; ties in cost keep the lowest restart index.
ClusterResult kmeans(const Matrix& points, int R, const KMeansOptions& opt,
                     std::uint64_t seed);

// kernel matrix -> /n -> truncated EVD -> k-means on the embedding rows
ClusterResult ksc(const Matrix& X, const KernelSpec& spec, int R,
                  const KMeansOptions& opt, std::uint64_t seed,
                  int n_threads = 1);

}  // namespace ksc
