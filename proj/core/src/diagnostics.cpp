#include "ksc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ksc/parallel.hpp"

namespace ksc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Eigen::Index> cluster_sizes(const std::vector<int>& labels, int R) {
  if (R < 1) throw std::invalid_argument("stats: R must be >= 1");
  std::vector<Eigen::Index> sizes(static_cast<std::size_t>(R), 0);
  for (int z : labels) {
    if (z < 0 || z >= R)
      throw std::invalid_argument("stats: label outside [0, R)");
    ++sizes[static_cast<std::size_t>(z)];
  }
  for (int k = 0; k < R; ++k)
    if (sizes[static_cast<std::size_t>(k)] == 0)
      throw std::invalid_argument("stats: empty cluster");
  return sizes;
}

// D, gamma2, gamma2_tilde, vbar2 from Psi, v2 and pi
void finalize_stats(ClusterStats& s) {
  const auto R = s.Psi.rows();
  s.D = Matrix::Zero(R, R);
  s.gamma2 = kInf;
  s.gamma2_tilde = kInf;
  for (Eigen::Index k = 0; k < R; ++k) {
    for (Eigen::Index l = 0; l < R; ++l) {
      if (k == l) continue;
      double acc = 0.0;
      for (Eigen::Index r = 0; r < R; ++r) {
        const double diff = s.Psi(k, r) - s.Psi(l, r);
        acc += s.pi[r] * diff * diff;
      }
      s.D(k, l) = acc;
      s.gamma2 = std::min(s.gamma2, acc);
      s.gamma2_tilde = std::min(s.gamma2_tilde, s.pi[l] * acc);
    }
  }
  s.vbar2 = 0.0;
  for (Eigen::Index k = 0; k < R; ++k)
    for (Eigen::Index l = 0; l < R; ++l)
      s.vbar2 += s.pi[k] * s.pi[l] * s.v2(k, l);
}

}  // namespace

double operator_norm(const Matrix& M) {
  if (M.rows() < 1 || M.cols() < 1)
    throw std::invalid_argument("operator_norm: empty matrix");
  if (!M.allFinite())
    throw std::invalid_argument("operator_norm: non-finite entries");
  if (M.rows() == M.cols()) {
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym == 0.0) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(M, Eigen::EigenvaluesOnly);
      return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  // general case via the Gram matrix of the smaller side
  const Matrix G = M.rows() <= M.cols()
                       ? Matrix(M * M.transpose())
                       : Matrix(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double lipschitz_bound(double L, double omega, double sigma_inf, int n,
                       double t, double c) {
  if (!(L >= 0.0) || !(omega >= 0.0) || !(sigma_inf >= 0.0) || n < 1 ||
      !(t >= 0.0) || !(c > 0.0))
    throw std::invalid_argument("lipschitz_bound: bad arguments");
  const double nn = static_cast<double>(n);
  return 2.0 * L * omega * sigma_inf * (nn / std::sqrt(c) + std::sqrt(nn) * t);
}

double euclidean_bound(double kappa, double sigma_inf, int n, int d,
                       double opnorm_M) {
  if (!(kappa >= 0.0) || !(sigma_inf >= 0.0) || n < 1 || d < 1 ||
      !(opnorm_M >= 0.0))
    throw std::invalid_argument("euclidean_bound: bad arguments");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  return kappa * kappa * sigma_inf * sigma_inf * (nn + std::sqrt(nn * dd)) +
         kappa * sigma_inf * std::sqrt(nn) * opnorm_M;
}

ClusterStats empirical_stats(const Matrix& mean_values,
                             const std::vector<int>& labels, int R) {
  const auto n = mean_values.rows();
  if (mean_values.cols() != n || n < 1)
    throw std::invalid_argument("empirical_stats: matrix must be square");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("empirical_stats: labels size mismatch");
  const auto sizes = cluster_sizes(labels, R);

  Matrix s1 = Matrix::Zero(R, R);
  Matrix s2 = Matrix::Zero(R, R);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int zi = labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = mean_values(i, j);
      const int zj = labels[static_cast<std::size_t>(j)];
      s1(zi, zj) += v;
      s2(zi, zj) += v * v;
    }
  }

  ClusterStats out;
  out.Psi.resize(R, R);
  out.v2.resize(R, R);
  out.pi.resize(R);
  const double nn = static_cast<double>(n);
  for (int k = 0; k < R; ++k)
    out.pi[k] = static_cast<double>(sizes[static_cast<std::size_t>(k)]) / nn;
  for (int k = 0; k < R; ++k) {
    for (int l = 0; l < R; ++l) {
      const double count =
          static_cast<double>(sizes[static_cast<std::size_t>(k)]) *
          static_cast<double>(sizes[static_cast<std::size_t>(l)]);
      const double mean = s1(k, l) / count;
      out.Psi(k, l) = mean;
      out.v2(k, l) = std::max(0.0, s2(k, l) / count - mean * mean);
    }
  }
  finalize_stats(out);
  return out;
}

ClusterStats empirical_stats(const MeanKernelFn& mean_kernel, const Matrix& mu,
                             const std::vector<int>& labels, int R,
                             int n_threads) {
  validate_data(mu);
  const auto n = mu.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("empirical_stats: labels size mismatch");
  Matrix M(n, n);
  parallel_for(n, n_threads, [&](std::int64_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = ii; j < n; ++j) {
      const double v = mean_kernel(mu.col(ii), mu.col(j));
      M(ii, j) = v;
      M(j, ii) = v;
    }
  });
  return empirical_stats(M, labels, R);
}

ClusterStats population_stats(const MeanKernelFn& mean_kernel,
                              const MixtureConfig& cfg, std::int64_t n_mc,
                              Rng& rng) {
  cfg.validate();
  if (n_mc < 10000)
    throw std::invalid_argument("population_stats: needs >= 10000 samples");
  const int R = cfg.components();

  ClusterStats out;
  out.Psi.resize(R, R);
  out.v2.resize(R, R);
  out.pi.resize(R);
  const auto priors = cfg.effective_priors();
  for (int k = 0; k < R; ++k) out.pi[k] = priors[static_cast<std::size_t>(k)];

  for (int k = 0; k < R; ++k) {
    for (int l = k; l < R; ++l) {
      double sum = 0.0, sum_sq = 0.0;
      for (std::int64_t s = 0; s < n_mc; ++s) {
        const Vector a = cfg.radii[static_cast<std::size_t>(k)] *
                         sample_unit_sphere(cfg.d, rng);
        const Vector b = cfg.radii[static_cast<std::size_t>(l)] *
                         sample_unit_sphere(cfg.d, rng);
        const double v = mean_kernel(a, b);
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / static_cast<double>(n_mc);
      const double var =
          std::max(0.0, sum_sq / static_cast<double>(n_mc) - mean * mean);
      out.Psi(k, l) = mean;
      out.Psi(l, k) = mean;
      out.v2(k, l) = var;
      out.v2(l, k) = var;
    }
  }
  finalize_stats(out);
  return out;
}

Matrix block_constant(const ClusterStats& stats,
                      const std::vector<int>& labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  const int R = static_cast<int>(stats.Psi.rows());
  Matrix K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int zi = labels[static_cast<std::size_t>(i)];
    if (zi < 0 || zi >= R)
      throw std::invalid_argument("block_constant: label outside [0, R)");
    for (Eigen::Index j = 0; j < n; ++j)
      K(i, j) = stats.Psi(zi, labels[static_cast<std::size_t>(j)]);
  }
  return K;
}

MisBound mis_bound(const ClusterStats& stats, double L, double sigma, int d,
                   int n, double t, double max_op_sigma, double kappa_kmeans) {
  if (!(L >= 0.0) || !(sigma >= 0.0) || d < 1 || n < 1 || !(t >= 0.0) ||
      !(max_op_sigma >= 0.0) || !(kappa_kmeans >= 0.0))
    throw std::invalid_argument("mis_bound: bad arguments");
  const int R = static_cast<int>(stats.Psi.rows());
  const double root = 1.0 + t / std::sqrt(static_cast<double>(n));
  const double noise = 4.0 * L * L * sigma * sigma /
                       static_cast<double>(d) * root * root * max_op_sigma;
  const double numer = noise + stats.vbar2;

  MisBound out;
  out.C1 = 4.0 * (1.0 + kappa_kmeans) * (1.0 + kappa_kmeans);
  out.F = stats.gamma2 > 0.0 ? 16.0 * R / stats.gamma2 * numer : kInf;
  out.F_tilde =
      stats.gamma2_tilde > 0.0 ? 16.0 * R / stats.gamma2_tilde * numer : kInf;
  out.valid = std::isfinite(out.F_tilde) && out.F_tilde <= 1.0 / out.C1;
  out.bound = out.C1 * out.F;
  return out;
}

BoundReport concentration_trial(const SamplerFn& sample_data,
                                const Matrix& mean_K, const KernelSpec& spec,
                                double omega, double sigma_inf, double t,
                                double c, std::uint64_t seed) {
  const auto L = lipschitz_constant(spec);
  if (!L)
    throw std::invalid_argument(
        "concentration_trial: kernel has no Lipschitz constant");
  Rng rng(seed);
  const Matrix X = sample_data(rng);
  if (X.cols() != mean_K.rows() || mean_K.rows() != mean_K.cols())
    throw std::invalid_argument("concentration_trial: shape mismatch");
  const auto n = static_cast<int>(X.cols());
  const Matrix K = kernel_matrix(spec, X);

  BoundReport rep;
  rep.t = t;
  rep.deviation = operator_norm(K - mean_K) / static_cast<double>(n);
  rep.bound = lipschitz_bound(*L, omega, sigma_inf, n, t, c) /
              static_cast<double>(n);
  rep.violated = rep.deviation > rep.bound;
  rep.context["n"] = static_cast<double>(n);
  rep.context["d"] = static_cast<double>(X.rows());
  rep.context["L"] = *L;
  rep.context["omega"] = omega;
  rep.context["sigma_inf"] = sigma_inf;
  rep.context["c"] = c;
  return rep;
}

BoundReport gaussian_concentration_trial(const Matrix& mu, double sigma,
                                         double tau, double t,
                                         std::uint64_t seed) {
  validate_data(mu);
  if (!(sigma >= 0.0) || !(tau > 0.0) || !(t >= 0.0))
    throw std::invalid_argument("gaussian_concentration_trial: bad arguments");
  const int d = static_cast<int>(mu.rows());
  const double scale = sigma / std::sqrt(static_cast<double>(d));
  const KernelSpec spec = KernelSpec::gaussian(tau);
  const Matrix mean_K =
      mean_kernel_matrix(spec, NoiseKind::isotropic, mu, sigma, tau,
                         MeanKernelMethod::closed_form);

  auto sampler = [&, scale](Rng& rng) {
    Matrix X(mu.rows(), mu.cols());
    for (Eigen::Index i = 0; i < mu.cols(); ++i)
      for (Eigen::Index k = 0; k < mu.rows(); ++k)
        X(k, i) = mu(k, i) + scale * rng.normal();
    return X;
  };

  // coverage level e^{-t^2} corresponds to sqrt(2) t in the c = 1/2 bound
  BoundReport rep = concentration_trial(sampler, mean_K, spec, 1.0, scale,
                                        std::sqrt(2.0) * t, 0.5, seed);
  rep.t = t;
  rep.context["sigma"] = sigma;
  rep.context["tau"] = tau;
  return rep;
}

BoundReport lower_bound_trial(double L, double sigma, int n,
                              std::uint64_t seed) {
  if (!(L > 0.0) || !(sigma > 0.0) || n < 1)
    throw std::invalid_argument("lower_bound_trial: bad arguments");
  const KernelSpec spec = KernelSpec::product_threshold(L, sigma);
  Rng rng(seed);
  Matrix X(1, n);
  for (int i = 0; i < n; ++i) X(0, i) = rng.uniform(-2.0 * sigma, 2.0 * sigma);
  const Matrix K = kernel_matrix(spec, X);
  // for uniform(-2 sigma, 2 sigma) data the mean matrix is alpha I with
  // alpha = E phi(X)^2 = 2 L sigma / 3; off-diagonal means vanish by symmetry
  const double alpha = 2.0 * L * sigma / 3.0;
  const Matrix mean_K = alpha * Matrix::Identity(n, n);

  BoundReport rep;
  rep.t = 0.0;
  rep.deviation = operator_norm(K - mean_K);
  rep.bound = L * sigma * static_cast<double>(n) / 8.0;
  rep.violated = rep.deviation > rep.bound;
  rep.context["n"] = static_cast<double>(n);
  rep.context["L"] = L;
  rep.context["sigma"] = sigma;
  rep.context["alpha"] = alpha;
  return rep;
}

VarianceReport variance_check(const KernelSpec& spec, const Vector& mu1,
                              const Vector& mu2, double sigma_inf,
                              std::int64_t n_mc, std::uint64_t seed) {
  const auto L = lipschitz_constant(spec);
  if (!L)
    throw std::invalid_argument("variance_check: kernel has no Lipschitz constant");
  if (mu1.size() != mu2.size())
    throw std::invalid_argument("variance_check: dimension mismatch");
  if (n_mc < 1000)
    throw std::invalid_argument("variance_check: needs >= 1000 samples");
  Rng rng(seed);
  const auto d = mu1.size();
  Vector x1(d), x2(d);
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  std::vector<double> values(static_cast<std::size_t>(n_mc));
  for (std::int64_t s = 0; s < n_mc; ++s) {
    for (Eigen::Index k = 0; k < d; ++k) x1[k] = mu1[k] + sigma_inf * rng.normal();
    for (Eigen::Index k = 0; k < d; ++k) x2[k] = mu2[k] + sigma_inf * rng.normal();
    const double v = eval_kernel(spec, x1, x2);
    values[static_cast<std::size_t>(s)] = v;
    s1 += v - values[0];
  }
  // accumulating shifted by the first value keeps constant inputs at
  // variance exactly zero
  const double mean = values[0] + s1 / static_cast<double>(n_mc);
  for (double v : values) {
    const double c = (v - mean) * (v - mean);
    s2 += c;
    s4 += c * c;
  }
  const double var = s2 / static_cast<double>(n_mc);
  const double m4 = s4 / static_cast<double>(n_mc);

  VarianceReport rep;
  rep.variance = var;
  // sampling error of a variance estimate: sqrt((m4 - var^2) / n)
  rep.std_error =
      std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(n_mc));
  rep.bound = 8.0 * (*L) * (*L) * sigma_inf * sigma_inf;
  rep.within_bound = var <= rep.bound + 4.0 * rep.std_error;
  rep.n_mc = n_mc;
  rep.seed = seed;
  return rep;
}

ChaosTailReport hw_chaos_trial(const Matrix& A, const Matrix& mu,
                               double sigma_inf, std::int64_t n_mc,
                               std::uint64_t seed) {
  const auto n = A.rows();
  if (A.cols() != n || n < 1)
    throw std::invalid_argument("hw_chaos_trial: A must be square");
  if (mu.cols() != n)
    throw std::invalid_argument("hw_chaos_trial: mu must have one column per row of A");
  if (n_mc < 1000)
    throw std::invalid_argument("hw_chaos_trial: needs >= 1000 samples");
  const auto d = mu.rows();

  ChaosTailReport rep;
  rep.n_mc = n_mc;
  rep.ez = ((mu.transpose() * mu).cwiseProduct(A)).sum() +
           sigma_inf * sigma_inf * static_cast<double>(d) * A.trace();
  const Matrix As = 0.5 * (A + A.transpose());
  rep.fro2_weighted = static_cast<double>(d) * A.squaredNorm();
  rep.cross_fro2 = (mu * As).squaredNorm();
  rep.op_A = operator_norm(A);

  Rng rng(seed);
  Matrix X(d, n);
  std::vector<double> devs(static_cast<std::size_t>(n_mc));
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t s = 0; s < n_mc; ++s) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k)
        X(k, i) = mu(k, i) + sigma_inf * rng.normal();
    const double z = ((X.transpose() * X).cwiseProduct(A)).sum();
    sum += z;
    sum_sq += z * z;
    devs[static_cast<std::size_t>(s)] = std::abs(z - rep.ez);
  }
  rep.mean_mc = sum / static_cast<double>(n_mc);
  rep.var_mc = std::max(
      0.0, sum_sq / static_cast<double>(n_mc) - rep.mean_mc * rep.mean_mc);

  std::sort(devs.begin(), devs.end());
  rep.v_fit = std::max(rep.var_mc, 1e-300);
  double c_fit = kInf;
  const std::size_t m = devs.size();
  for (std::size_t j = m / 2; j < m; ++j) {
    const double s = devs[j];
    if (s <= 0.0) continue;
    // midpoint-corrected empirical tail probability at this quantile
    const double tail =
        (static_cast<double>(m - j) - 0.5) / static_cast<double>(m);
    const double shape = std::min(s * s / rep.v_fit, s);
    c_fit = std::min(c_fit, -std::log(tail) / shape);
  }
  rep.c_fit = std::isfinite(c_fit) ? c_fit : 0.0;
  rep.envelope_ok = rep.c_fit > 0.0;
  return rep;
}

LowRankCheck low_rank_approx_check(const Matrix& A_recon, const Matrix& A,
                                   const Matrix& B, int R) {
  if (R < 1) throw std::invalid_argument("low_rank_approx_check: R must be >= 1");
  LowRankCheck out;
  out.lhs = (A_recon - B).squaredNorm();
  const double op = operator_norm(A - B);
  out.rhs = 8.0 * static_cast<double>(R) * op * op;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-10) + 1e-12;
  return out;
}

}  // namespace ksc
