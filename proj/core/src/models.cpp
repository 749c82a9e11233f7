#include "ksc/models.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ksc/format.hpp"

namespace ksc {

std::vector<double> MixtureConfig::effective_priors() const {
  if (!priors.empty()) return priors;
  return std::vector<double>(radii.size(), 1.0 / static_cast<double>(radii.size()));
}

void MixtureConfig::validate() const {
  if (radii.empty()) throw std::invalid_argument("mixture needs >= 1 component");
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("radii must be positive and finite");
  for (std::size_t a = 0; a < radii.size(); ++a)
    for (std::size_t b = a + 1; b < radii.size(); ++b)
      if (radii[a] == radii[b])
        throw std::invalid_argument("radii must be distinct");
  if (!priors.empty()) {
    if (priors.size() != radii.size())
      throw std::invalid_argument("priors must match radii in length");
    double total = 0.0;
    for (double p : priors) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("priors must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("priors must sum to 1 within 1e-12");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be >= 0");
  if (noise_kind == NoiseKind::constant_diag) {
    if (static_cast<int>(diag_values.size()) != d)
      throw std::invalid_argument("diag_values must have length d");
    for (double v : diag_values)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("diag_values must be nonnegative");
  }
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
}

Vector sample_unit_sphere(int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_unit_sphere: d must be >= 1");
  Vector v(d);
  double norm2 = 0.0;
  do {
    for (int k = 0; k < d; ++k) v[k] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  return v / std::sqrt(norm2);
}

namespace {

int draw_label(const std::vector<double>& priors, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const int R = static_cast<int>(priors.size());
  for (int k = 0; k < R; ++k) {
    acc += priors[k];
    if (u < acc) return k;
  }
  return R - 1;
}

}  // namespace

MixtureSample sample_mixture(const MixtureConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const auto priors = cfg.effective_priors();
  const double scale = cfg.sigma / std::sqrt(static_cast<double>(cfg.d));

  MixtureSample out;
  out.seed = seed;
  out.X.resize(cfg.d, cfg.n);
  out.mu.resize(cfg.d, cfg.n);
  out.labels.resize(static_cast<std::size_t>(cfg.n));

  for (int i = 0; i < cfg.n; ++i) {
    const int z = draw_label(priors, rng);
    out.labels[static_cast<std::size_t>(i)] = z;
    const Vector theta = sample_unit_sphere(cfg.d, rng);
    out.mu.col(i) = cfg.radii[static_cast<std::size_t>(z)] * theta;
    if (cfg.sigma == 0.0) {
      out.X.col(i) = out.mu.col(i);
      continue;
    }
    switch (cfg.noise_kind) {
      case NoiseKind::isotropic: {
        Vector w(cfg.d);
        for (int k = 0; k < cfg.d; ++k) w[k] = rng.normal();
        out.X.col(i) = out.mu.col(i) + scale * w;
        break;
      }
      case NoiseKind::radial: {
        // rank-one noise along the sphere direction theta
        const double xi = rng.normal();
        out.X.col(i) = out.mu.col(i) + scale * xi * theta;
        break;
      }
      case NoiseKind::constant_diag: {
        Vector w(cfg.d);
        for (int k = 0; k < cfg.d; ++k)
          w[k] = std::sqrt(cfg.diag_values[static_cast<std::size_t>(k)]) *
                 rng.normal();
        out.X.col(i) = out.mu.col(i) + scale * w;
        break;
      }
    }
  }
  return out;
}

Vector sample_lc_uniform(const Vector& mu, const Matrix& sqrt_sigma,
                         double half_width, Rng& rng) {
  if (sqrt_sigma.rows() != mu.size() || sqrt_sigma.cols() != mu.size())
    throw std::invalid_argument("sample_lc_uniform: shape mismatch");
  if (!(half_width >= 0.0))
    throw std::invalid_argument("sample_lc_uniform: half_width must be >= 0");
  Vector w(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k)
    w[k] = rng.uniform(-half_width, half_width);
  return mu + sqrt_sigma * w;
}

void write_csv(const MixtureSample& sample, const std::string& path,
               bool include_mu) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const auto d = sample.X.rows();
  out << "label";
  for (Eigen::Index k = 0; k < d; ++k) out << ",x_" << k;
  if (include_mu)
    for (Eigen::Index k = 0; k < d; ++k) out << ",mu_" << k;
  out << "\n";
  for (Eigen::Index i = 0; i < sample.X.cols(); ++i) {
    out << sample.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < d; ++k)
      out << "," << fmt_double(sample.X(k, i));
    if (include_mu)
      for (Eigen::Index k = 0; k < d; ++k)
        out << "," << fmt_double(sample.mu(k, i));
    out << "\n";
  }
}

}  // namespace ksc
