#include <benchmark/benchmark.h>

#include <cmath>

#include "ksc/diagnostics.hpp"
#include "ksc/kernels.hpp"
#include "ksc/mean_kernel.hpp"
#include "ksc/metrics.hpp"
#include "ksc/models.hpp"
#include "ksc/rng.hpp"
#include "ksc/spectral.hpp"

namespace {

using namespace ksc;

MixtureSample make_sample(int n, int d, std::uint64_t seed) {
  MixtureConfig cfg;
  cfg.radii = {1.0, 5.0, 10.0};
  cfg.sigma = 1.5;
  cfg.d = d;
  cfg.n = n;
  return sample_mixture(cfg, seed);
}

void BM_sample_mixture(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(make_sample(n, d, seed++).X);
}
BENCHMARK(BM_sample_mixture)->Args({500, 1000})->Args({500, 10000});

void BM_kernel_matrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const int threads = static_cast<int>(state.range(2));
  const auto data = make_sample(n, d, 2);
  const KernelSpec spec = KernelSpec::gaussian(std::sqrt(3.25));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernel_matrix(spec, data.X, threads));
}
BENCHMARK(BM_kernel_matrix)
    ->Args({200, 1000, 1})
    ->Args({200, 1000, 4})
    ->Args({500, 10000, 4});

void BM_truncated_evd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = make_sample(n, 100, 3);
  const Matrix A =
      normalize_kernel(kernel_matrix(KernelSpec::gaussian(1.8), data.X));
  for (auto _ : state) benchmark::DoNotOptimize(truncated_evd(A, 3));
}
BENCHMARK(BM_truncated_evd)->Arg(200)->Arg(500);

void BM_kmeans(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = make_sample(n, 50, 4);
  const Matrix A =
      normalize_kernel(kernel_matrix(KernelSpec::gaussian(1.8), data.X));
  const Matrix embedding = truncated_evd(A, 3).embedding;
  KMeansOptions opt;
  for (auto _ : state)
    benchmark::DoNotOptimize(kmeans(embedding, 3, opt, 5));
}
BENCHMARK(BM_kmeans)->Arg(500)->Arg(2000);

void BM_mean_gauss_isotropic(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(6);
  const Vector u = 2.0 * sample_unit_sphere(d, rng);
  const Vector v = 5.0 * sample_unit_sphere(d, rng);
  MeanKernelParams p;
  p.tau = 1.8;
  p.sigma = 1.5;
  p.d = d;
  for (auto _ : state)
    benchmark::DoNotOptimize(mean_gauss_isotropic(u, v, 1.5, 1.5, p));
}
BENCHMARK(BM_mean_gauss_isotropic)->Arg(1000)->Arg(10000);

void BM_mean_gauss_radial(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(7);
  const Vector u = 2.0 * sample_unit_sphere(d, rng);
  const Vector v = 5.0 * sample_unit_sphere(d, rng);
  MeanKernelParams p;
  p.tau = 1.8;
  p.sigma = 1.5;
  p.d = d;
  for (auto _ : state)
    benchmark::DoNotOptimize(mean_gauss_radial(u, v, p));
}
BENCHMARK(BM_mean_gauss_radial)->Arg(1000)->Arg(10000);

void BM_psi_d(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(psi_d(2.0, d));
}
BENCHMARK(BM_psi_d)->Arg(10)->Arg(200);

void BM_operator_norm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto data = make_sample(n, 100, 8);
  const Matrix K = kernel_matrix(KernelSpec::gaussian(1.8), data.X);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(K));
}
BENCHMARK(BM_operator_norm)->Arg(200)->Arg(500);

void BM_misclassification_rate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(9);
  std::vector<int> a(static_cast<std::size_t>(n)),
      b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(3));
    b[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(3));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(misclassification_rate(a, b, 3));
}
BENCHMARK(BM_misclassification_rate)->Arg(10000);

void BM_nmi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(10);
  std::vector<int> a(static_cast<std::size_t>(n)),
      b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(3));
    b[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(3));
  }
  for (auto _ : state) benchmark::DoNotOptimize(nmi(a, b, 3));
}
BENCHMARK(BM_nmi)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
