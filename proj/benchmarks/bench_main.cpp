#include <benchmark/benchmark.h>

#include "spectral_limits/graph.hpp"
#include "spectral_limits/regularity.hpp"
#include "spectral_limits/sampling.hpp"
#include "spectral_limits/spectral.hpp"

using namespace spectral_limits;

namespace {

PointCloud circle_cloud(std::size_t n) {
  return sample_dataset(ManifoldModel::circle(1.0), DensitySpec::uniform(), n, 1);
}

PointCloud sphere_cloud(std::size_t n) {
  return sample_dataset(ManifoldModel::sphere(2, 1.0), DensitySpec::uniform(), n, 1);
}

void BM_BuildEdgesSphere(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cloud = sphere_cloud(n);
  const double eps = epsilon_schedule(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(build_edges(cloud, DistanceMetric::embedded, eps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildEdgesSphere)->Arg(1000)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_LanczosCircle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gamma_N_eps(circle_cloud(n), epsilon_schedule(n, 1));
  EigenOptions opts;
  opts.solver = SolverChoice::lanczos;
  for (auto _ : state) benchmark::DoNotOptimize(eigen_decompose(g, 6, 1e-10, opts));
}
BENCHMARK(BM_LanczosCircle)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_DenseCircle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gamma_N_eps(circle_cloud(n), epsilon_schedule(n, 1));
  EigenOptions opts;
  opts.solver = SolverChoice::dense;
  for (auto _ : state) benchmark::DoNotOptimize(eigen_decompose(g, 6, 1e-10, opts));
}
BENCHMARK(BM_DenseCircle)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DoublingCircle(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = gamma_N_eps(circle_cloud(n), epsilon_schedule(n, 1));
  CenterSample centers;
  centers.count = 32;
  for (auto _ : state) benchmark::DoNotOptimize(doubling_constant(g, centers));
}
BENCHMARK(BM_DoublingCircle)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
