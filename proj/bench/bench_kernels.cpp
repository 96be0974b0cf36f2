// Serial reference kernels against the tree/OpenMP paths.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mped/baselines.hpp"
#include "mped/energy.hpp"
#include "mped/knn.hpp"
#include "mped/parallel.hpp"

namespace {

mped::PointCloud cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<mped::Vec3> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return mped::PointCloud(std::move(pts));
}

void BM_knn_tree(benchmark::State& state) {
  const auto ref = cloud(state.range(0), 1);
  const auto q = cloud(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mped::knn_search(q.positions(), ref, 10, 2));
  state.SetComplexityN(state.range(0));
}

void BM_knn_brute(benchmark::State& state) {
  const auto ref = cloud(state.range(0), 1);
  const auto q = cloud(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(mped::reference::knn_search(q.positions(), ref, 10, 2));
  state.SetComplexityN(state.range(0));
}

void BM_mped_reference(benchmark::State& state) {
  const auto x = cloud(state.range(0), 3);
  const auto y = cloud(state.range(0), 4);
  const auto cfg = mped::machine_preset();
  for (auto _ : state) benchmark::DoNotOptimize(mped::reference::mped(x, y, cfg));
}

// range(1) is the thread cap; 0 keeps the runtime default.
void BM_mped(benchmark::State& state) {
  const auto x = cloud(state.range(0), 3);
  const auto y = cloud(state.range(0), 4);
  const auto cfg = mped::machine_preset();
  const int saved = mped::parallel::max_threads();
  if (state.range(1) > 0) mped::parallel::set_max_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mped::mped(x, y, cfg));
  mped::parallel::set_max_threads(saved);
}

void BM_emd_exact(benchmark::State& state) {
  const auto x = cloud(state.range(0), 5);
  const auto y = cloud(state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(mped::emd_exact(x, y));
}

}  // namespace

BENCHMARK(BM_knn_tree)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK(BM_knn_brute)->RangeMultiplier(4)->Range(256, 4096)->Complexity();
BENCHMARK(BM_mped_reference)->Arg(512)->Arg(2048);
BENCHMARK(BM_mped)->Args({512, 1})->Args({512, 0})->Args({2048, 1})->Args({2048, 0})->Args({100000, 1})->Args({100000, 0});
BENCHMARK(BM_emd_exact)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
