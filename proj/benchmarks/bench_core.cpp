#include <benchmark/benchmark.h>

#include <vector>

#include "paretonas/genome.hpp"
#include "paretonas/network.hpp"
#include "paretonas/pareto.hpp"
#include "paretonas/rng.hpp"

using namespace paretonas;

namespace {

std::vector<ObjectiveVector> random_points(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ObjectiveVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(k);
    for (double& x : v) x = rng.uniform01();
    out.emplace_back(std::move(v));
  }
  return out;
}

// Points on a concave curve, so every one of them is non-dominated.
std::vector<ObjectiveVector> front_points(std::size_t n) {
  std::vector<ObjectiveVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    out.push_back(ObjectiveVector{x, 1.0 - x * x});
  }
  return out;
}

void BM_NonDominatedSort(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(non_dominated_sort(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NonDominatedSort)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_SelectHalf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = random_points(2 * n, 2, 2);
  std::vector<std::uint64_t> ids(2 * n);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(select_indices(pts, ids, n));
}
BENCHMARK(BM_SelectHalf)->Arg(32)->Arg(128)->Arg(512);

void BM_Hypervolume2d(benchmark::State& state) {
  const auto pts = front_points(static_cast<std::size_t>(state.range(0)));
  const ObjectiveVector ref{-0.1, -0.1};
  for (auto _ : state) benchmark::DoNotOptimize(hypervolume_2d(pts, ref));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hypervolume2d)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_NetworkCost(benchmark::State& state) {
  Rng rng(3);
  const Genome g = random_genome(rng, 5);
  const MacroConfig m = state.range(0) == 0 ? MacroConfig::cifar() : MacroConfig::imagenet();
  for (auto _ : state) benchmark::DoNotOptimize(network_cost(g, m));
}
BENCHMARK(BM_NetworkCost)->Arg(0)->Arg(1);

void BM_Mutate(benchmark::State& state) {
  Rng rng(4);
  Genome g = random_genome(rng, 5);
  for (auto _ : state) {
    g = mutate(g, 0.1, rng);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_Mutate);

void BM_Crossover(benchmark::State& state) {
  Rng rng(5);
  const Genome a = random_genome(rng, 5);
  const Genome b = random_genome(rng, 5);
  for (auto _ : state) benchmark::DoNotOptimize(crossover(a, b, 0.5, rng));
}
BENCHMARK(BM_Crossover);

void BM_Serialize(benchmark::State& state) {
  Rng rng(6);
  const Genome g = random_genome(rng, 5);
  for (auto _ : state) benchmark::DoNotOptimize(serialize(g));
}
BENCHMARK(BM_Serialize);

}  // namespace

BENCHMARK_MAIN();
