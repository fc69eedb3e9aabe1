#include <benchmark/benchmark.h>

#include <cmath>

#include "treetrace/boundary_norms.hpp"
#include "treetrace/hajlasz.hpp"
#include "treetrace/harness.hpp"
#include "treetrace/young.hpp"

using namespace treetrace;

namespace {

const double ln2 = std::log(2.0);

BoundaryFunction sample(int K, int N, std::uint64_t seed) {
  return boundary_sample(Family::iid_uniform, make_tree_params(K, ln2, 2 * ln2, 0.0, N), 0.5, seed);
}

void BM_DyadicEnergy(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, N);
  const auto f = sample(2, N, 1);
  const EnergyParams e{0.5, 2.0, 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(dyadic_energy(P, f, e));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_DyadicEnergy)->DenseRange(8, 16, 4);

void BM_OrliczBesovNorm(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, N);
  const auto f = sample(2, N, 2);
  const EnergyParams e{0.5, 2.0, 1.0, 0.0};
  const YoungPhi phi(2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(orlicz_besov_norm(P, f, e, phi));
}
BENCHMARK(BM_OrliczBesovNorm)->DenseRange(6, 12, 3);

void BM_DoubleIntegralExact(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, N);
  const auto f = sample(2, N, 3);
  for (auto _ : state) benchmark::DoNotOptimize(double_integral_energy(P, f, 0.5, 2.0).value);
}
BENCHMARK(BM_DoubleIntegralExact)->DenseRange(4, 7, 1);

void BM_HajlaszSolve(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const double p = static_cast<double>(state.range(1));
  const auto P = make_tree_params(2, ln2, 2 * ln2, 0.0, N);
  const auto inst = make_hajlasz_instance(P, sample(2, N, 4), 0.5, p);
  HajlaszSolverConfig cfg;
  cfg.relative_gap = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(hajlasz_energy(inst, cfg));
}
BENCHMARK(BM_HajlaszSolve)->ArgsProduct({{3, 4, 5}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_LuxemburgGauge(benchmark::State& state) {
  const YoungPhi phi(2.0, -1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(luxemburg_gauge([&](double k) { return 0.5 * phi(3.0 / k) + 0.5 * phi(0.01 / k); }));
  }
}
BENCHMARK(BM_LuxemburgGauge);

}  // namespace

BENCHMARK_MAIN();
