// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qsm/kernels.hpp"

using namespace qsm::kernels;

namespace {

void BM_ModeLogMeanSerial(benchmark::State& state) {
  const ModeTable table(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(serial::mode_log_mean(table, 0.3));
  state.SetItemsProcessed(state.iterations() * table.modes);
}

void BM_ModeLogMeanOmp(benchmark::State& state) {
  const ModeTable table(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(omp::mode_log_mean(table, 0.3));
  state.SetItemsProcessed(state.iterations() * table.modes);
}

std::vector<std::complex<double>> samples(int nodes) {
  std::vector<std::complex<double>> s(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double t = 2.0 * std::numbers::pi * j / nodes;
    s[j] = std::polar(1.0, std::sin(t));
  }
  return s;
}

void BM_FourierSerial(benchmark::State& state) {
  const auto s = samples(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::fourier_coefficients(s, 256));
}

void BM_FourierOmp(benchmark::State& state) {
  const auto s = samples(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(omp::fourier_coefficients(s, 256));
}

void BM_SphereSerial(benchmark::State& state) {
  const BondTable bonds(static_cast<int>(state.range(0)), 1);
  const qsm::numerics::RandomStream stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(serial::sphere_batches(bonds, {0.5, 0.5, 0.25, 2.0}, stream, 100'000, 10'000));
  state.SetItemsProcessed(state.iterations() * 100'000);
}

void BM_SphereOmp(benchmark::State& state) {
  const BondTable bonds(static_cast<int>(state.range(0)), 1);
  const qsm::numerics::RandomStream stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(omp::sphere_batches(bonds, {0.5, 0.5, 0.25, 2.0}, stream, 100'000, 10'000));
  state.SetItemsProcessed(state.iterations() * 100'000);
}

}  // namespace

BENCHMARK(BM_ModeLogMeanSerial)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModeLogMeanOmp)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierSerial)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FourierOmp)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SphereSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SphereOmp)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
