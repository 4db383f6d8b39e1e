// Serial reference vs OpenMP kernels on scene-sized inputs.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bloombench/kernels.hpp"

namespace k = bloombench::kernels;

namespace {

constexpr float kNodata = -9999.0f;

std::vector<float> band(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> v(0.0f, 0.5f);
  std::vector<float> out(n);
  for (auto& x : out) x = v(rng);
  out[n / 2] = kNodata;
  return out;
}

std::vector<std::uint8_t> mask(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = bit(rng) ? 1 : 0;
  return out;
}

template <auto Fn>
void BM_NormalizedDifference(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = band(side * side, 1);
  const auto b = band(side * side, 2);
  std::vector<float> out(side * side);
  for (auto _ : state) {
    Fn(a, b, kNodata, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

template <auto Fn>
void BM_ValidRange(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = band(side * side, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, kNodata));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

template <auto Fn>
void BM_Morphology(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto radius = static_cast<std::size_t>(state.range(1));
  const auto in = mask(side * side, 0.4, 4);
  std::vector<std::uint8_t> out(side * side);
  for (auto _ : state) {
    Fn(in, side, side, radius, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

template <auto Fn>
void BM_Overlap(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto a = mask(side * side, 0.3, 5);
  const auto b = mask(side * side, 0.5, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

}  // namespace

BENCHMARK(BM_NormalizedDifference<k::serial::normalized_difference>)->Name("ndci/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_NormalizedDifference<k::omp::normalized_difference>)->Name("ndci/omp")->Arg(256)->Arg(1024)->UseRealTime();
BENCHMARK(BM_ValidRange<k::serial::valid_range>)->Name("valid_range/serial")->Arg(1024);
BENCHMARK(BM_ValidRange<k::omp::valid_range>)->Name("valid_range/omp")->Arg(1024)->UseRealTime();
BENCHMARK(BM_Morphology<k::serial::dilate>)->Name("dilate/serial")->Args({256, 1})->Args({256, 4});
BENCHMARK(BM_Morphology<k::omp::dilate>)->Name("dilate/omp")->Args({256, 1})->Args({256, 4})->Args({1024, 4})->UseRealTime();
BENCHMARK(BM_Morphology<k::serial::erode>)->Name("erode/serial")->Args({256, 1})->Args({256, 4});
BENCHMARK(BM_Morphology<k::omp::erode>)->Name("erode/omp")->Args({256, 1})->Args({256, 4})->Args({1024, 4})->UseRealTime();
BENCHMARK(BM_Overlap<k::serial::overlap>)->Name("overlap/serial")->Arg(1024);
BENCHMARK(BM_Overlap<k::omp::overlap>)->Name("overlap/omp")->Arg(1024)->UseRealTime();

BENCHMARK_MAIN();
