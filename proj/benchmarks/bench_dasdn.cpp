#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "dasdn/denoiser.hpp"
#include "dasdn/grad.hpp"
#include "dasdn/linalg.hpp"
#include "dasdn/model.hpp"
#include "dasdn/stft.hpp"
#include "dasdn/synth.hpp"
#include "dasdn/tensor.hpp"
#include "dasdn/tucker.hpp"

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

dasdn::Tensor3 noise_tensor(dasdn::Dims3 dims, unsigned seed) {
  return dasdn::Tensor3(dims, noise(dims[0] * dims[1] * dims[2], seed));
}

// Standard-scene spectrogram size: 50 channels, 321 bins, 249 frames.
constexpr dasdn::Dims3 kScene{50, 321, 249};

void BM_Stft(benchmark::State& state) {
  const auto sig = dasdn::standard_scene(0).noisy;
  for (auto _ : state) benchmark::DoNotOptimize(dasdn::stft(sig));
}
BENCHMARK(BM_Stft)->Unit(benchmark::kMillisecond);

void BM_ModeMultiply(benchmark::State& state) {
  const int mode = static_cast<int>(state.range(0));
  const auto t = noise_tensor(kScene, 1);
  const std::size_t n = kScene[mode - 1];
  const dasdn::Matrix a(n, n, noise(n * n, 2));
  for (auto _ : state) benchmark::DoNotOptimize(dasdn::mode_multiply(t, a, mode));
}
BENCHMARK(BM_ModeMultiply)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_TruncatedSvd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const dasdn::Matrix m(n, 4 * n, noise(4 * n * n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(dasdn::truncated_svd(m, 1));
}
BENCHMARK(BM_TruncatedSvd)->Arg(50)->Arg(249)->Unit(benchmark::kMillisecond);

void BM_Hosvd(benchmark::State& state) {
  const auto t = noise_tensor(kScene, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dasdn::hosvd(t, {1, kScene[1], kScene[2]}));
}
BENCHMARK(BM_Hosvd)->Unit(benchmark::kMillisecond);

void BM_PredictorForwardBackward(benchmark::State& state) {
  const auto z = noise_tensor(kScene, 5);
  const std::size_t c = kScene[0];
  const auto w = noise(c * c * 9, 6);
  for (auto _ : state) {
    dasdn::grad::Tape tape;
    auto zv = tape.parameter({c, kScene[1], kScene[2]}, z.values());
    auto wv = tape.parameter({c, c, 3, 3}, w);
    auto bv = tape.parameter({c}, std::vector<double>(c, 0.0));
    auto out = dasdn::graph::predictor(zv, wv, bv);
    auto loss = dasdn::grad::sum(out);
    tape.backward(loss);
    benchmark::DoNotOptimize(wv.grad().data());
  }
}
BENCHMARK(BM_PredictorForwardBackward)->Unit(benchmark::kMillisecond);

void BM_DenoiseIterations(benchmark::State& state) {
  const auto t = noise_tensor(kScene, 7);
  std::vector<double> v(t.values());
  for (double& x : v) x = std::abs(x);
  const dasdn::Tensor3 mag(kScene, v);
  dasdn::DenoiseConfig cfg;
  cfg.ranks = dasdn::spatial_ranks(kScene, 1);
  cfg.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dasdn::denoise(mag, cfg));
}
BENCHMARK(BM_DenoiseIterations)->Arg(1)->Arg(5)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
