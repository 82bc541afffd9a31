// Copyright 2026 The pdw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "pdw/attack.hpp"
#include "pdw/denoiser.hpp"
#include "pdw/embedding.hpp"
#include "pdw/fft.hpp"
#include "pdw/losses.hpp"
#include "pdw/noise.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  return pdw::generate_white_noise(n, seed).samples;
}

void BM_Dft(benchmark::State& state) {
  const std::vector<double> x = noise(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pdw::dft(x));
}
BENCHMARK(BM_Dft)->Arg(1024)->Arg(16000)->Arg(16384)->Arg(48000);

void BM_MultiResStftLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> y = noise(n, 2), yhat = noise(n, 3);
  const pdw::MultiResConfig config = pdw::MultiResConfig::standard();
  for (auto _ : state) benchmark::DoNotOptimize(pdw::multi_res_stft_loss(y, yhat, config));
}
BENCHMARK(BM_MultiResStftLoss)->Arg(8192)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_PerceptualDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> y = noise(n, 4), yhat = noise(n, 5);
  const pdw::PerceptualEmbedding embedding = pdw::PerceptualEmbedding::from_seed(6);
  for (auto _ : state) benchmark::DoNotOptimize(pdw::perceptual_distance(y, yhat, embedding));
}
BENCHMARK(BM_PerceptualDistance)->Arg(8192)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_DenoiserForward(benchmark::State& state) {
  const pdw::DenoiserModel model = pdw::init_model(7);
  const pdw::AudioBuffer x(noise(static_cast<std::size_t>(state.range(0)), 8));
  for (auto _ : state) benchmark::DoNotOptimize(pdw::forward(model, x));
}
BENCHMARK(BM_DenoiserForward)->Arg(8192)->Arg(32000)->Unit(benchmark::kMillisecond);

void BM_DenoiserBackward(benchmark::State& state) {
  const pdw::DenoiserModel model = pdw::init_model(9);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x = noise(n, 10), grad = noise(n, 11);
  for (auto _ : state) {
    const pdw::ForwardTrace trace = pdw::forward_trace(model, x);
    benchmark::DoNotOptimize(pdw::backward(model, trace, grad));
  }
}
BENCHMARK(BM_DenoiserBackward)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_KenansvilleAttack(benchmark::State& state) {
  const pdw::AudioBuffer x(noise(static_cast<std::size_t>(state.range(0)), 12));
  for (auto _ : state) benchmark::DoNotOptimize(pdw::kenansville_attack(x, {20.0}));
}
BENCHMARK(BM_KenansvilleAttack)->Arg(16000)->Arg(48000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
