// Copyright 2026 The Birdsong Authors. All Rights Reserved.
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

#include <random>

#include "birdsong/dsp.hpp"
#include "birdsong/fixtures.hpp"
#include "birdsong/mfcc.hpp"
#include "birdsong/nn.hpp"

namespace birdsong {
namespace {

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  FftPlan plan(n);
  for (auto _ : state) benchmark::DoNotOptimize(plan.forward(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oNLogN);

void BM_MfccFifteenSecondClip(benchmark::State& state) {
  const AudioClip clip = synthesize_clip(0, 1);
  const MfccExtractor extractor(FeatureConfig{}, clip.sample_rate_hz);
  for (auto _ : state) benchmark::DoNotOptimize(clip_features(clip, extractor));
}
BENCHMARK(BM_MfccFifteenSecondClip)->Unit(benchmark::kMillisecond);

void BM_Inference(benchmark::State& state) {
  Rng rng(2);
  const Network net = Network::initialize(ModelConfig{}, rng);
  std::vector<double> x(80, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(infer(net, x));
}
BENCHMARK(BM_Inference);

void BM_TrainStep(benchmark::State& state) {
  Rng rng(3);
  Network net = Network::initialize(ModelConfig{}, rng);
  AdamState adam = AdamState::for_network(net);
  std::vector<double> x(80, 0.1);
  ForwardCache cache;
  for (auto _ : state) {
    forward_train(net, x, rng, cache);
    adam_step(adam, net, backward(net, cache, 0));
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace
}  // namespace birdsong

BENCHMARK_MAIN();
