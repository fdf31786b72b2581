// Copyright 2026 The Groundit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "groundit/backbone_adapter.h"
#include "groundit/mask_codec.h"
#include "groundit/random.h"
#include "groundit/span_decoder.h"

namespace groundit {
namespace {

ProbVector RandomProbs(std::size_t n, Rng& rng) {
  std::vector<double> logits = GaussianVector(n, 1.0, rng);
  return Softmax(logits);
}

void BM_DecodeSpan(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const ProbVector ps = RandomProbs(n, rng), pe = RandomProbs(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(DecodeSpan(ps, pe));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DecodeSpan)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

MaskGrid NoisyGrid(int side, Rng& rng) {
  MaskGrid grid(side, side);
  std::bernoulli_distribution bit(0.3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) grid.at(x, y) = bit(rng) ? 1 : 0;
  }
  return grid;
}

void BM_RleEncode(benchmark::State& state) {
  Rng rng(2);
  const MaskGrid grid = NoisyGrid(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(RleEncode(grid));
}
BENCHMARK(BM_RleEncode)->Arg(64)->Arg(256);

void BM_UnionMask(benchmark::State& state) {
  Rng rng(3);
  const int side = static_cast<int>(state.range(0));
  const std::vector<BinaryMask> masks = {RleEncode(NoisyGrid(side, rng)),
                                         RleEncode(NoisyGrid(side, rng)),
                                         RleEncode(NoisyGrid(side, rng))};
  for (auto _ : state) benchmark::DoNotOptimize(UnionMask(masks));
}
BENCHMARK(BM_UnionMask)->Arg(64)->Arg(256);

void BM_ForwardBackbone(benchmark::State& state) {
  Rng rng(4);
  const std::size_t dim = 64;
  const auto stub = BackboneStub::Seeded(dim, 5);
  const auto tokens = GaussianMatrix(static_cast<std::size_t>(state.range(0)), dim, 1.0, rng);
  BackboneAdapters adapters;
  adapters[kFinalLayer] = LoraAdapter{GaussianMatrix(dim, 8, 0.1, rng),
                                      GaussianMatrix(8, dim, 0.1, rng), 16.0};
  for (auto _ : state) benchmark::DoNotOptimize(ForwardBackbone(tokens, stub, adapters));
}
BENCHMARK(BM_ForwardBackbone)->Arg(128)->Arg(512);

}  // namespace
}  // namespace groundit

BENCHMARK_MAIN();
