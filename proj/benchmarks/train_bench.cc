// Copyright 2026 The mtpref Authors.
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

#include "mtpref/random.h"
#include "mtpref/reward_model.h"

namespace mtpref {
namespace {

std::vector<FeaturizedPair> RandomPairs(std::size_t n, std::size_t dim) {
  Rng rng(3);
  std::vector<FeaturizedPair> out(n);
  for (FeaturizedPair& p : out) {
    p.chosen.resize(dim);
    p.rejected.resize(dim);
    for (double& x : p.chosen) x = UniformUnit(rng);
    for (double& x : p.rejected) x = UniformUnit(rng);
  }
  return out;
}

void BM_TrainEpoch(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const auto data = RandomPairs(1024, dim);
  FeaturizerSpec spec;
  spec.kind = FeaturizerKind::kHashedBagOfTokens;
  spec.dim = dim;
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrainOnFeatures(data, spec, cfg));
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_TrainEpoch)->Arg(8)->Arg(1024);

void BM_BtGrad(benchmark::State& state) {
  const auto data = RandomPairs(1, 1024);
  FeaturizerSpec spec;
  spec.dim = 1024;
  RewardModelParams p = ZeroParams(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BtGrad(data[0].chosen, data[0].rejected, p));
  }
}
BENCHMARK(BM_BtGrad);

}  // namespace
}  // namespace mtpref
