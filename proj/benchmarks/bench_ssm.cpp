// Copyright 2026 The dmd Authors. All Rights Reserved.
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

#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"
#include "dmd/verify/generators.hpp"

namespace {

using dmd::Rng;
namespace gen = dmd::verify::gen;

// state.range(0) = sequence length, state.range(1) = d_inner
void BM_DsScan(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  const auto x = gen::sequence(rng, len, d);
  const auto depth = gen::sequence(rng, len, 2, 0.0, 1.0);
  const auto params = gen::ssm_params(rng, 8, d, 2);
  dmd::ssm::GammaMap gamma{std::vector<double>(len)};
  for (double& g : gamma.values) g = rng.uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::ssm::ds_scan(x, depth, gamma, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(len));
}
BENCHMARK(BM_DsScan)->Args({1024, 16})->Args({4096, 16})->Args({4096, 64});

void BM_DsMamba(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t kD = 16;
  Rng rng(2);
  const auto x = gen::tensor(rng, kD, side, side);
  const auto p = gen::proximity_map(rng, side, side, gen::MapKind::kBlobs);
  const auto regions = dmd::scan::partition_regions(p, {});
  dmd::ssm::DsMambaParams params;
  for (auto& b : params.branches) b = gen::ssm_params(rng, 4, kD, 2);
  const auto pe = dmd::ssm::spatial_positional_encoding(side, side, kD, 10000.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::ssm::ds_mamba_forward(x, p, regions, params, &pe));
  }
}
BENCHMARK(BM_DsMamba)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
