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
#include "dmd/verify/generators.hpp"

namespace {

dmd::scan::ProximityMap blobs(std::size_t side) {
  dmd::Rng rng(7);
  return dmd::verify::gen::proximity_map(rng, side, side, dmd::verify::gen::MapKind::kBlobs);
}

void BM_Partition(benchmark::State& state) {
  const auto p = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::scan::partition_regions(p, {}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.pixels()));
}
BENCHMARK(BM_Partition)->RangeMultiplier(2)->Range(16, 256);

void BM_Rscan(benchmark::State& state) {
  const auto p = blobs(static_cast<std::size_t>(state.range(0)));
  const auto regions = dmd::scan::partition_regions(p, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::scan::da_rscan(p, regions));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.pixels()));
}
BENCHMARK(BM_Rscan)->RangeMultiplier(2)->Range(16, 256);

void BM_Gscan(benchmark::State& state) {
  const auto p = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::scan::da_gscan(p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.pixels()));
}
BENCHMARK(BM_Gscan)->RangeMultiplier(2)->Range(16, 256);

}  // namespace
