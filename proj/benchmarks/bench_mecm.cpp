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

#include <vector>

#include "dmd/mecm.hpp"
#include "dmd/random.hpp"
#include "dmd/verify/generators.hpp"

namespace {

using dmd::Rng;
namespace gen = dmd::verify::gen;
namespace mecm = dmd::mecm;

void BM_ScRefine(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const auto x = gen::tensor(rng, 16, side, side);
  const auto bank = mecm::MemoryBank::random(16, 16, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mecm::sc_refine(x, bank, mecm::kDefaultRetrievalTopK));
  }
}
BENCHMARK(BM_ScRefine)->Arg(32)->Arg(64);

void BM_MecmForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const bool evolve = state.range(1) != 0;
  Rng rng(4);
  const auto x = gen::tensor(rng, 16, side, side);
  std::vector<mecm::ExpertParams> experts;
  for (std::size_t e = 0; e < mecm::kDefaultExperts; ++e) {
    experts.push_back(mecm::ExpertParams::random(16, mecm::kDefaultMemoryItems,
                                                 mecm::kDefaultRetrievalTopK, 10 + e));
  }
  const auto gate = mecm::GateParams::random(mecm::kDefaultExperts, 16, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mecm::mecm_forward(x, experts, gate, mecm::kDefaultSelectedExperts, evolve));
  }
}
BENCHMARK(BM_MecmForward)->Args({32, 0})->Args({64, 0})->Args({64, 1});

}  // namespace
