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

#include "dmd/imaging.hpp"
#include "dmd/random.hpp"
#include "dmd/verify/generators.hpp"

namespace {

void BM_Ssim(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  dmd::Rng rng(5);
  const auto a = dmd::verify::gen::tensor(rng, 3, side, side, 0.0, 1.0);
  const auto b = dmd::verify::gen::tensor(rng, 3, side, side, 0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::imaging::ssim(a, b));
  }
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);

void BM_Psnr(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  dmd::Rng rng(6);
  const auto a = dmd::verify::gen::tensor(rng, 3, side, side, 0.0, 1.0);
  const auto b = dmd::verify::gen::tensor(rng, 3, side, side, 0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dmd::imaging::psnr(a, b));
  }
}
BENCHMARK(BM_Psnr)->Arg(256);

}  // namespace
