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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dmd/error.hpp"
#include "dmd/mecm.hpp"
#include "dmd/random.hpp"
#include "dmd/verify/generators.hpp"
#include "dmd/verify/oracles.hpp"

namespace dmd::mecm {
namespace {

constexpr double kE = 2.718281828459045;

MemoryBank identity_bank(std::size_t n) {
  MemoryBank b{Matrix(n, n), kDefaultUpdateRate};
  for (std::size_t i = 0; i < n; ++i) b.items(i, i) = 1.0;
  return b;
}

LinearMap zero_map(std::size_t out, std::size_t in) {
  return LinearMap{Matrix(out, in), std::vector<double>(out, 0.0)};
}

Tensor3 pixel_image(std::vector<double> values) {
  const std::size_t c = values.size();
  return Tensor3(c, 1, 1, std::move(values));
}

GateParams gate_with_logits(std::vector<double> logits, std::size_t channels) {
  GateParams g{Matrix(logits.size(), channels), std::move(logits)};
  return g;
}

TEST(GateRoute, SingleExpert) {
  const auto r = gate_route(Tensor3(2, 2, 2, 0.3), gate_with_logits({0.7}, 2), 1, 1);
  EXPECT_EQ(r.selected, std::vector<std::size_t>{0});
  EXPECT_EQ(r.weights, std::vector<double>{1.0});
}

TEST(GateRoute, TopTwoOfFour) {
  const auto r = gate_route(Tensor3(1, 2, 2, 1.0), gate_with_logits({2, 1, 0, -1}, 1), 4, 2);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(r.weights[0], 0.7311, 1e-4);
  EXPECT_NEAR(r.weights[1], 0.2689, 1e-4);
  EXPECT_NEAR(std::accumulate(r.full_weights.begin(), r.full_weights.end(), 0.0), 1.0, 1e-12);
}

TEST(GateRoute, TiesPreferLowerIndex) {
  const auto r = gate_route(Tensor3(1, 1, 1, 0.0), gate_with_logits({1, 3, 3, 1}, 1), 4, 3);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{1, 2, 0}));
}

TEST(GateRoute, RejectsBadK) {
  const auto g = gate_with_logits({1, 2}, 1);
  EXPECT_THROW(gate_route(Tensor3(1, 1, 1), g, 2, 3), ValidationError);
  EXPECT_THROW(gate_route(Tensor3(1, 1, 1), g, 2, 0), ValidationError);
  EXPECT_THROW(gate_route(Tensor3(1, 1, 1), g, 3, 1), ValidationError);
}

TEST(GpAdjust, SingleItemAndSingletonBatch) {
  MemoryBank bank{Matrix(1, 2, std::vector<double>{0.6, 0.8}), 0.5};
  const std::vector<Tensor3> batch{pixel_image({3.0, -1.0})};
  const auto gp = gp_adjust(batch, bank, zero_map(2, 4));
  EXPECT_EQ(gp.match_image(0, 0), 1.0);
  EXPECT_EQ(gp.match_memory(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(gp.memory_response(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(gp.memory_response(0, 1), 0.8);
  // Zero projection: every mask entry is logistic(0) = 0.5.
  EXPECT_DOUBLE_EQ(gp.outputs[0].at(0, 0), 1.5);
}

TEST(GpAdjust, HandEvaluatedSimilarity) {
  const std::vector<Tensor3> batch{pixel_image({1.0, 0.0})};
  const auto gp = gp_adjust(batch, identity_bank(2), zero_map(2, 4));
  EXPECT_NEAR(gp.match_image(0, 0), kE / (kE + 1), 1e-12);
  EXPECT_NEAR(gp.match_image(0, 1), 1 / (kE + 1), 1e-12);
  EXPECT_NEAR(gp.memory_response(0, 0), 0.7311, 1e-4);
  EXPECT_NEAR(gp.memory_response(0, 1), 0.2689, 1e-4);
}

TEST(GpAdjust, BatchDistributions) {
  Rng rng(1);
  std::vector<Tensor3> batch;
  for (int i = 0; i < 3; ++i) batch.push_back(verify::gen::tensor(rng, 4, 3, 3));
  const auto bank = verify::gen::bank(rng, 5, 4);
  LinearMap proj{Matrix(4, 8, 0.1), std::vector<double>(4, 0.0)};
  const auto gp = gp_adjust(batch, bank, proj);
  for (std::size_t b = 0; b < 3; ++b) {
    double s = 0.0;
    for (double v : gp.match_image.row(b)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  for (std::size_t m = 0; m < 5; ++m) {
    double s = 0.0;
    for (std::size_t b = 0; b < 3; ++b) s += gp.match_memory(b, m);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  for (double v : gp.mask.data()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(GpAdjust, RejectsChannelMismatch) {
  const std::vector<Tensor3> batch{pixel_image({1.0, 0.0, 2.0})};
  EXPECT_THROW(gp_adjust(batch, identity_bank(2), zero_map(2, 4)), ValidationError);
  const std::vector<Tensor3> ok{pixel_image({1.0, 0.0})};
  EXPECT_THROW(gp_adjust(ok, identity_bank(2), zero_map(2, 3)), ValidationError);
}

TEST(MemoryEvolve, ZeroIncrementKeepsUnitRows) {
  Rng rng(2);
  const auto bank = verify::gen::bank(rng, 4, 3);
  const Matrix pooled(1, 3);
  Matrix s_i(1, 4, 0.25), s_m(1, 4, 1.0);
  const auto out = memory_evolve(bank, pooled, s_i, s_m);
  for (std::size_t i = 0; i < bank.items.data().size(); ++i) {
    EXPECT_NEAR(out.items.data()[i], bank.items.data()[i], 1e-12);
  }
}

TEST(MemoryEvolve, UntouchedRowHasZeroIncrement) {
  const auto bank = identity_bank(2);
  const Matrix pooled(1, 2, std::vector<double>{0.3, 0.4});
  const Matrix s_i(1, 2, std::vector<double>{0.9, 0.1});
  const Matrix s_m(1, 2, 1.0);
  const auto inc = memory_increment(bank, pooled, s_i, s_m);
  EXPECT_EQ(inc.best_item, std::vector<std::size_t>{0});
  EXPECT_EQ(inc.delta(1, 0), 0.0);
  EXPECT_EQ(inc.delta(1, 1), 0.0);
  const auto out = memory_evolve(bank, pooled, s_i, s_m);
  EXPECT_EQ(out.items(1, 0), 0.0);
  EXPECT_EQ(out.items(1, 1), 1.0);
  const double n = std::hypot(1.0 + 0.5 * 0.3, 0.5 * 0.4);
  EXPECT_NEAR(out.items(0, 0), 1.15 / n, 1e-12);
}

TEST(MemoryEvolve, SharedBestItemAccumulates) {
  const auto bank = identity_bank(2);
  const Matrix pooled(2, 2, std::vector<double>{0.3, 0.4, -0.2, 0.7});
  const Matrix s_i(2, 2, std::vector<double>{0.2, 0.8, 0.4, 0.6});
  const Matrix s_m(2, 2, std::vector<double>{0.5, 0.3, 0.5, 0.7});
  const auto inc = memory_increment(bank, pooled, s_i, s_m);
  EXPECT_EQ(inc.best_item, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(inc.delta.data(), verify::oracle::memory_increment(pooled, s_i, s_m, 2).data());
  EXPECT_DOUBLE_EQ(inc.delta(1, 0), 0.3 * 0.3 + 0.7 * -0.2);
}

TEST(MemoryEvolve, RejectsNonFiniteUpdate) {
  const auto bank = identity_bank(2);
  const Matrix pooled(1, 2, std::vector<double>{INFINITY, 0.0});
  const Matrix s(1, 2, 0.5);
  EXPECT_THROW(memory_evolve(bank, pooled, s, s), NumericError);
}

TEST(ScRefine, SingleItemIsConstant) {
  MemoryBank bank{Matrix(1, 2, std::vector<double>{0.6, -0.8}), 0.5};
  Rng rng(3);
  const auto r = sc_refine(verify::gen::tensor(rng, 2, 3, 3), bank, 1);
  for (std::size_t p = 0; p < 9; ++p) {
    EXPECT_EQ(r.output.at(0, p), 0.6);
    EXPECT_EQ(r.output.at(1, p), -0.8);
    EXPECT_EQ(r.attention[p], 1.0);
  }
}

TEST(ScRefine, HandEvaluatedRetrieval) {
  const auto r = sc_refine(pixel_image({1.0, 0.0}), identity_bank(2), 2);
  EXPECT_EQ(r.top_indices, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(r.output.at(0, 0), 0.7311, 1e-4);
  EXPECT_NEAR(r.output.at(1, 0), 0.2689, 1e-4);
}

TEST(ScRefine, MatchesScalarOracle) {
  Rng rng(4);
  const auto bank = verify::gen::bank(rng, 6, 3);
  const Tensor3 x = verify::gen::tensor(rng, 3, 4, 4);
  const auto got = sc_refine(x, bank, 3);
  const auto want = verify::oracle::sc_refine(x, bank.items, 3);
  for (std::size_t i = 0; i < got.output.size(); ++i) {
    EXPECT_NEAR(got.output.data()[i], want.data()[i], 1e-12);
  }
}

TEST(ScRefine, RejectsKAboveM) {
  EXPECT_THROW(sc_refine(pixel_image({1.0, 0.0}), identity_bank(2), 3), ValidationError);
  EXPECT_THROW(sc_refine(pixel_image({1.0, 0.0}), identity_bank(2), 0), ValidationError);
}

TEST(Conv3x3, ZeroPaddedBorders) {
  Conv3x3 conv{1, 1, std::vector<double>(9, 1.0), {0.0}};
  const auto y = conv3x3(Tensor3(1, 3, 3, 1.0), conv);
  EXPECT_EQ(y.at(0, 0, 0), 4.0);
  EXPECT_EQ(y.at(0, 0, 1), 6.0);
  EXPECT_EQ(y.at(0, 1, 1), 9.0);
}

ExpertParams passthrough_expert(std::size_t c) {
  ExpertParams e = ExpertParams::random(c, 3, 2, 17);
  std::fill(e.fusion.weights.begin(), e.fusion.weights.end(), 0.0);
  std::fill(e.fusion.bias.begin(), e.fusion.bias.end(), 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) e.fusion.w(ch, ch, 1, 1) = 1.0;
  return e;
}

TEST(ExpertForward, SelectiveKernelReturnsGlobalStream) {
  Rng rng(5);
  const auto expert = passthrough_expert(3);
  const Tensor3 x = verify::gen::tensor(rng, 3, 4, 5);
  const auto out = expert_forward(x, expert, false);
  EXPECT_EQ(out.output.data(), out.global.data());
  EXPECT_FALSE(out.evolved.has_value());
}

TEST(ExpertForward, EvolveReturnsUpdatedMemoryOnly) {
  Rng rng(6);
  const auto expert = ExpertParams::random(3, 4, 2, 21);
  const auto before = expert;
  const auto out = expert_forward(verify::gen::tensor(rng, 3, 4, 4), expert, true);
  ASSERT_TRUE(out.evolved.has_value());
  EXPECT_EQ(expert, before);
  EXPECT_FALSE(out.evolved->memory == expert.memory);
  EXPECT_EQ(out.evolved->fusion, expert.fusion);
  for (std::size_t m = 0; m < 4; ++m) {
    double n = 0.0;
    for (double v : out.evolved->memory.items.row(m)) n += v * v;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(MecmForward, SingleExpertEqualsExpertForward) {
  Rng rng(7);
  const std::vector<ExpertParams> experts{ExpertParams::random(3, 4, 2, 1)};
  const Tensor3 x = verify::gen::tensor(rng, 3, 4, 4);
  const auto r = mecm_forward(x, experts, GateParams::random(1, 3, 2), 1, false);
  EXPECT_EQ(r.output.data(), expert_forward(x, experts[0], false).output.data());
}

TEST(MecmForward, IdenticalExpertsMixToSameOutput) {
  Rng rng(8);
  const auto e = ExpertParams::random(3, 4, 2, 1);
  const std::vector<ExpertParams> experts{e, e};
  const Tensor3 x = verify::gen::tensor(rng, 3, 4, 4);
  const auto r = mecm_forward(x, experts, gate_with_logits({0.0, 0.0}, 3), 2, false);
  const auto single = expert_forward(x, e, false).output;
  for (std::size_t i = 0; i < single.size(); ++i) {
    EXPECT_NEAR(r.output.data()[i], single.data()[i], 1e-12);
  }
}

TEST(MecmForward, UnselectedExpertsKeepMemory) {
  Rng rng(9);
  std::vector<ExpertParams> experts;
  for (int e = 0; e < 4; ++e) experts.push_back(ExpertParams::random(3, 8, 4, 100 + e));
  const auto r = mecm_forward(verify::gen::tensor(rng, 3, 4, 4), experts,
                              gate_with_logits({0.0, 3.0, -1.0, 2.0}, 3), 2, true);
  EXPECT_EQ(r.route.selected, (std::vector<std::size_t>{1, 3}));
  ASSERT_EQ(r.experts.size(), 4u);
  EXPECT_EQ(r.experts[0], experts[0]);
  EXPECT_EQ(r.experts[2], experts[2]);
  EXPECT_FALSE(r.experts[1].memory == experts[1].memory);
  EXPECT_FALSE(r.experts[3].memory == experts[3].memory);
}

TEST(MemoryBank, RandomRowsAreUnitAndSeeded) {
  const auto a = MemoryBank::random(16, 8, 3);
  EXPECT_EQ(a, MemoryBank::random(16, 8, 3));
  for (std::size_t m = 0; m < 16; ++m) {
    double n = 0.0;
    for (double v : a.items.row(m)) n += v * v;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  MemoryBank bad = a;
  bad.update_rate = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad.update_rate = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
}

}  // namespace
}  // namespace dmd::mecm
