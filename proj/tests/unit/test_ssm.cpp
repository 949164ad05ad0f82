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
#include <cstring>

#include "dmd/error.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"
#include "dmd/verify/generators.hpp"
#include "dmd/verify/oracles.hpp"

namespace dmd::ssm {
namespace {

// One state, one channel, fixed B and C through the biases.
SsmParams scalar_params(double a, double b, double c, double d) {
  SsmParams p = SsmParams::zeros(1, 1, 1);
  p.a[0] = a;
  p.b_b[0] = b;
  p.b_c[0] = c;
  p.skip[0] = d;
  return p;
}

Sequence column(std::initializer_list<double> v) {
  Sequence s(v.size(), 1);
  std::size_t i = 0;
  for (double x : v) s(i++, 0) = x;
  return s;
}

TEST(VanillaScan, ZeroInputGivesZeroOutput) {
  Rng rng(1);
  const auto p = verify::gen::ssm_params(rng, 4, 3, 2);
  const Sequence y = vanilla_scan(Sequence(10, 3), p);
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(VanillaScan, PureSkip) {
  const Sequence x = column({0.5, -2.0, 3.0});
  EXPECT_EQ(vanilla_scan(x, scalar_params(0.0, 0.0, 0.0, 1.0)).data(), x.data());
}

TEST(VanillaScan, HandUnroll) {
  const Sequence y = vanilla_scan(column({1.0, 1.0}), scalar_params(0.5, 1.0, 1.0, 0.0));
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(y(1, 0), 1.5);
}

TEST(VanillaScan, RejectsShapeMismatch) {
  const auto p = SsmParams::zeros(2, 3, 2);
  EXPECT_THROW(vanilla_scan(Sequence(4, 2), p), ValidationError);
}

TEST(VanillaScan, NonFiniteStateNamesStep) {
  SsmParams p = scalar_params(0.5, 1.0, 1.0, 0.0);
  Sequence x = column({1.0, 1e308, 1e308});
  p.b_b[0] = 1e10;
  try {
    vanilla_scan(x, p);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
  }
}

TEST(SsmParams, ValidateRejectsUnstableTransition) {
  SsmParams p = SsmParams::zeros(2, 2, 2);
  p.a[1] = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p.a[1] = -1.2;
  EXPECT_THROW(p.validate(), ValidationError);
  p.a[1] = 0.99;
  EXPECT_NO_THROW(p.validate());
  p.w_b = Matrix(3, 2);
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(SsmParams, PackUnpackRoundTrip) {
  const auto p = SsmParams::random(3, 4, 2, 99);
  SsmParams q = SsmParams::zeros(3, 4, 2);
  unpack(pack(p), q);
  EXPECT_EQ(p, q);
  EXPECT_THROW(unpack(std::vector<double>(3), q), ValidationError);
}

TEST(SsmParams, RandomIsSeeded) {
  EXPECT_EQ(SsmParams::random(4, 8, 2, 5), SsmParams::random(4, 8, 2, 5));
  EXPECT_FALSE(SsmParams::random(4, 8, 2, 5) == SsmParams::random(4, 8, 2, 6));
  for (double a : SsmParams::random(8, 8, 2, 5).a) {
    EXPECT_GE(a, 0.3);
    EXPECT_LE(a, 0.9);
  }
}

TEST(BlendMatrices, Endpoints) {
  const std::vector<double> b{2.0, -1.0}, bd{4.0, 3.0}, c{0.5, 0.25}, cd{-1.0, 1.0};
  EXPECT_EQ(blend_matrices(b, bd, c, cd, 0.0).first, b);
  EXPECT_EQ(blend_matrices(b, bd, c, cd, 0.0).second, c);
  EXPECT_EQ(blend_matrices(b, bd, c, cd, 1.0).first, bd);
  EXPECT_EQ(blend_matrices(b, bd, c, cd, 1.0).second, cd);
  EXPECT_DOUBLE_EQ(blend_matrices(b, bd, c, cd, 0.5).first[0], 3.0);
}

TEST(BlendMatrices, OutOfRangeGammaIsClampedAndCounted) {
  const std::vector<double> b{2.0}, bd{4.0};
  ScanDiagnostics diag;
  EXPECT_EQ(blend_matrices(b, bd, b, bd, 1.5, &diag).first[0], 4.0);
  EXPECT_EQ(blend_matrices(b, bd, b, bd, -0.5, &diag).first[0], 2.0);
  EXPECT_EQ(diag.gamma_clamped, 2u);
}

TEST(DsScan, GammaZeroIsBitIdenticalToVanilla) {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const auto p = verify::gen::ssm_params(rng, 4, 5, 2);
    const Sequence x = verify::gen::sequence(rng, 33, 5);
    const Sequence z = verify::gen::sequence(rng, 33, 2);
    const Sequence a = ds_scan(x, z, GammaMap{std::vector<double>(33, 0.0)}, p);
    const Sequence b = vanilla_scan(x, p);
    ASSERT_EQ(0, std::memcmp(a.data().data(), b.data().data(),
                             a.data().size() * sizeof(double)));
  }
}

TEST(DsScan, GammaOneUsesDepthMatrices) {
  Rng rng(8);
  SsmParams p = verify::gen::ssm_params(rng, 3, 2, 2);
  const Sequence x = verify::gen::sequence(rng, 12, 2);
  const Sequence z = verify::gen::sequence(rng, 12, 2);
  const Sequence y = ds_scan(x, z, GammaMap{std::vector<double>(12, 1.0)}, p);
  const Sequence want = verify::oracle::unrolled_ds_scan(
      x, z, std::vector<double>(12, 1.0), p);
  for (std::size_t i = 0; i < y.data().size(); ++i) {
    EXPECT_NEAR(y.data()[i], want.data()[i], 1e-12);
  }
  // Changing the vanilla projections must not matter.
  for (double& w : p.w_b.data()) w += 1.0;
  for (double& w : p.w_c.data()) w -= 1.0;
  const Sequence y2 = ds_scan(x, z, GammaMap{std::vector<double>(12, 1.0)}, p);
  EXPECT_EQ(y.data(), y2.data());
}

TEST(DsScan, MatchesUnrolledOracle) {
  Rng rng(9);
  const auto p = verify::gen::ssm_params(rng, 4, 3, 2);
  const Sequence x = verify::gen::sequence(rng, 16, 3);
  const Sequence z = verify::gen::sequence(rng, 16, 2, 0.0, 1.0);
  std::vector<double> g(16);
  for (double& v : g) v = rng.uniform();
  const Sequence y = ds_scan(x, z, GammaMap{g}, p);
  const Sequence want = verify::oracle::unrolled_ds_scan(x, z, g, p);
  for (std::size_t i = 0; i < y.data().size(); ++i) {
    EXPECT_NEAR(y.data()[i], want.data()[i], 1e-10 * std::max(1.0, std::abs(want.data()[i])));
  }
}

TEST(DsScan, RejectsLengthMismatch) {
  const auto p = SsmParams::zeros(2, 2, 2);
  EXPECT_THROW(ds_scan(Sequence(4, 2), Sequence(3, 2), GammaMap{std::vector<double>(4)}, p),
               ValidationError);
  EXPECT_THROW(ds_scan(Sequence(4, 2), Sequence(4, 2), GammaMap{std::vector<double>(5)}, p),
               ValidationError);
}

TEST(PositionalEncoding, OriginIsSinZeroCosOne) {
  const auto pe = spatial_positional_encoding(3, 5, 8);
  const auto row = pe.table.row(0);
  for (std::size_t ch = 0; ch < 8; ch += 2) {
    EXPECT_EQ(row[ch], 0.0);
    EXPECT_EQ(row[ch + 1], 1.0);
  }
}

TEST(PositionalEncoding, MatchesEntrywiseOracle) {
  const auto pe = spatial_positional_encoding(4, 4, 8, 10000.0);
  ASSERT_EQ(pe.frequencies.size(), 2u);
  EXPECT_DOUBLE_EQ(pe.frequencies[0], 1.0);
  EXPECT_DOUBLE_EQ(pe.frequencies[1], std::pow(10000.0, -0.5));
  for (std::size_t px = 0; px < 16; ++px) {
    for (std::size_t ch = 0; ch < 8; ++ch) {
      EXPECT_NEAR(pe.table(px, ch),
                  verify::oracle::pe_entry(4, 4, 8, 10000.0, px / 4, px % 4, ch), 1e-15);
    }
  }
}

TEST(PositionalEncoding, RejectsBadArguments) {
  EXPECT_THROW(spatial_positional_encoding(4, 4, 6), ValidationError);
  EXPECT_THROW(spatial_positional_encoding(4, 4, 8, 1.0), ValidationError);
  EXPECT_THROW(spatial_positional_encoding(0, 4, 8), ValidationError);
}

TEST(RealignPe, IdentityAndSwap) {
  const auto pe = spatial_positional_encoding(1, 2, 4);
  EXPECT_EQ(realign_pe(pe, scan::identity_order(1, 2)).data(), pe.table.data());
  const Sequence swapped = realign_pe(pe, scan::ScanOrder{1, 2, {1, 0}, scan::ScanMode::kGlobal});
  for (std::size_t ch = 0; ch < 4; ++ch) {
    EXPECT_EQ(swapped(0, ch), pe.table(1, ch));
    EXPECT_EQ(swapped(1, ch), pe.table(0, ch));
  }
  EXPECT_THROW(realign_pe(pe, scan::identity_order(2, 2)), ValidationError);
}

TEST(RealignPe, RestoreReproducesTable) {
  Rng rng(2);
  const auto p = verify::gen::proximity_map(rng, 5, 6, verify::gen::MapKind::kBlobs);
  const auto o = scan::da_gscan(p);
  const auto pe = spatial_positional_encoding(5, 6, 8);
  const Tensor3 back = scan::restore_order(realign_pe(pe, o), o);
  for (std::size_t px = 0; px < 30; ++px) {
    for (std::size_t ch = 0; ch < 8; ++ch) EXPECT_EQ(back.at(ch, px), pe.table(px, ch));
  }
}

TEST(Gamma, FollowsScanOrderAndTransform) {
  const auto p = scan::normalize_proximity(1, 3, std::vector<double>{0.0, 1.0, 0.5});
  const auto o = scan::da_gscan(p);
  EXPECT_EQ(gamma_from_proximity(p, o).values, (std::vector<double>{1.0, 0.5, 0.0}));
  const auto sq = gamma_from_proximity(p, o, [](double v) { return v * v; });
  EXPECT_EQ(sq.values, (std::vector<double>{1.0, 0.25, 0.0}));
  const Sequence z = depth_features(p, o);
  EXPECT_EQ(z(1, 0), 0.5);
  EXPECT_EQ(z(1, 1), 1.0);
}

TEST(Gamma, ConstantMapIsClampedIntoUnitRange) {
  const auto p = scan::normalize_proximity(2, 2, std::vector<double>(4, 3.0));
  for (double g : gamma_from_proximity(p, scan::da_gscan(p)).values) EXPECT_EQ(g, 1.0);
}

TEST(DsMamba, SumsFourBranches) {
  Rng rng(4);
  const auto p = verify::gen::proximity_map(rng, 4, 5, verify::gen::MapKind::kBlobs);
  const auto regions = scan::partition_regions(p);
  const Tensor3 x = verify::gen::tensor(rng, 4, 4, 5);
  DsMambaParams params;
  for (auto& b : params.branches) b = SsmParams::zeros(2, 4, 2);
  // Only the skip path of the first branch is active: output = x * D.
  for (double& d : params.branches[0].skip) d = 2.0;
  const Tensor3 y = ds_mamba_forward(x, p, regions, params, nullptr);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y.data()[i], 2.0 * x.data()[i]);
  for (double& d : params.branches[3].skip) d = -1.0;
  const Tensor3 y2 = ds_mamba_forward(x, p, regions, params, nullptr);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y2.data()[i], x.data()[i]);
}

TEST(DsMamba, RejectsMismatchedSizes) {
  const auto p = scan::normalize_proximity(2, 2, std::vector<double>{0, 1, 2, 3});
  DsMambaParams params;
  for (auto& b : params.branches) b = SsmParams::zeros(1, 4, 2);
  EXPECT_THROW(ds_mamba_forward(Tensor3(4, 3, 2), p, scan::partition_regions(p), params, nullptr),
               ValidationError);
  const auto pe = spatial_positional_encoding(2, 2, 8);
  EXPECT_THROW(ds_mamba_forward(Tensor3(4, 2, 2), p, scan::partition_regions(p), params, &pe),
               ValidationError);
}

}  // namespace
}  // namespace dmd::ssm
