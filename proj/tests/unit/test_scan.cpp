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

#include <algorithm>
#include <numeric>

#include "dmd/error.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/verify/generators.hpp"
#include "dmd/verify/oracles.hpp"

namespace dmd::scan {
namespace {

ProximityMap map_from(std::size_t h, std::size_t w, std::vector<double> raw) {
  return normalize_proximity(h, w, raw);
}

TEST(NormalizeProximity, AffineRescale) {
  const auto p = map_from(2, 2, {2, 4, 6, 8});
  EXPECT_FALSE(p.constant);
  EXPECT_DOUBLE_EQ(p.values[0], 0.0);
  EXPECT_DOUBLE_EQ(p.values[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.values[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.values[3], 1.0);
}

TEST(NormalizeProximity, ConstantMapIsFlaggedAndUnchanged) {
  const auto p = map_from(2, 2, {5, 5, 5, 5});
  EXPECT_TRUE(p.constant);
  EXPECT_EQ(p.values, std::vector<double>(4, 5.0));
}

TEST(NormalizeProximity, RandomMapSpansUnitInterval) {
  Rng rng(3);
  std::vector<double> raw(64);
  for (double& v : raw) v = rng.uniform(-3.0, 7.0);
  const auto p = map_from(8, 8, raw);
  EXPECT_EQ(*std::min_element(p.values.begin(), p.values.end()), 0.0);
  EXPECT_EQ(*std::max_element(p.values.begin(), p.values.end()), 1.0);
}

TEST(NormalizeProximity, RejectsNonFinite) {
  EXPECT_THROW(map_from(1, 2, {0.0, std::nan("")}), ValidationError);
  EXPECT_THROW(map_from(1, 2, {0.0, INFINITY}), ValidationError);
  EXPECT_THROW(map_from(0, 2, {}), ValidationError);
  EXPECT_THROW(map_from(2, 2, {1, 2, 3}), ValidationError);
}

TEST(PartitionRegions, ConstantMapIsOneRegion) {
  const auto r = partition_regions(map_from(4, 4, std::vector<double>(16, 0.3)));
  ASSERT_EQ(r.region_count(), 1u);
  EXPECT_EQ(r.areas[0], 0u);
  EXPECT_EQ(r.areas[1], 16u);
}

TEST(PartitionRegions, TwoHalves) {
  std::vector<double> raw(16);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) raw[y * 4 + x] = x < 2 ? 0.9 : 0.1;
  }
  const auto p = map_from(4, 4, raw);
  const auto r = partition_regions(p, {2, 0.0});
  ASSERT_EQ(r.region_count(), 2u);
  EXPECT_EQ(r.areas[1], 8u);
  EXPECT_EQ(r.areas[2], 8u);
  // Equal areas: the region holding pixel 0 comes first.
  EXPECT_EQ(r.labels[0], 1);
  EXPECT_EQ(r.labels[3], 2);
  const auto ref = verify::oracle::flood_fill_partition(p, 2, 0.0);
  EXPECT_EQ(r.labels, ref.labels);
}

TEST(PartitionRegions, SmallComponentsBecomeBackground) {
  // A single bright pixel in a dark field.
  std::vector<double> raw(100, 0.0);
  raw[55] = 1.0;
  const auto r = partition_regions(map_from(10, 10, raw), {8, 0.02});
  EXPECT_EQ(r.labels[55], 0);
  EXPECT_EQ(r.areas[0], 1u);
  EXPECT_EQ(r.region_count(), 1u);
}

TEST(PartitionRegions, AreasSumToPixelCountAndAreConnected) {
  Rng rng(11);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto p = verify::gen::proximity_map(rng, 12, 9, verify::gen::map_kind_for(i));
    const auto r = partition_regions(p);
    EXPECT_EQ(std::accumulate(r.areas.begin(), r.areas.end(), std::size_t{0}), 108u);
    // Four-connectivity: flood fill from the first pixel of each region
    // restricted to that label must reach its whole area.
    for (std::size_t label = 1; label < r.areas.size(); ++label) {
      const auto seed = static_cast<std::size_t>(
          std::find(r.labels.begin(), r.labels.end(), static_cast<int>(label)) -
          r.labels.begin());
      std::vector<bool> seen(108, false);
      std::vector<std::size_t> stack{seed};
      seen[seed] = true;
      std::size_t reached = 0;
      while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        ++reached;
        const std::size_t y = c / 9, x = c % 9;
        const std::size_t nb[4] = {y > 0 ? c - 9 : c, y < 11 ? c + 9 : c,
                                   x > 0 ? c - 1 : c, x < 8 ? c + 1 : c};
        for (std::size_t n : nb) {
          if (!seen[n] && r.labels[n] == static_cast<int>(label)) {
            seen[n] = true;
            stack.push_back(n);
          }
        }
      }
      EXPECT_EQ(reached, r.areas[label]);
    }
  }
}

TEST(PartitionRegions, RejectsBadOptions) {
  const auto p = map_from(2, 2, {0, 1, 2, 3});
  EXPECT_THROW(partition_regions(p, {0, 0.0}), ValidationError);
  EXPECT_THROW(partition_regions(p, {8, 1.0}), ValidationError);
  EXPECT_THROW(partition_regions(p, {8, -0.1}), ValidationError);
}

TEST(Gscan, ConstantMapIsIdentity) {
  const auto p = map_from(4, 4, std::vector<double>(16, 2.0));
  EXPECT_EQ(da_gscan(p).forward, identity_order(4, 4).forward);
}

TEST(Gscan, NearToFarWithIndexTieBreak) {
  const auto p = map_from(2, 3, {0.2, 0.9, 0.2, 0.5, 0.9, 0.0});
  const auto o = da_gscan(p);
  EXPECT_EQ(o.forward, (std::vector<std::uint32_t>{1, 4, 3, 0, 2, 5}));
  EXPECT_EQ(o.provenance, ScanMode::kGlobal);
  EXPECT_EQ(to_string(o.provenance), "gscan");
}

TEST(Rscan, LargestRegionFirstBackgroundLast) {
  // Left 2x3 block near (0.9), right 2x1 column far (0.1), 0.5 speck.
  const auto p = map_from(2, 4, {0.9, 0.9, 0.9, 0.1, 0.9, 0.9, 0.5, 0.1});
  const auto r = partition_regions(p, {8, 0.2});  // speck (1 px) -> background
  const auto o = da_rscan(p, r);
  EXPECT_TRUE(is_permutation(o));
  EXPECT_EQ(o.forward, (std::vector<std::uint32_t>{0, 1, 2, 4, 5, 3, 7, 6}));
  EXPECT_EQ(o.forward, verify::oracle::rscan(p, r.labels));
}

TEST(Rscan, RejectsMismatchedRegions) {
  const auto p = map_from(2, 2, {0, 1, 2, 3});
  const auto r = partition_regions(map_from(1, 4, {0, 1, 2, 3}));
  EXPECT_THROW(da_rscan(p, r), ValidationError);
}

TEST(Orders, ReverseAndInverse) {
  ScanOrder o{1, 4, {2, 0, 3, 1}, ScanMode::kGlobal};
  const auto rev = reverse_order(o);
  EXPECT_EQ(rev.forward, (std::vector<std::uint32_t>{1, 3, 0, 2}));
  EXPECT_EQ(rev.provenance, ScanMode::kReversed);
  EXPECT_EQ(reverse_order(rev).forward, o.forward);
  const auto inv = inverse_order(o);
  EXPECT_EQ(inv.forward, (std::vector<std::uint32_t>{1, 3, 0, 2}));
  EXPECT_EQ(inverse_order(inv).forward, o.forward);
}

TEST(Orders, ValidateRejectsNonPermutations) {
  EXPECT_THROW(validate_order(ScanOrder{1, 3, {0, 0, 2}, ScanMode::kIdentity}),
               ValidationError);
  EXPECT_THROW(validate_order(ScanOrder{1, 3, {0, 1}, ScanMode::kIdentity}),
               ValidationError);
  EXPECT_THROW(validate_order(ScanOrder{1, 3, {0, 1, 3}, ScanMode::kIdentity}),
               ValidationError);
  EXPECT_FALSE(is_permutation(ScanOrder{1, 3, {2, 2, 1}, ScanMode::kIdentity}));
}

TEST(Orders, ApplyRestoreRoundTripIsExact) {
  Rng rng(5);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto p = verify::gen::proximity_map(rng, 7, 5, verify::gen::map_kind_for(i));
    const Tensor3 x = verify::gen::tensor(rng, 3, 7, 5);
    for (const auto& o : {da_gscan(p), da_rscan(p, partition_regions(p))}) {
      const Sequence s = apply_order(x, o);
      EXPECT_EQ(s.rows(), 35u);
      EXPECT_EQ(s.cols(), 3u);
      EXPECT_EQ(restore_order(s, o).data(), x.data());
    }
  }
}

TEST(Orders, ApplyRejectsSizeMismatch) {
  const Tensor3 x(1, 2, 2);
  EXPECT_THROW(apply_order(x, identity_order(2, 3)), ValidationError);
  EXPECT_THROW(restore_order(Sequence(5, 1), identity_order(2, 2)), ValidationError);
}

TEST(Orders, OneByOne) {
  const auto p = map_from(1, 1, {0.4});
  EXPECT_EQ(da_gscan(p).forward, std::vector<std::uint32_t>{0});
  EXPECT_EQ(da_rscan(p, partition_regions(p)).forward, std::vector<std::uint32_t>{0});
}

}  // namespace
}  // namespace dmd::scan
