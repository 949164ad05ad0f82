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

#ifndef DMD_SCAN_HPP_
#define DMD_SCAN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dmd/tensor.hpp"

namespace dmd::scan {

// Per-pixel closeness, row-major. Larger values are nearer to the camera.
struct ProximityMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;
  // Set by normalize_proximity when the input had no spread; values are then
  // left exactly as given.
  bool constant = false;

  std::size_t pixels() const { return height * width; }
  double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

// Label 0 is background; labels 1..R are 4-connected regions sorted by
// descending area.
struct RegionMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> labels;
  // areas[l] is the pixel count of label l; areas[0] is the background.
  std::vector<std::size_t> areas;

  std::size_t region_count() const { return areas.empty() ? 0 : areas.size() - 1; }
};

enum class ScanMode : std::uint8_t {
  kIdentity,
  kRegion,     // region-wise, large-area-first then near-to-far
  kGlobal,     // global near-to-far
  kReversed,
  kInverseOf,
};

std::string_view to_string(ScanMode mode);

struct ScanOrder {
  std::size_t height = 0;
  std::size_t width = 0;
  // forward[t] is the row-major pixel index visited at step t.
  std::vector<std::uint32_t> forward;
  ScanMode provenance = ScanMode::kIdentity;

  std::size_t size() const { return forward.size(); }
};

struct PartitionOptions {
  int bins = 8;
  double min_area_frac = 0.005;
};

// Min-max rescale to [0,1]. A map without spread is returned unchanged and
// flagged constant. Throws ValidationError on NaN/Inf or empty dimensions.
ProximityMap normalize_proximity(std::size_t height, std::size_t width,
                                 std::span<const double> raw);

// Quantizes into equal-width bins, labels 4-connected components per bin and
// folds components smaller than min_area_frac * H * W into the background.
RegionMap partition_regions(const ProximityMap& p,
                            const PartitionOptions& options = {});

// Region-wise scan: regions by descending area (ties: smaller minimum pixel
// index), background last; near-to-far inside each region.
ScanOrder da_rscan(const ProximityMap& p, const RegionMap& regions);

// Global near-to-far scan; ties by ascending row-major index.
ScanOrder da_gscan(const ProximityMap& p);

ScanOrder identity_order(std::size_t height, std::size_t width);
ScanOrder reverse_order(const ScanOrder& order);
// inverse.forward[p] = t such that order.forward[t] = p.
ScanOrder inverse_order(const ScanOrder& order);

// Throws ValidationError unless order.forward is a permutation of 0..H*W-1.
void validate_order(const ScanOrder& order);
bool is_permutation(const ScanOrder& order);

// Gathers pixels into a sequence: row t of the result is pixel forward[t].
Sequence apply_order(const Tensor3& x, const ScanOrder& order);

// Scatters a sequence back to spatial layout; exact inverse of apply_order.
Tensor3 restore_order(const Sequence& s, const ScanOrder& order);

// Proximity values in scan order.
std::vector<double> ordered_values(const ProximityMap& p,
                                   const ScanOrder& order);

}  // namespace dmd::scan

#endif  // DMD_SCAN_HPP_
