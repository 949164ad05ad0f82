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

#include "dmd/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmd/error.hpp"

namespace dmd::scan {
namespace {

void require_same_grid(const ProximityMap& p, const RegionMap& r) {
  if (p.height != r.height || p.width != r.width ||
      r.labels.size() != p.pixels()) {
    throw ValidationError("region map dimensions do not match proximity map");
  }
}

// Sorts pixel indices near-to-far; ties keep ascending row-major order.
void sort_near_to_far(std::vector<std::uint32_t>& idx,
                      std::span<const double> values) {
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return values[a] > values[b];
                   });
}

// Minimal union-find over pixel indices.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller index as root so roots are component minima.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

std::string_view to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::kIdentity:
      return "identity";
    case ScanMode::kRegion:
      return "rscan";
    case ScanMode::kGlobal:
      return "gscan";
    case ScanMode::kReversed:
      return "reversed";
    case ScanMode::kInverseOf:
      return "inverse-of";
  }
  return "unknown";
}

ProximityMap normalize_proximity(std::size_t height, std::size_t width,
                                 std::span<const double> raw) {
  if (height == 0 || width == 0) {
    throw ValidationError("proximity map must be at least 1x1");
  }
  if (raw.size() != height * width) {
    throw ValidationError("proximity map has " + std::to_string(raw.size()) +
                          " values, expected " +
                          std::to_string(height * width));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw ValidationError("proximity map value at index " +
                            std::to_string(i) + " is not finite");
    }
  }
  ProximityMap out{height, width, {raw.begin(), raw.end()}, false};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min_v = *lo;
  const double range = *hi - min_v;
  if (range == 0.0) {
    out.constant = true;
    return out;
  }
  for (double& v : out.values) v = (v - min_v) / range;
  return out;
}

RegionMap partition_regions(const ProximityMap& p,
                            const PartitionOptions& options) {
  if (options.bins < 1) {
    throw ValidationError("partition_regions: bins must be >= 1");
  }
  if (!(options.min_area_frac >= 0.0 && options.min_area_frac < 1.0)) {
    throw ValidationError("partition_regions: min_area_frac must be in [0,1)");
  }
  const std::size_t h = p.height;
  const std::size_t w = p.width;
  const std::size_t n = p.pixels();
  if (n == 0 || p.values.size() != n) {
    throw ValidationError("partition_regions: malformed proximity map");
  }

  std::vector<int> bin(n);
  if (p.constant) {
    std::fill(bin.begin(), bin.end(), 0);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const int b = static_cast<int>(std::floor(p.values[i] * options.bins));
      bin[i] = std::clamp(b, 0, options.bins - 1);
    }
  }

  DisjointSet sets(n);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto i = static_cast<std::uint32_t>(y * w + x);
      if (x + 1 < w && bin[i] == bin[i + 1]) sets.unite(i, i + 1);
      if (y + 1 < h && bin[i] == bin[i + w]) {
        sets.unite(i, static_cast<std::uint32_t>(i + w));
      }
    }
  }

  // Roots are component minima, so scanning in raster order discovers
  // components by ascending minimum index.
  std::vector<std::uint32_t> root(n);
  std::vector<std::uint32_t> roots;
  std::vector<std::size_t> root_area(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    root[i] = sets.find(i);
    if (root[i] == i) roots.push_back(i);
    ++root_area[root[i]];
  }

  const double min_area = options.min_area_frac * static_cast<double>(n);
  std::vector<std::uint32_t> kept;
  for (std::uint32_t r : roots) {
    if (static_cast<double>(root_area[r]) >= min_area) kept.push_back(r);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return root_area[a] > root_area[b];
                   });

  std::vector<std::int32_t> label_of_root(n, 0);
  RegionMap out{h, w, std::vector<std::int32_t>(n, 0),
                std::vector<std::size_t>(kept.size() + 1, 0)};
  for (std::size_t k = 0; k < kept.size(); ++k) {
    label_of_root[kept[k]] = static_cast<std::int32_t>(k + 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t label = label_of_root[root[i]];
    out.labels[i] = label;
    ++out.areas[static_cast<std::size_t>(label)];
  }
  return out;
}

ScanOrder da_rscan(const ProximityMap& p, const RegionMap& regions) {
  require_same_grid(p, regions);
  const std::size_t n = p.pixels();

  std::int32_t max_label = 0;
  for (std::int32_t l : regions.labels) {
    if (l < 0) throw ValidationError("da_rscan: negative region label");
    max_label = std::max(max_label, l);
  }
  const auto label_count = static_cast<std::size_t>(max_label) + 1;
  std::vector<std::vector<std::uint32_t>> members(label_count);
  for (std::uint32_t i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(regions.labels[i])].push_back(i);
  }

  // Order regions from the pixel lists themselves rather than trusting the
  // label numbering; member lists are ascending so front() is the minimum.
  std::vector<std::size_t> order;
  for (std::size_t l = 1; l < label_count; ++l) {
    if (!members[l].empty()) order.push_back(l);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (members[a].size() != members[b].size()) {
      return members[a].size() > members[b].size();
    }
    return members[a].front() < members[b].front();
  });
  order.push_back(0);

  ScanOrder out{p.height, p.width, {}, ScanMode::kRegion};
  out.forward.reserve(n);
  for (std::size_t l : order) {
    auto& idx = members[l];
    sort_near_to_far(idx, p.values);
    out.forward.insert(out.forward.end(), idx.begin(), idx.end());
  }
  return out;
}

ScanOrder da_gscan(const ProximityMap& p) {
  ScanOrder out = identity_order(p.height, p.width);
  sort_near_to_far(out.forward, p.values);
  out.provenance = ScanMode::kGlobal;
  return out;
}

ScanOrder identity_order(std::size_t height, std::size_t width) {
  ScanOrder out{height, width, std::vector<std::uint32_t>(height * width),
                ScanMode::kIdentity};
  std::iota(out.forward.begin(), out.forward.end(), 0u);
  return out;
}

ScanOrder reverse_order(const ScanOrder& order) {
  ScanOrder out = order;
  std::reverse(out.forward.begin(), out.forward.end());
  out.provenance = ScanMode::kReversed;
  return out;
}

ScanOrder inverse_order(const ScanOrder& order) {
  validate_order(order);
  ScanOrder out{order.height, order.width,
                std::vector<std::uint32_t>(order.size()), ScanMode::kInverseOf};
  for (std::uint32_t t = 0; t < order.size(); ++t) {
    out.forward[order.forward[t]] = t;
  }
  return out;
}

bool is_permutation(const ScanOrder& order) {
  const std::size_t n = order.height * order.width;
  if (order.forward.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (std::uint32_t v : order.forward) {
    if (v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

void validate_order(const ScanOrder& order) {
  if (!is_permutation(order)) {
    throw ValidationError("scan order is not a permutation of " +
                          std::to_string(order.height * order.width) +
                          " pixel indices");
  }
}

Sequence apply_order(const Tensor3& x, const ScanOrder& order) {
  if (x.height() != order.height || x.width() != order.width ||
      order.size() != x.pixels()) {
    throw ValidationError("apply_order: order length " +
                          std::to_string(order.size()) +
                          " does not match tensor with " +
                          std::to_string(x.pixels()) + " pixels");
  }
  Sequence s(order.size(), x.channels());
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::uint32_t p = order.forward[t];
    for (std::size_t c = 0; c < x.channels(); ++c) s(t, c) = x.at(c, p);
  }
  return s;
}

Tensor3 restore_order(const Sequence& s, const ScanOrder& order) {
  if (s.rows() != order.size() || order.size() != order.height * order.width) {
    throw ValidationError("restore_order: sequence length " +
                          std::to_string(s.rows()) +
                          " does not match order length " +
                          std::to_string(order.size()));
  }
  Tensor3 out(s.cols(), order.height, order.width);
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::uint32_t p = order.forward[t];
    for (std::size_t c = 0; c < s.cols(); ++c) out.at(c, p) = s(t, c);
  }
  return out;
}

std::vector<double> ordered_values(const ProximityMap& p,
                                   const ScanOrder& order) {
  if (order.size() != p.pixels()) {
    throw ValidationError("ordered_values: order does not match map size");
  }
  std::vector<double> out(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) {
    out[t] = p.values[order.forward[t]];
  }
  return out;
}

}  // namespace dmd::scan
