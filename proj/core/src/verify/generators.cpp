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

#include "dmd/verify/generators.hpp"

#include <cmath>
#include <vector>

namespace dmd::verify::gen {

MapKind map_kind_for(std::size_t case_index) {
  switch (case_index % 5) {
    case 0:
      return MapKind::kUniform;
    case 1:
      return MapKind::kConstant;
    case 2:
      return MapKind::kCheckerboard;
    case 3:
      return MapKind::kBlobs;
    default:
      return MapKind::kLevels;
  }
}

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::kUniform:
      return "uniform";
    case MapKind::kConstant:
      return "constant";
    case MapKind::kCheckerboard:
      return "checkerboard";
    case MapKind::kBlobs:
      return "blobs";
    case MapKind::kLevels:
      return "levels";
  }
  return "?";
}

scan::ProximityMap proximity_map(Rng& rng, std::size_t height,
                                 std::size_t width, MapKind kind) {
  std::vector<double> raw(height * width, 0.0);
  switch (kind) {
    case MapKind::kUniform:
      for (double& v : raw) v = rng.uniform();
      break;
    case MapKind::kConstant: {
      const double c = rng.uniform(0.0, 5.0);
      for (double& v : raw) v = c;
      break;
    }
    case MapKind::kCheckerboard:
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          raw[y * width + x] = (x + y) % 2 == 0 ? 0.9 : 0.1;
        }
      }
      break;
    case MapKind::kBlobs: {
      const std::size_t blobs = static_cast<std::size_t>(rng.integer(1, 4));
      for (double& v : raw) v = 0.05 * rng.uniform();
      for (std::size_t b = 0; b < blobs; ++b) {
        const double cy = rng.uniform(0.0, double(height));
        const double cx = rng.uniform(0.0, double(width));
        const double radius =
            rng.uniform(0.15, 0.45) * double(std::max(height, width));
        const double level = rng.uniform(0.3, 1.0);
        for (std::size_t y = 0; y < height; ++y) {
          for (std::size_t x = 0; x < width; ++x) {
            const double dy = double(y) - cy, dx = double(x) - cx;
            if (dy * dy + dx * dx <= radius * radius) {
              raw[y * width + x] = level - 0.1 * std::sqrt(dy * dy + dx * dx) /
                                               (radius + 1e-9);
            }
          }
        }
      }
      break;
    }
    case MapKind::kLevels:
      // Few distinct values, so near-to-far sorting sees many ties.
      for (double& v : raw) v = double(rng.integer(0, 3)) / 3.0;
      break;
  }
  return scan::normalize_proximity(height, width, raw);
}

Tensor3 tensor(Rng& rng, std::size_t channels, std::size_t height,
               std::size_t width, double lo, double hi) {
  Tensor3 t(channels, height, width);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

Sequence sequence(Rng& rng, std::size_t length, std::size_t dim, double lo,
                  double hi) {
  Sequence s(length, dim);
  for (double& v : s.data()) v = rng.uniform(lo, hi);
  return s;
}

ssm::SsmParams ssm_params(Rng& rng, std::size_t state_size,
                          std::size_t d_inner, std::size_t depth_dim) {
  ssm::SsmParams p =
      ssm::SsmParams::random(state_size, d_inner, depth_dim, rng.next());
  for (double& a : p.a) a = rng.uniform(-0.9, 0.9);
  return p;
}

mecm::MemoryBank bank(Rng& rng, std::size_t items, std::size_t channels) {
  return mecm::MemoryBank::random(items, channels, rng.next());
}

}  // namespace dmd::verify::gen
