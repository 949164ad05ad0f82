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

#ifndef DMD_VERIFY_GENERATORS_HPP_
#define DMD_VERIFY_GENERATORS_HPP_

#include <cstddef>

#include "dmd/mecm.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"
#include "dmd/tensor.hpp"

namespace dmd::verify::gen {

enum class MapKind { kUniform, kConstant, kCheckerboard, kBlobs, kLevels };

MapKind map_kind_for(std::size_t case_index);
const char* to_string(MapKind kind);

scan::ProximityMap proximity_map(Rng& rng, std::size_t height,
                                 std::size_t width, MapKind kind);

Tensor3 tensor(Rng& rng, std::size_t channels, std::size_t height,
               std::size_t width, double lo = -1.0, double hi = 1.0);
Sequence sequence(Rng& rng, std::size_t length, std::size_t dim,
                  double lo = -1.0, double hi = 1.0);

// A uniform in (-0.9, 0.9), other weights normal.
ssm::SsmParams ssm_params(Rng& rng, std::size_t state_size,
                          std::size_t d_inner, std::size_t depth_dim);

mecm::MemoryBank bank(Rng& rng, std::size_t items, std::size_t channels);

}  // namespace dmd::verify::gen

#endif  // DMD_VERIFY_GENERATORS_HPP_
