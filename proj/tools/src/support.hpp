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

#ifndef DMD_TOOLS_SUPPORT_HPP_
#define DMD_TOOLS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dmd/scan.hpp"
#include "dmd/tensor.hpp"

namespace dmd::cli {

// --seed, then DMD_SEED, then `fallback`.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::uint64_t fallback);

bool is_image_path(const std::filesystem::path& path);

// Netpbm image or tensor file, as C x H x W.
Tensor3 load_tensor(const std::filesystem::path& path);

// Single-channel Netpbm image or rank-2 / 1-channel tensor file, normalized.
scan::ProximityMap load_proximity(const std::filesystem::path& path);

// Scan rank mapped to hue (full saturation and value), as a 3 x H x W image.
Tensor3 order_visualization(const scan::ScanOrder& order);

std::string format_fixed(double v, int digits);

}  // namespace dmd::cli

#endif  // DMD_TOOLS_SUPPORT_HPP_
