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

#ifndef DMD_NETPBM_HPP_
#define DMD_NETPBM_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "dmd/tensor.hpp"

namespace dmd::imaging {

// Binary PGM (P5) and PPM (P6), maxval up to 65535. Samples wider than a
// byte are big-endian. Values are mapped linearly to [0,1].
struct DecodedImage {
  Tensor3 image;
  int maxval = 255;
};

DecodedImage decode_netpbm(std::string_view bytes);

// 1-channel tensors become P5, 3-channel tensors P6. Values are clamped to
// [0,1] and rounded to the nearest level.
std::string encode_netpbm(const Tensor3& image, int maxval = 255);

Tensor3 load_image(const std::filesystem::path& path, int* maxval = nullptr);
void save_image(const Tensor3& image, const std::filesystem::path& path,
                int maxval = 255);

}  // namespace dmd::imaging

#endif  // DMD_NETPBM_HPP_
