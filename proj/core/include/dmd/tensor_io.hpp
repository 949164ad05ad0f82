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

#ifndef DMD_TENSOR_IO_HPP_
#define DMD_TENSOR_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dmd/mecm.hpp"
#include "dmd/scan.hpp"
#include "dmd/tensor.hpp"

namespace dmd::io {

// On-disk tensor blob:
//   magic "DMD1" | element type u8 (0 = f32, 1 = u32) | rank u32 |
//   dims u32[rank] | row-major payload
// All multi-byte fields are little-endian regardless of host.
enum class ElementType : std::uint8_t { kF32 = 0, kU32 = 1 };

struct TensorFile {
  std::vector<std::uint32_t> dims;
  std::variant<std::vector<float>, std::vector<std::uint32_t>> payload;

  ElementType type() const {
    return payload.index() == 0 ? ElementType::kF32 : ElementType::kU32;
  }
  std::size_t element_count() const;

  bool operator==(const TensorFile&) const = default;
};

std::string encode_tensor(const TensorFile& tensor);
// Throws IoError on bad magic, unknown element type or truncated payload.
TensorFile decode_tensor(std::string_view bytes);

TensorFile read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const TensorFile& tensor,
                       const std::filesystem::path& path);

// Conversions. Values are narrowed to f32 on the way out.
TensorFile from_tensor(const Tensor3& x);         // rank 3, C x H x W
Tensor3 to_tensor(const TensorFile& file);        // rank 3, or rank 2 as 1 x H x W
TensorFile from_sequence(const Sequence& s);      // rank 2, L x d
Sequence to_sequence(const TensorFile& file);
TensorFile from_order(const scan::ScanOrder& o);  // rank 1, u32
scan::ScanOrder to_order(const TensorFile& file, std::size_t height,
                         std::size_t width);

// Memory banks are stored as rank-2 f32 blobs (M x C).
TensorFile dump_bank(const mecm::MemoryBank& bank);
mecm::MemoryBank restore_bank(const TensorFile& file, double update_rate);

}  // namespace dmd::io

#endif  // DMD_TENSOR_IO_HPP_
