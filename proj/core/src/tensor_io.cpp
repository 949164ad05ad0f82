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

#include "dmd/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dmd/error.hpp"

namespace dmd::io {
namespace {

constexpr char kMagic[4] = {'D', 'M', 'D', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::size_t product(const std::vector<std::uint32_t>& dims) {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

std::vector<float> narrow(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

const std::vector<float>& floats(const TensorFile& f, const char* who) {
  if (f.type() != ElementType::kF32) {
    throw IoError(std::string(who) + ": expected an f32 tensor");
  }
  return std::get<std::vector<float>>(f.payload);
}

std::uint32_t checked_dim(std::size_t v) {
  if (v > 0xFFFFFFFFu) throw ValidationError("tensor dimension exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::size_t TensorFile::element_count() const {
  return std::visit([](const auto& v) { return v.size(); }, payload);
}

std::string encode_tensor(const TensorFile& tensor) {
  if (product(tensor.dims) != tensor.element_count()) {
    throw ValidationError("encode_tensor: payload length does not match dims");
  }
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(tensor.type()));
  put_u32(out, checked_dim(tensor.dims.size()));
  for (std::uint32_t d : tensor.dims) put_u32(out, d);
  std::visit(
      [&out](const auto& values) {
        for (const auto v : values) {
          put_u32(out, std::bit_cast<std::uint32_t>(v));
        }
      },
      tensor.payload);
  return out;
}

TensorFile decode_tensor(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 9 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw IoError("tensor file: bad magic or truncated header");
  }
  const std::uint8_t type = p[4];
  if (type > 1) {
    throw IoError("tensor file: unknown element type " + std::to_string(type));
  }
  const std::uint32_t rank = get_u32(p + 5);
  std::size_t offset = 9;
  if (bytes.size() < offset + 4ull * rank) {
    throw IoError("tensor file: truncated dimension list");
  }
  TensorFile out;
  out.dims.resize(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    out.dims[i] = get_u32(p + offset);
    offset += 4;
  }
  const std::size_t count = product(out.dims);
  if ((bytes.size() - offset) / 4 < count) {
    throw IoError("tensor file: truncated payload (" +
                  std::to_string(bytes.size() - offset) + " of " +
                  std::to_string(count * 4) + " bytes)");
  }
  if (bytes.size() - offset != count * 4) {
    throw IoError("tensor file: trailing bytes after payload");
  }
  if (type == static_cast<std::uint8_t>(ElementType::kF32)) {
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = std::bit_cast<float>(get_u32(p + offset + 4 * i));
    }
    out.payload = std::move(values);
  } else {
    std::vector<std::uint32_t> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = get_u32(p + offset + 4 * i);
    }
    out.payload = std::move(values);
  }
  return out;
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_tensor_file(const TensorFile& tensor,
                       const std::filesystem::path& path) {
  const std::string bytes = encode_tensor(tensor);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write tensor file " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing tensor file " + path.string());
}

TensorFile from_tensor(const Tensor3& x) {
  return {{checked_dim(x.channels()), checked_dim(x.height()),
           checked_dim(x.width())},
          narrow(x.data())};
}

Tensor3 to_tensor(const TensorFile& file) {
  const auto& v = floats(file, "to_tensor");
  std::vector<double> data(v.begin(), v.end());
  if (file.dims.size() == 3) {
    return Tensor3(file.dims[0], file.dims[1], file.dims[2], std::move(data));
  }
  if (file.dims.size() == 2) {
    return Tensor3(1, file.dims[0], file.dims[1], std::move(data));
  }
  throw IoError("to_tensor: expected rank 2 or 3, got rank " +
                std::to_string(file.dims.size()));
}

TensorFile from_sequence(const Sequence& s) {
  return {{checked_dim(s.rows()), checked_dim(s.cols())}, narrow(s.data())};
}

Sequence to_sequence(const TensorFile& file) {
  const auto& v = floats(file, "to_sequence");
  if (file.dims.size() != 2) {
    throw IoError("to_sequence: expected rank 2, got rank " +
                  std::to_string(file.dims.size()));
  }
  return Sequence(file.dims[0], file.dims[1],
                  std::vector<double>(v.begin(), v.end()));
}

TensorFile from_order(const scan::ScanOrder& o) {
  return {{checked_dim(o.size())}, o.forward};
}

scan::ScanOrder to_order(const TensorFile& file, std::size_t height,
                         std::size_t width) {
  if (file.type() != ElementType::kU32 || file.dims.size() != 1) {
    throw IoError("scan order file must be a rank-1 u32 tensor");
  }
  scan::ScanOrder o{height, width,
                    std::get<std::vector<std::uint32_t>>(file.payload),
                    scan::ScanMode::kIdentity};
  scan::validate_order(o);
  return o;
}

TensorFile dump_bank(const mecm::MemoryBank& bank) {
  return {{checked_dim(bank.size()), checked_dim(bank.channels())},
          narrow(bank.items.data())};
}

mecm::MemoryBank restore_bank(const TensorFile& file, double update_rate) {
  const auto& v = floats(file, "restore_bank");
  if (file.dims.size() != 2) {
    throw IoError("memory bank blob must be rank 2 (M x C)");
  }
  mecm::MemoryBank bank{
      Matrix(file.dims[0], file.dims[1], std::vector<double>(v.begin(), v.end())),
      update_rate};
  bank.validate();
  return bank;
}

}  // namespace dmd::io
