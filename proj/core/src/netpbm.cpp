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

#include "dmd/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dmd/error.hpp"

namespace dmd::imaging {
namespace {

// Header tokens are separated by whitespace; '#' starts a comment running to
// the end of the line.
class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  long next_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) {
        throw IoError(std::string("netpbm: ") + what + " too large");
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw IoError(std::string("netpbm: malformed header, expected ") + what);
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() ||
        !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("netpbm: malformed header, missing raster separator");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;  // past the magic
};

}  // namespace

DecodedImage decode_netpbm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '5' && bytes[1] != '6')) {
    throw IoError("netpbm: unsupported magic (expected P5 or P6)");
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader header(bytes);
  const long width = header.next_number("width");
  const long height = header.next_number("height");
  const long maxval = header.next_number("maxval");
  if (width < 1 || height < 1) {
    throw IoError("netpbm: image dimensions must be positive");
  }
  if (maxval < 1 || maxval > 65535) {
    throw IoError("netpbm: maxval must be in [1, 65535]");
  }
  const std::size_t offset = header.raster_offset();
  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(height);
  const std::size_t needed = w * h * channels * sample_bytes;
  if (bytes.size() - offset < needed) {
    throw IoError("netpbm: truncated payload (" +
                  std::to_string(bytes.size() - offset) + " of " +
                  std::to_string(needed) + " bytes)");
  }

  DecodedImage out{Tensor3(channels, h, w), static_cast<int>(maxval)};
  const auto* raster =
      reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t p = 0; p < w * h; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t i = (p * channels + c) * sample_bytes;
      const unsigned sample =
          sample_bytes == 1 ? raster[i]
                            : (static_cast<unsigned>(raster[i]) << 8) |
                                  raster[i + 1];
      if (sample > static_cast<unsigned>(maxval)) {
        throw IoError("netpbm: sample exceeds maxval");
      }
      out.image.at(c, p) =
          static_cast<double>(sample) / static_cast<double>(maxval);
    }
  }
  return out;
}

std::string encode_netpbm(const Tensor3& image, int maxval) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ValidationError("netpbm: only 1- or 3-channel images are supported");
  }
  if (maxval < 1 || maxval > 65535) {
    throw ValidationError("netpbm: maxval must be in [1, 65535]");
  }
  if (image.pixels() == 0) throw ValidationError("netpbm: empty image");
  std::ostringstream header;
  header << (image.channels() == 1 ? "P5" : "P6") << '\n'
         << image.width() << ' ' << image.height() << '\n'
         << maxval << '\n';
  std::string out = header.str();
  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  out.reserve(out.size() + image.size() * sample_bytes);
  for (std::size_t p = 0; p < image.pixels(); ++p) {
    for (std::size_t c = 0; c < image.channels(); ++c) {
      const double v = std::clamp(image.at(c, p), 0.0, 1.0);
      const auto sample =
          static_cast<unsigned>(std::lround(v * static_cast<double>(maxval)));
      if (sample_bytes == 2) out.push_back(static_cast<char>(sample >> 8));
      out.push_back(static_cast<char>(sample & 0xFF));
    }
  }
  return out;
}

Tensor3 load_image(const std::filesystem::path& path, int* maxval) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    DecodedImage decoded = decode_netpbm(bytes);
    if (maxval != nullptr) *maxval = decoded.maxval;
    return std::move(decoded.image);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_image(const Tensor3& image, const std::filesystem::path& path,
                int maxval) {
  const std::string bytes = encode_netpbm(image, maxval);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing image " + path.string());
}

}  // namespace dmd::imaging
