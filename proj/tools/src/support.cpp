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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dmd/error.hpp"
#include "dmd/imaging.hpp"
#include "dmd/netpbm.hpp"
#include "dmd/tensor_io.hpp"

namespace dmd::cli {

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::uint64_t fallback) {
  if (flag) return *flag;
  const char* env = std::getenv("DMD_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || env[0] == '-') {
    throw ValidationError(std::string("DMD_SEED is not an unsigned integer: ") +
                          env);
  }
  return v;
}

bool is_image_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

Tensor3 load_tensor(const std::filesystem::path& path) {
  if (is_image_path(path)) return imaging::load_image(path);
  return io::to_tensor(io::read_tensor_file(path));
}

scan::ProximityMap load_proximity(const std::filesystem::path& path) {
  Tensor3 t = load_tensor(path);
  if (t.channels() == 3) t = imaging::to_grayscale(t);
  if (t.channels() != 1) {
    throw ValidationError(path.string() + ": proximity map must have one channel");
  }
  return scan::normalize_proximity(t.height(), t.width(), t.channel(0));
}

Tensor3 order_visualization(const scan::ScanOrder& order) {
  Tensor3 img(3, order.height, order.width);
  const double n = static_cast<double>(order.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double hue = 6.0 * static_cast<double>(rank) / n;  // sextant units
    const double f = hue - std::floor(hue);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hue) % 6) {
      case 0: r = 1; g = f; break;
      case 1: r = 1 - f; g = 1; break;
      case 2: g = 1; b = f; break;
      case 3: g = 1 - f; b = 1; break;
      case 4: r = f; b = 1; break;
      default: r = 1; b = 1 - f; break;
    }
    const std::size_t px = order.forward[rank];
    img.at(0, px) = r;
    img.at(1, px) = g;
    img.at(2, px) = b;
  }
  return img;
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace dmd::cli
