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

// Writes the committed test fixtures:
//   t.ppm, r.ppm, proximity.pgm, config.json   64x64 demo inputs
//   ssm_input.dmd, ssm_depth.pgm, ssm_params.json, ssm_golden.dmd
// The golden SSM output is produced by the unrolled oracle from the inputs
// as they read back from disk.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <vector>

#include "dmd/config.hpp"
#include "dmd/netpbm.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/serialize.hpp"
#include "dmd/tensor_io.hpp"
#include "dmd/verify/generators.hpp"
#include "dmd/verify/oracles.hpp"

namespace fs = std::filesystem;
using namespace dmd;

namespace {

constexpr std::size_t kSize = 64;
constexpr double kPi = 3.14159265358979323846;

Tensor3 transmission() {
  Tensor3 t(3, kSize, kSize);
  for (std::size_t y = 0; y < kSize; ++y) {
    for (std::size_t x = 0; x < kSize; ++x) {
      const double u = static_cast<double>(x) / (kSize - 1);
      const double v = static_cast<double>(y) / (kSize - 1);
      const bool tile = ((x / 8) + (y / 8)) % 2 == 0;
      t.at(0, y, x) = 0.25 + 0.5 * u;
      t.at(1, y, x) = 0.3 + 0.4 * v + (tile ? 0.1 : 0.0);
      t.at(2, y, x) = 0.5 + 0.3 * std::sin(2 * kPi * (u + v));
    }
  }
  return t;
}

Tensor3 reflection() {
  Tensor3 r(3, kSize, kSize);
  for (std::size_t y = 0; y < kSize; ++y) {
    for (std::size_t x = 0; x < kSize; ++x) {
      const double dx = static_cast<double>(x) - 20.0;
      const double dy = static_cast<double>(y) - 40.0;
      const double glow = std::exp(-(dx * dx + dy * dy) / 300.0);
      const double stripe = 0.5 + 0.5 * std::cos(static_cast<double>(x + 2 * y) / 6.0);
      r.at(0, y, x) = 0.6 * glow + 0.1 * stripe;
      r.at(1, y, x) = 0.5 * glow + 0.15 * stripe;
      r.at(2, y, x) = 0.3 * glow + 0.2 * stripe;
    }
  }
  return r;
}

Tensor3 proximity() {
  Tensor3 p(1, kSize, kSize);
  for (std::size_t y = 0; y < kSize; ++y) {
    for (std::size_t x = 0; x < kSize; ++x) {
      double v = 0.1 + 0.2 * static_cast<double>(y) / (kSize - 1);
      const double d1 = std::hypot(static_cast<double>(x) - 18.0, static_cast<double>(y) - 20.0);
      const double d2 = std::hypot(static_cast<double>(x) - 46.0, static_cast<double>(y) - 44.0);
      if (d1 < 12.0) v = 0.9 - 0.01 * d1;
      if (d2 < 9.0) v = 0.6 - 0.01 * d2;
      if (x >= 40 && y < 16) v = 0.75;
      p.at(0, y, x) = v;
    }
  }
  return p;
}

void write_demo(const fs::path& dir) {
  imaging::save_image(transmission(), dir / "t.ppm");
  imaging::save_image(reflection(), dir / "r.ppm");
  imaging::save_image(proximity(), dir / "proximity.pgm", 65535);
  RunConfig cfg;
  cfg.seed = 2024;
  io::write_json_file(io::to_json(cfg), dir / "config.json");
}

void write_ssm_golden(const fs::path& dir) {
  constexpr std::size_t kC = 4, kH = 6, kW = 7;
  Rng rng(31337);
  io::write_tensor_file(io::from_tensor(verify::gen::tensor(rng, kC, kH, kW)),
                        dir / "ssm_input.dmd");
  Tensor3 depth(1, kH, kW);
  for (double& v : depth.data()) v = static_cast<double>(rng.integer(0, 65535)) / 65535.0;
  imaging::save_image(depth, dir / "ssm_depth.pgm", 65535);
  io::write_json_file(io::to_json(verify::gen::ssm_params(rng, 3, kC, 2)),
                      dir / "ssm_params.json");

  const Tensor3 x = io::to_tensor(io::read_tensor_file(dir / "ssm_input.dmd"));
  const Tensor3 d = imaging::load_image(dir / "ssm_depth.pgm");
  const auto params = io::ssm_params_from_json(io::read_json_file(dir / "ssm_params.json"));
  const scan::ProximityMap p = scan::normalize_proximity(kH, kW, d.channel(0));
  const auto order = verify::oracle::gscan(p);
  Sequence depth_seq(order.size(), 2);
  std::vector<double> gamma(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) {
    depth_seq(t, 0) = p.values[order[t]];
    depth_seq(t, 1) = 1.0;
    gamma[t] = p.values[order[t]];
  }
  const Sequence y = verify::oracle::unrolled_ds_scan(verify::oracle::gather(x, order),
                                                      depth_seq, gamma, params);
  io::write_tensor_file(io::from_tensor(verify::oracle::scatter(y, order, kH, kW)),
                        dir / "ssm_golden.dmd");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path(DMD_FIXTURE_DIR);
  fs::create_directories(dir);
  write_demo(dir);
  write_ssm_golden(dir);
  std::cout << "fixtures written to " << dir.string() << '\n';
  return 0;
}
