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

#ifndef DMD_IMAGING_HPP_
#define DMD_IMAGING_HPP_

#include <cstddef>
#include <utility>

#include "dmd/random.hpp"
#include "dmd/tensor.hpp"

namespace dmd::imaging {

inline constexpr double kPsnrCapDb = 99.0;
inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

// Admissible blend coefficients for synthesis.
struct BlendRanges {
  double alpha_min = 0.8;
  double alpha_max = 1.0;
  double beta_min = 0.4;
  double beta_max = 1.0;

  void validate() const;
  bool operator==(const BlendRanges&) const = default;
};

struct BlendResult {
  Tensor3 image;
  std::size_t clamped = 0;  // entries pulled back into [0,1]
};

// I = alpha * T + beta * R - T o R, clamped to [0,1].
BlendResult blend(const Tensor3& t, const Tensor3& r, double alpha,
                  double beta, const BlendRanges& ranges = {});

std::pair<double, double> sample_coefficients(Rng& rng,
                                              const BlendRanges& ranges = {});

double mse(const Tensor3& a, const Tensor3& b);

// 10 log10(peak^2 / MSE) over all channels; `cap` when the images match.
double psnr(const Tensor3& a, const Tensor3& b, double peak = 1.0,
            double cap = kPsnrCapDb);

// Channel mean for 3-channel images; 1-channel images are returned as is.
Tensor3 to_grayscale(const Tensor3& image);

// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01,
// K2 0.03, L 1) of the grayscale images.
double ssim(const Tensor3& a, const Tensor3& b);

}  // namespace dmd::imaging

#endif  // DMD_IMAGING_HPP_
