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

#include "dmd/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dmd/error.hpp"

namespace dmd::imaging {
namespace {

void require_same(const Tensor3& a, const Tensor3& b, const char* who) {
  if (!a.same_shape(b) || a.size() == 0) {
    throw ValidationError(std::string(who) + ": image shapes do not match");
  }
}

std::vector<double> gaussian_window() {
  std::vector<double> w(kSsimWindow * kSsimWindow);
  const double center = (kSsimWindow - 1) / 2.0;
  double total = 0.0;
  for (std::size_t y = 0; y < kSsimWindow; ++y) {
    for (std::size_t x = 0; x < kSsimWindow; ++x) {
      const double dy = static_cast<double>(y) - center;
      const double dx = static_cast<double>(x) - center;
      const double v = std::exp(-(dx * dx + dy * dy) /
                                (2.0 * kSsimSigma * kSsimSigma));
      w[y * kSsimWindow + x] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

void BlendRanges::validate() const {
  const double all[] = {alpha_min, alpha_max, beta_min, beta_max};
  for (double v : all) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("blend ranges must be finite and >= 0");
    }
  }
  if (alpha_min > alpha_max || beta_min > beta_max) {
    throw ValidationError("blend ranges must satisfy min <= max");
  }
}

BlendResult blend(const Tensor3& t, const Tensor3& r, double alpha,
                  double beta, const BlendRanges& ranges) {
  ranges.validate();
  require_same(t, r, "blend");
  if (alpha < ranges.alpha_min || alpha > ranges.alpha_max) {
    throw ValidationError("blend: alpha " + std::to_string(alpha) +
                          " outside configured range");
  }
  if (beta < ranges.beta_min || beta > ranges.beta_max) {
    throw ValidationError("blend: beta " + std::to_string(beta) +
                          " outside configured range");
  }
  BlendResult out{Tensor3(t.channels(), t.height(), t.width()), 0};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double tv = t.data()[i];
    const double rv = r.data()[i];
    double v = alpha * tv + beta * rv - tv * rv;
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++out.clamped;
    }
    out.image.data()[i] = v;
  }
  return out;
}

std::pair<double, double> sample_coefficients(Rng& rng,
                                              const BlendRanges& ranges) {
  ranges.validate();
  const double alpha = rng.uniform(ranges.alpha_min, ranges.alpha_max);
  const double beta = rng.uniform(ranges.beta_min, ranges.beta_max);
  return {alpha, beta};
}

double mse(const Tensor3& a, const Tensor3& b) {
  require_same(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double psnr(const Tensor3& a, const Tensor3& b, double peak, double cap) {
  const double err = mse(a, b);
  if (err == 0.0) return cap;
  return std::min(cap, 10.0 * std::log10(peak * peak / err));
}

Tensor3 to_grayscale(const Tensor3& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3) {
    throw ValidationError("to_grayscale: expected 1 or 3 channels");
  }
  Tensor3 out(1, image.height(), image.width());
  for (std::size_t p = 0; p < image.pixels(); ++p) {
    out.at(0, p) =
        (image.at(0, p) + image.at(1, p) + image.at(2, p)) / 3.0;
  }
  return out;
}

double ssim(const Tensor3& a, const Tensor3& b) {
  require_same(a, b, "ssim");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw ValidationError("ssim: image smaller than the 11x11 window");
  }
  const Tensor3 ga = to_grayscale(a);
  const Tensor3 gb = to_grayscale(b);
  static const std::vector<double> window = gaussian_window();
  const double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  const double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);

  const std::size_t out_h = a.height() - kSsimWindow + 1;
  const std::size_t out_w = a.width() - kSsimWindow + 1;
  double total = 0.0;
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
      for (std::size_t wy = 0; wy < kSsimWindow; ++wy) {
        for (std::size_t wx = 0; wx < kSsimWindow; ++wx) {
          const double w = window[wy * kSsimWindow + wx];
          const double va = ga.at(0, y + wy, x + wx);
          const double vb = gb.at(0, y + wy, x + wx);
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
  }
  return total / static_cast<double>(out_h * out_w);
}

}  // namespace dmd::imaging
