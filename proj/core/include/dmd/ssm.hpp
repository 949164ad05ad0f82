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

#ifndef DMD_SSM_HPP_
#define DMD_SSM_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dmd/scan.hpp"
#include "dmd/tensor.hpp"

namespace dmd::ssm {

// Parameters of a selective diagonal state-space recurrence.
//
// Every channel c of the d_inner-dimensional input owns an N-dimensional
// state. Per step t the input matrices are projections of the step input:
//   B_t = W_B x_t + b_B,            C_t = W_C x_t + b_C
//   B_depth,t = W_Bd z_t + b_Bd,    C_depth,t = W_Cd z_t + b_Cd
// where z_t is the depth feature vector at step t. Setting a projection
// weight to zero makes the corresponding matrix fixed (equal to its bias).
struct SsmParams {
  std::size_t state_size = 0;  // N
  std::size_t d_inner = 0;
  std::size_t depth_dim = 0;
  std::vector<double> a;     // diagonal transition, |a_n| < 1
  std::vector<double> skip;  // D, one per channel
  Matrix w_b, w_c;           // N x d_inner
  std::vector<double> b_b, b_c;
  Matrix w_bdepth, w_cdepth;  // N x depth_dim
  std::vector<double> b_bdepth, b_cdepth;

  // Throws ValidationError on inconsistent shapes, non-finite entries or
  // |a_n| >= 1.
  void validate() const;

  // Zero-filled parameters of the given shape; a is zero, so validate() passes.
  static SsmParams zeros(std::size_t state_size, std::size_t d_inner,
                         std::size_t depth_dim);
  // Seeded initialization: a uniform in [0.3, 0.9], weights scaled by
  // 1/sqrt(fan_in).
  static SsmParams random(std::size_t state_size, std::size_t d_inner,
                          std::size_t depth_dim, std::uint64_t seed);

  bool operator==(const SsmParams&) const = default;
};

// Flattened view used by gradient checks and optimizers. The order is
// a, skip, w_b, b_b, w_c, b_c, w_bdepth, b_bdepth, w_cdepth, b_cdepth.
std::vector<double> pack(const SsmParams& params);
// Overwrites the values of `params` (shapes are kept) from a packed vector.
void unpack(std::span<const double> packed, SsmParams& params);

// Per-step blend weights, one per sequence position.
struct GammaMap {
  std::vector<double> values;
};

struct ScanDiagnostics {
  // Number of gamma entries that had to be clamped into [0,1].
  std::size_t gamma_clamped = 0;
};

// Convex combination of vanilla and depth-guided matrices.
// gamma outside [0,1] is clamped and counted in `diag`.
std::pair<std::vector<double>, std::vector<double>> blend_matrices(
    std::span<const double> b, std::span<const double> b_depth,
    std::span<const double> c, std::span<const double> c_depth, double gamma,
    ScanDiagnostics* diag = nullptr);

// h_t = A h_{t-1} + B_t x_t, y_t = C_t h_t + D x_t with h_0 = 0.
// Throws NumericError naming the first step whose state is non-finite.
Sequence vanilla_scan(const Sequence& x, const SsmParams& params);

// Depth-synergized recurrence: B and C replaced per step by
// (1 - gamma_t) B_t + gamma_t B_depth,t and the same for C.
Sequence ds_scan(const Sequence& x, const Sequence& depth_feats,
                 const GammaMap& gamma, const SsmParams& params,
                 ScanDiagnostics* diag = nullptr);

// Gradients of a scalar loss L given dL/dy.
struct SsmGrads {
  Sequence dx;
  Sequence ddepth;            // empty for vanilla_scan_backward
  std::vector<double> dgamma;  // empty for vanilla_scan_backward
  SsmParams dparams;
};

SsmGrads vanilla_scan_backward(const Sequence& x, const SsmParams& params,
                               const Sequence& dy);
SsmGrads ds_scan_backward(const Sequence& x, const Sequence& depth_feats,
                          const GammaMap& gamma, const SsmParams& params,
                          const Sequence& dy);

struct PositionalEncoding {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t d_inner = 0;
  std::vector<double> frequencies;  // d_inner / 4 bands
  Matrix table;                     // (H*W) x d_inner, row-major pixels
};

// Channels [0, d/2) hold interleaved sin/cos of x * f_i, channels [d/2, d)
// the same for y; x and y are normalized to [0,1] and f_i =
// base^(-4i/d_inner).
PositionalEncoding spatial_positional_encoding(std::size_t height,
                                               std::size_t width,
                                               std::size_t d_inner,
                                               double base = 10000.0);

// Row t carries the encoding of pixel order.forward[t].
Sequence realign_pe(const PositionalEncoding& pe, const scan::ScanOrder& order);

using GammaTransform = std::function<double(double)>;

// gamma_t = transform(proximity of the pixel visited at step t), clamped to
// [0,1]; the transform is the identity by default.
GammaMap gamma_from_proximity(const scan::ProximityMap& p,
                              const scan::ScanOrder& order,
                              const GammaTransform& transform = {});

// Default depth feature [proximity, 1] per step.
Sequence depth_features(const scan::ProximityMap& p,
                        const scan::ScanOrder& order);

// One branch per scan direction: region forward, region reversed, global
// forward, global reversed.
struct DsMambaParams {
  std::array<SsmParams, 4> branches;
};

// Runs the four directional branches (positional encoding added to the
// scan-ordered input), restores each to spatial layout and sums them.
Tensor3 ds_mamba_forward(const Tensor3& x, const scan::ProximityMap& p,
                         const scan::RegionMap& regions,
                         const DsMambaParams& params,
                         const PositionalEncoding* pe,
                         const GammaTransform& transform = {});

}  // namespace dmd::ssm

#endif  // DMD_SSM_HPP_
