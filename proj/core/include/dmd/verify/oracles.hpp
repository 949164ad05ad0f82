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

#ifndef DMD_VERIFY_ORACLES_HPP_
#define DMD_VERIFY_ORACLES_HPP_

// Brute-force reference implementations. Nothing in here calls into the
// implementation paths it is used to check; each routine recomputes its
// result from the defining formula with a deliberately different algorithm
// (flood fill instead of union-find, dense matrix unrolling instead of the
// diagonal recurrence, repeated argmax instead of partial sort, ...).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dmd/mecm.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"
#include "dmd/tensor.hpp"

namespace dmd::verify::oracle {

// --- scan ----------------------------------------------------------------

struct Partition {
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> areas;
};

// Explicit-stack flood fill per quantization bin, area filter, then
// relabeling by (descending area, ascending first pixel).
Partition flood_fill_partition(const scan::ProximityMap& p, int bins,
                               double min_area_frac);

// Sort of (-value, index) keys over the given pixel subset.
std::vector<std::uint32_t> near_to_far(std::span<const double> values,
                                       std::vector<std::uint32_t> subset);

std::vector<std::uint32_t> gscan(const scan::ProximityMap& p);
std::vector<std::uint32_t> rscan(const scan::ProximityMap& p,
                                 std::span<const std::int32_t> labels);

Sequence gather(const Tensor3& x, std::span<const std::uint32_t> order);
Tensor3 scatter(const Sequence& s, std::span<const std::uint32_t> order,
                std::size_t height, std::size_t width);

// --- ssm -----------------------------------------------------------------

// Materializes every state h_t as an N x d matrix and runs the blended
// recurrence with dense Eigen products.
Sequence unrolled_ds_scan(const Sequence& x, const Sequence& depth,
                          std::span<const double> gamma,
                          const ssm::SsmParams& params);
Sequence unrolled_vanilla_scan(const Sequence& x, const ssm::SsmParams& params);

double pe_entry(std::size_t height, std::size_t width, std::size_t d_inner,
                double base, std::size_t y, std::size_t x, std::size_t ch);

// --- mecm ----------------------------------------------------------------

std::vector<double> softmax(std::span<const double> v);

// Per-pixel scalar loop of the top-k weighted sum.
Tensor3 sc_refine(const Tensor3& image, const Matrix& memory, std::size_t k);

// Scalar accumulation of the memory increment.
Matrix memory_increment(const Matrix& pooled, const Matrix& match_image,
                        const Matrix& match_memory, std::size_t items);

struct GpReference {
  Tensor3 output;
  std::vector<double> match_image;
  std::vector<double> response;
};
GpReference gp_adjust(const Tensor3& image, const Matrix& memory,
                      const mecm::LinearMap& mask_proj);

// Zero-padded direct convolution on an explicitly padded copy.
Tensor3 conv3x3(const Tensor3& x, const mecm::Conv3x3& conv);

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k);

// --- loss ----------------------------------------------------------------

// (sigma / (mu + eps))^2 with sigma computed as a square root.
double coefficient_of_variation_sq(std::span<const double> row, double eps);

}  // namespace dmd::verify::oracle

#endif  // DMD_VERIFY_ORACLES_HPP_
