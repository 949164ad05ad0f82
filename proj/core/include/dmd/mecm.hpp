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

#ifndef DMD_MECM_HPP_
#define DMD_MECM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmd/tensor.hpp"

namespace dmd::mecm {

inline constexpr std::size_t kDefaultExperts = 4;
inline constexpr std::size_t kDefaultSelectedExperts = 2;
inline constexpr std::size_t kDefaultMemoryItems = 16;
inline constexpr std::size_t kDefaultRetrievalTopK = 4;
inline constexpr double kDefaultUpdateRate = 0.5;

// M x C bank of memory items. Rows are unit-norm after every evolution.
struct MemoryBank {
  Matrix items;
  double update_rate = kDefaultUpdateRate;

  std::size_t size() const { return items.rows(); }
  std::size_t channels() const { return items.cols(); }
  void validate() const;

  // Seeded unit-norm random rows.
  static MemoryBank random(std::size_t items, std::size_t channels,
                           std::uint64_t seed,
                           double update_rate = kDefaultUpdateRate);

  bool operator==(const MemoryBank&) const = default;
};

struct LinearMap {
  Matrix weights;  // out x in
  std::vector<double> bias;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }
  std::vector<double> apply(std::span<const double> v) const;

  bool operator==(const LinearMap&) const = default;
};

// Zero-padded 3x3 convolution, weights laid out [out][in][ky][kx].
struct Conv3x3 {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double& w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) {
    return weights[((o * in_channels + i) * 3 + ky) * 3 + kx];
  }
  double w(std::size_t o, std::size_t i, std::size_t ky, std::size_t kx) const {
    return weights[((o * in_channels + i) * 3 + ky) * 3 + kx];
  }
  void validate() const;

  bool operator==(const Conv3x3&) const = default;
};

Tensor3 conv3x3(const Tensor3& x, const Conv3x3& conv);

struct GateParams {
  Matrix weights;  // N_Exp x C
  std::vector<double> bias;

  std::size_t experts() const { return weights.rows(); }
  void validate() const;
  static GateParams random(std::size_t experts, std::size_t channels,
                           std::uint64_t seed);

  bool operator==(const GateParams&) const = default;
};

struct ExpertRoute {
  std::vector<std::size_t> selected;  // descending logit, ties lower index
  std::vector<double> weights;        // softmax over the selected logits
  std::vector<double> full_weights;   // softmax over all experts
  std::vector<double> logits;
};

struct ExpertParams {
  MemoryBank memory;
  LinearMap mask_proj;  // 2C -> C
  Conv3x3 fusion;       // 2C -> C
  std::size_t topk = kDefaultRetrievalTopK;

  std::size_t channels() const { return memory.channels(); }
  void validate() const;
  static ExpertParams random(std::size_t channels, std::size_t memory_items,
                             std::size_t topk, std::uint64_t seed,
                             double update_rate = kDefaultUpdateRate);

  bool operator==(const ExpertParams&) const = default;
};

// Pooled features -> linear logits -> softmax; keeps the k largest logits
// and renormalizes them with a softmax over the selected logits.
ExpertRoute gate_route(const Tensor3& features, const GateParams& gate,
                       std::size_t num_experts, std::size_t k);

struct GpResult {
  std::vector<Tensor3> outputs;  // O_G per image
  Matrix pooled;                 // I_G, B x C
  Matrix similarity;             // S, B x M
  Matrix match_image;            // S_I, softmax over memory items
  Matrix match_memory;           // S_M, softmax over images
  Matrix memory_response;        // F_M, B x C
  Matrix mask;                   // B x C, in (0,1)
};

// Global-pattern adjustment over a batch of images sharing one bank.
GpResult gp_adjust(std::span<const Tensor3> batch, const MemoryBank& bank,
                   const LinearMap& mask_proj);

struct GpGrads {
  Tensor3 d_input;
  Matrix d_memory;
  LinearMap d_mask_proj;
};

// Gradient of a scalar loss through O_G of a single image.
GpGrads gp_adjust_backward(const Tensor3& image, const MemoryBank& bank,
                           const LinearMap& mask_proj, const Tensor3& d_out);

struct MemoryIncrement {
  Matrix delta;                       // M x C, before the residual update
  std::vector<std::size_t> best_item;  // j_b per image
};

// U_b = S_M[b, j_b] * I_G[b] with j_b = argmax_m S_I[b, m], summed per item.
MemoryIncrement memory_increment(const MemoryBank& bank, const Matrix& pooled,
                                 const Matrix& match_image,
                                 const Matrix& match_memory);

// items <- row-normalize(items + update_rate * delta).
MemoryBank memory_evolve(const MemoryBank& bank, const Matrix& pooled,
                         const Matrix& match_image, const Matrix& match_memory);

struct ScResult {
  Tensor3 output;                         // O_S, C x H x W
  std::vector<std::size_t> top_indices;   // pixel-major, K per pixel
  std::vector<double> attention;          // W_A, pixel-major, K per pixel
};

// Per-pixel top-k retrieval over 1x1 memory kernels, softmax-weighted sum of
// the retrieved items.
ScResult sc_refine(const Tensor3& image, const MemoryBank& bank,
                   std::size_t k);

struct ScGrads {
  Tensor3 d_input;
  Matrix d_memory;
};

// Gradient through the softmax weights for a fixed top-k selection.
ScGrads sc_refine_backward(const Tensor3& image, const MemoryBank& bank,
                           std::size_t k, const Tensor3& d_out);

struct ExpertOutput {
  Tensor3 output;
  Tensor3 global;   // O_G
  Tensor3 spatial;  // O_S
  std::optional<ExpertParams> evolved;
};

ExpertOutput expert_forward(const Tensor3& image, const ExpertParams& expert,
                            bool evolve);

// Weighted sum of expert outputs. Not renormalized.
Tensor3 mix_experts(std::span<const Tensor3> outputs,
                    std::span<const double> weights);

struct MecmResult {
  Tensor3 output;
  ExpertRoute route;
  // Full expert list with the selected experts evolved; empty unless
  // evolution was requested.
  std::vector<ExpertParams> experts;
};

MecmResult mecm_forward(const Tensor3& image,
                        std::span<const ExpertParams> experts,
                        const GateParams& gate, std::size_t k, bool evolve);

}  // namespace dmd::mecm

#endif  // DMD_MECM_HPP_
