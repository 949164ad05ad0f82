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

#ifndef DMD_CONFIG_HPP_
#define DMD_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dmd/imaging.hpp"
#include "dmd/loss.hpp"
#include "dmd/mecm.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"

namespace dmd {

// How gamma is derived from the proximity value visited at each step.
struct GammaConfig {
  enum class Transform { kIdentity, kPower, kConstant };
  Transform transform = Transform::kIdentity;
  double exponent = 1.0;  // kPower: gamma = p^exponent
  double value = 0.0;     // kConstant: gamma = value

  ssm::GammaTransform make() const;
  bool operator==(const GammaConfig&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;

  scan::PartitionOptions partition;

  std::size_t state_size = 4;
  std::size_t d_inner = 16;
  double pe_base = 10000.0;
  // Optional explicit diagonal transition (size state_size).
  std::vector<double> a_init;
  GammaConfig gamma;

  std::size_t num_experts = mecm::kDefaultExperts;
  std::size_t selected_experts = mecm::kDefaultSelectedExperts;
  std::size_t memory_items = mecm::kDefaultMemoryItems;
  std::size_t retrieval_topk = mecm::kDefaultRetrievalTopK;
  double update_rate = mecm::kDefaultUpdateRate;
  bool evolve = false;
  bool mecm_residual = true;

  imaging::BlendRanges blend;
  loss::LossWeights loss;

  // Decoder channel widths of the full network; recorded for reference,
  // toy runs use d_inner.
  std::vector<std::size_t> channels = {48, 96, 192, 384, 768};

  // Throws ValidationError naming the first violated constraint.
  void validate() const;
};

}  // namespace dmd

#endif  // DMD_CONFIG_HPP_
