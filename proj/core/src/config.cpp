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

#include "dmd/config.hpp"

#include <cmath>
#include <string>

#include "dmd/error.hpp"

namespace dmd {

ssm::GammaTransform GammaConfig::make() const {
  switch (transform) {
    case Transform::kIdentity:
      return {};
    case Transform::kPower: {
      const double e = exponent;
      return [e](double p) { return std::pow(p, e); };
    }
    case Transform::kConstant: {
      const double v = value;
      return [v](double) { return v; };
    }
  }
  return {};
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ValidationError("invalid config: " + what);
  };
  if (partition.bins < 1) fail("scan.bins must be >= 1");
  if (!(partition.min_area_frac >= 0.0 && partition.min_area_frac < 1.0)) {
    fail("scan.min_area_frac must be in [0,1)");
  }
  if (state_size < 1) fail("ssm.state_size must be >= 1");
  if (d_inner < 4 || d_inner % 4 != 0) {
    fail("ssm.d_inner must be a positive multiple of 4");
  }
  if (!(pe_base > 1.0) || !std::isfinite(pe_base)) {
    fail("ssm.pe_base must be > 1");
  }
  if (!a_init.empty()) {
    if (a_init.size() != state_size) {
      fail("ssm.a_init must have state_size entries");
    }
    for (std::size_t n = 0; n < a_init.size(); ++n) {
      if (!(std::abs(a_init[n]) < 1.0)) {
        fail("ssm.a_init[" + std::to_string(n) + "] must satisfy |A| < 1");
      }
    }
  }
  if (gamma.transform == GammaConfig::Transform::kConstant &&
      !(gamma.value >= 0.0 && gamma.value <= 1.0)) {
    fail("ssm.gamma.value must be in [0,1]");
  }
  if (gamma.transform == GammaConfig::Transform::kPower &&
      !(gamma.exponent > 0.0 && std::isfinite(gamma.exponent))) {
    fail("ssm.gamma.exponent must be > 0");
  }
  if (num_experts < 1) fail("mecm.num_experts must be >= 1");
  if (selected_experts < 1 || selected_experts > num_experts) {
    fail("mecm.selected_experts (K=" + std::to_string(selected_experts) +
         ") must be in [1, num_experts=" + std::to_string(num_experts) + "]");
  }
  if (memory_items < 1) fail("mecm.memory_items must be >= 1");
  if (retrieval_topk < 1 || retrieval_topk > memory_items) {
    fail("mecm.retrieval_topk must be in [1, memory_items]");
  }
  if (!(update_rate > 0.0 && update_rate <= 1.0)) {
    fail("mecm.update_rate must be in (0,1]");
  }
  try {
    blend.validate();
    loss.validate();
  } catch (const ValidationError& e) {
    fail(e.what());
  }
  if (channels.empty()) fail("channels must not be empty");
  for (std::size_t c : channels) {
    if (c == 0) fail("channels entries must be positive");
  }
}

}  // namespace dmd
