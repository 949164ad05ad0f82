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

#ifndef DMD_VERIFY_GRADIENTS_HPP_
#define DMD_VERIFY_GRADIENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dmd/gradcheck.hpp"

namespace dmd::verify {

inline constexpr double kGradEps = 1e-4;
inline constexpr double kGradTol = 1e-3;

// Seeded gradient-check cases. Each builds a random instance, reduces the
// output to a scalar with a fixed random cotangent, and compares the
// analytic backward pass against central differences. `corrupt` scales the
// analytic gradient by 1.1 (negative control).
enum class GradTarget {
  kVanillaScan,
  kDsScan,
  kLoadLoss,
  kMemoryMatchingLoss,
  kAppearanceLoss,
  kTotalLoss,
  kGpAdjust,
  kScRefine,
};

const char* to_string(GradTarget target);
std::vector<GradTarget> all_grad_targets();

GradCheckReport check_gradients(GradTarget target, std::uint64_t seed,
                                bool corrupt = false);

}  // namespace dmd::verify

#endif  // DMD_VERIFY_GRADIENTS_HPP_
