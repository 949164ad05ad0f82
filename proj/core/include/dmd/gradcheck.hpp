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

#ifndef DMD_GRADCHECK_HPP_
#define DMD_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dmd {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t coordinates = 0;
  bool passed = false;
};

// Compares `gradient(x)` against central differences of `f` coordinate by
// coordinate. Relative error is |a - n| / max(|a|, |n|, 1e-8).
// Throws NumericError if either gradient contains non-finite values.
GradCheckReport finite_diff_grad_check(const ScalarFn& f,
                                       const GradientFn& gradient,
                                       std::span<const double> x, double eps,
                                       double tol);

}  // namespace dmd

#endif  // DMD_GRADCHECK_HPP_
