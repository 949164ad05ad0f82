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

#include "dmd/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmd/error.hpp"

namespace dmd {

GradCheckReport finite_diff_grad_check(const ScalarFn& f,
                                       const GradientFn& gradient,
                                       std::span<const double> x, double eps,
                                       double tol) {
  if (!(eps > 0.0)) {
    throw ValidationError("finite_diff_grad_check: eps must be > 0");
  }
  const std::vector<double> analytic = gradient(x);
  if (analytic.size() != x.size()) {
    throw ValidationError("finite_diff_grad_check: gradient has size " +
                          std::to_string(analytic.size()) + ", expected " +
                          std::to_string(x.size()));
  }
  std::vector<double> probe(x.begin(), x.end());
  GradCheckReport report;
  report.coordinates = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = f(probe);
    probe[i] = saved - eps;
    const double down = f(probe);
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic[i];
    if (!std::isfinite(a) || !std::isfinite(numeric)) {
      throw NumericError("finite_diff_grad_check: non-finite gradient at "
                         "coordinate " + std::to_string(i));
    }
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    const double rel = std::abs(a - numeric) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
  }
  report.passed = report.max_rel_error <= tol;
  return report;
}

}  // namespace dmd
