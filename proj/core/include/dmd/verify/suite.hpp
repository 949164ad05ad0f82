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

#ifndef DMD_VERIFY_SUITE_HPP_
#define DMD_VERIFY_SUITE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dmd::verify {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  bool corrupt_gradients = false;
};

// "all", "scan", "ssm", "mecm", "loss" or "imaging".
std::vector<std::string> suite_names();
bool is_suite(std::string_view name);

// Runs every property of the named suite. Throws ValidationError for an
// unknown suite name.
std::vector<PropertyResult> run_suite(std::string_view name,
                                      const SuiteOptions& options);

}  // namespace dmd::verify

#endif  // DMD_VERIFY_SUITE_HPP_
