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

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "dmd/error.hpp"
#include "dmd/verify/gradients.hpp"
#include "dmd/verify/suite.hpp"

namespace dmd::verify {
namespace {

TEST(Suite, AllPropertiesPassForDefaultSeed) {
  const auto results = run_suite("all", SuiteOptions{});
  EXPECT_GE(results.size(), 40u);
  std::set<std::string> suites;
  for (const auto& r : results) {
    suites.insert(r.suite);
    EXPECT_TRUE(r.passed) << r.suite << "/" << r.name << ": " << r.detail;
  }
  EXPECT_EQ(suites.size(), suite_names().size());
}

TEST(Suite, CorruptedGradientsFailOnlyGradientProperties) {
  SuiteOptions opts;
  opts.corrupt_gradients = true;
  std::size_t failed = 0;
  for (const auto& r : run_suite("ssm", opts)) {
    if (!r.passed) {
      ++failed;
      EXPECT_NE(r.name.find("gradient"), std::string::npos) << r.name;
    }
  }
  EXPECT_GT(failed, 0u);
}

TEST(Suite, Names) {
  EXPECT_TRUE(is_suite("all"));
  EXPECT_TRUE(is_suite("mecm"));
  EXPECT_FALSE(is_suite("nope"));
  EXPECT_THROW(run_suite("nope", SuiteOptions{}), ValidationError);
}

TEST(Gradients, EveryTargetPassesAndControlFails) {
  for (GradTarget t : all_grad_targets()) {
    const auto ok = check_gradients(t, 3);
    EXPECT_TRUE(ok.passed) << to_string(t) << " rel " << ok.max_rel_error;
    const auto bad = check_gradients(t, 3, true);
    EXPECT_FALSE(bad.passed) << to_string(t);
  }
}

}  // namespace
}  // namespace dmd::verify
