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

#include <nlohmann/json.hpp>

#include "dmd/config.hpp"
#include "dmd/error.hpp"
#include "dmd/serialize.hpp"
#include "dmd/ssm.hpp"

namespace dmd {
namespace {

using nlohmann::json;

TEST(RunConfig, Defaults) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.num_experts, 4u);
  EXPECT_EQ(c.selected_experts, 2u);
  EXPECT_EQ(c.d_inner, 16u);
  EXPECT_EQ(c.channels, (std::vector<std::size_t>{48, 96, 192, 384, 768}));
  EXPECT_EQ(c.loss, loss::LossWeights{});
  EXPECT_FALSE(c.evolve);
}

TEST(RunConfig, EmptyJsonGivesDefaults) {
  const RunConfig c = io::run_config_from_json(json::object());
  EXPECT_EQ(c.num_experts, 4u);
  EXPECT_EQ(c.selected_experts, 2u);
  EXPECT_EQ(c.seed, 1u);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.seed = 99;
  c.a_init = {0.1, -0.2, 0.3, 0.4};
  c.gamma.transform = GammaConfig::Transform::kPower;
  c.gamma.exponent = 2.0;
  c.evolve = true;
  c.blend.alpha_min = 0.85;
  const RunConfig back = io::run_config_from_json(io::to_json(c));
  EXPECT_EQ(io::to_json(back), io::to_json(c));
  EXPECT_EQ(back.a_init, c.a_init);
  EXPECT_EQ(back.gamma, c.gamma);
}

TEST(RunConfig, RejectsInvalidValues) {
  const auto rejects = [](const char* text) {
    EXPECT_THROW(io::run_config_from_json(json::parse(text)), ValidationError) << text;
  };
  rejects(R"({"mecm": {"num_experts": 2, "selected_experts": 3}})");
  rejects(R"({"mecm": {"selected_experts": 0}})");
  rejects(R"({"mecm": {"memory_items": 2, "retrieval_topk": 3}})");
  rejects(R"({"mecm": {"update_rate": 0}})");
  rejects(R"({"ssm": {"gamma": {"transform": "constant", "value": 1.5}}})");
  rejects(R"({"ssm": {"gamma": {"transform": "sigmoid"}}})");
  rejects(R"({"ssm": {"a_init": [0.5, 1.0, 0.1, 0.2]}})");
  rejects(R"({"ssm": {"a_init": [0.5]}})");
  rejects(R"({"ssm": {"d_inner": 6}})");
  rejects(R"({"scan": {"bins": 0}})");
  rejects(R"({"scan": {"min_area_frac": 1.0}})");
  rejects(R"({"loss": {"vgg_t": -0.1}})");
  rejects(R"({"seed": -3})");
  rejects(R"({"unknown": 1})");
  rejects(R"({"channels": [48, 0]})");
  rejects(R"([1, 2])");
}

TEST(GammaConfig, Transforms) {
  GammaConfig g;
  EXPECT_FALSE(static_cast<bool>(g.make()));
  g.transform = GammaConfig::Transform::kPower;
  g.exponent = 2.0;
  EXPECT_DOUBLE_EQ(g.make()(0.5), 0.25);
  g.transform = GammaConfig::Transform::kConstant;
  g.value = 0.7;
  EXPECT_EQ(g.make()(0.1), 0.7);
}

TEST(SsmParamsJson, RoundTrip) {
  const auto p = ssm::SsmParams::random(3, 4, 2, 5);
  EXPECT_EQ(io::ssm_params_from_json(io::to_json(p)), p);
}

TEST(SsmParamsJson, RejectsUnstableTransition) {
  json j = io::to_json(ssm::SsmParams::random(2, 4, 2, 5));
  j["A"] = {0.5, -1.0};
  EXPECT_THROW(io::ssm_params_from_json(j), ValidationError);
}

}  // namespace
}  // namespace dmd
