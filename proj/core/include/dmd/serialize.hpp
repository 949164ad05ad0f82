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

#ifndef DMD_SERIALIZE_HPP_
#define DMD_SERIALIZE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmd/config.hpp"
#include "dmd/loss.hpp"
#include "dmd/mecm.hpp"
#include "dmd/ssm.hpp"

namespace dmd::io {

using nlohmann::json;

// Parsing throws ValidationError for schema violations (missing or mistyped
// keys, unknown keys, bad shapes) and IoError for unreadable files or
// malformed JSON text.

json to_json(const ssm::SsmParams& params);
ssm::SsmParams ssm_params_from_json(const json& j);

json to_json(const loss::LossWeights& weights);
// Keys not present keep their default values.
loss::LossWeights loss_weights_from_json(const json& j);

json to_json(const RunConfig& config);
// Overrides defaults with whatever keys are present, then validates.
RunConfig run_config_from_json(const json& j);

struct GateFile {
  mecm::GateParams params;
  std::size_t k = mecm::kDefaultSelectedExperts;
};
json to_json(const GateFile& gate);
GateFile gate_from_json(const json& j);

// Experts reference their memory bank and fusion kernel as tensor blobs
// stored next to the JSON file.
struct ExpertFile {
  mecm::ExpertParams params;
  std::filesystem::path memory_blob;  // relative to the JSON directory
  std::filesystem::path fusion_blob;
};

std::vector<ExpertFile> load_experts(const std::filesystem::path& json_path);
// Writes the JSON plus one memory and one fusion blob per expert.
void save_experts(const std::vector<ExpertFile>& experts,
                  const std::filesystem::path& json_path);
// Rewrites only the memory blobs.
void save_expert_memories(const std::vector<ExpertFile>& experts,
                          const std::filesystem::path& json_path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);

}  // namespace dmd::io

#endif  // DMD_SERIALIZE_HPP_
