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

#ifndef DMD_TOOLS_COMMANDS_HPP_
#define DMD_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace dmd::cli {

namespace fs = std::filesystem;

struct ScanCommand {
  fs::path proximity;
  std::string mode = "rscan";
  int bins = 8;
  double min_area = 0.005;
  fs::path out;
  std::optional<fs::path> viz;
};

struct SsmCommand {
  fs::path input;
  fs::path depth;
  std::string gamma = "proximity";
  std::optional<fs::path> order;
  std::optional<fs::path> params;
  std::optional<double> pe_base;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct MecmCommand {
  fs::path input;
  fs::path experts;
  fs::path gate;
  bool evolve = false;
  fs::path out;
};

struct SynthCommand {
  fs::path t;
  fs::path r;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct MetricsCommand {
  fs::path ref;
  fs::path test;
  fs::path out;
};

struct CheckCommand {
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  bool corrupt_gradient = false;
};

struct DemoCommand {
  fs::path t;
  fs::path r;
  fs::path proximity;
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  fs::path outdir;
};

// Each command throws dmd errors on failure and returns its exit code.
int cmd_scan(const ScanCommand& c, std::ostream& out);
int cmd_ssm(const SsmCommand& c, std::ostream& out, std::ostream& err);
int cmd_mecm(const MecmCommand& c, std::ostream& out);
int cmd_synth(const SynthCommand& c, std::ostream& out);
int cmd_metrics(const MetricsCommand& c, std::ostream& out);
int cmd_check(const CheckCommand& c, std::ostream& out);
int cmd_demo(const DemoCommand& c, std::ostream& out);

}  // namespace dmd::cli

#endif  // DMD_TOOLS_COMMANDS_HPP_
