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

#include "dmd/cli/cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <algorithm>
#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "dmd/error.hpp"

namespace dmd::cli {
namespace {

void add_seed(CLI::App* cmd, std::optional<std::uint64_t>& seed) {
  cmd->add_option("--seed", seed, "Random seed (falls back to DMD_SEED)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Depth-aware scanning, memory experts and reflection-removal "
               "building blocks"};
  app.name("dmd");
  app.require_subcommand(1);

  ScanCommand scan;
  auto* scan_cmd = app.add_subcommand("scan", "Build a depth-aware scan order");
  scan_cmd->add_option("--proximity", scan.proximity, "Proximity map (PGM or tensor)")->required();
  scan_cmd->add_option("--mode", scan.mode, "rscan or gscan")
      ->check(CLI::IsMember({"rscan", "gscan"}));
  scan_cmd->add_option("--bins", scan.bins, "Quantization bins");
  scan_cmd->add_option("--min-area", scan.min_area, "Minimum region area fraction");
  scan_cmd->add_option("--out", scan.out, "Order tensor file")->required();
  scan_cmd->add_option("--viz", scan.viz, "Rank-colored PPM");

  SsmCommand ssm;
  auto* ssm_cmd = app.add_subcommand("ssm", "Run the depth-selective scan");
  ssm_cmd->add_option("--input", ssm.input, "C x H x W tensor or image")->required();
  ssm_cmd->add_option("--depth", ssm.depth, "Proximity map (PGM or tensor)")->required();
  ssm_cmd->add_option("--gamma", ssm.gamma,
                      "'proximity', a constant in [0,1], or a tensor file");
  ssm_cmd->add_option("--order", ssm.order, "Order tensor file (default gscan)");
  ssm_cmd->add_option("--params", ssm.params, "SSM parameter JSON");
  ssm_cmd->add_option("--pe-base", ssm.pe_base, "Add positional encoding with this base");
  add_seed(ssm_cmd, ssm.seed);
  ssm_cmd->add_option("--out", ssm.out, "Output tensor file")->required();

  MecmCommand mecm;
  auto* mecm_cmd = app.add_subcommand("mecm", "Run the memory expert module");
  mecm_cmd->add_option("--input", mecm.input, "C x H x W tensor or image")->required();
  mecm_cmd->add_option("--experts", mecm.experts, "Expert list JSON")->required();
  mecm_cmd->add_option("--gate", mecm.gate, "Gate JSON")->required();
  mecm_cmd->add_flag("--evolve", mecm.evolve, "Evolve and rewrite memory banks");
  mecm_cmd->add_option("--out", mecm.out, "Output tensor file")->required();

  SynthCommand synth;
  auto* synth_cmd = app.add_subcommand("synth", "Blend transmission and reflection");
  synth_cmd->add_option("--t", synth.t, "Transmission PPM/PGM")->required();
  synth_cmd->add_option("--r", synth.r, "Reflection PPM/PGM")->required();
  synth_cmd->add_option("--alpha", synth.alpha, "Transmission coefficient");
  synth_cmd->add_option("--beta", synth.beta, "Reflection coefficient");
  add_seed(synth_cmd, synth.seed);
  synth_cmd->add_option("--out", synth.out, "Blended image")->required();

  MetricsCommand metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM table");
  metrics_cmd->add_option("--ref", metrics.ref, "Reference image, tensor file or directory")->required();
  metrics_cmd->add_option("--test", metrics.test, "Test image, tensor file or directory")->required();
  metrics_cmd->add_option("--out", metrics.out, "CSV output")->required();

  CheckCommand check;
  auto* check_cmd = app.add_subcommand("check", "Run the property suites");
  check_cmd->add_option("--suite", check.suite, "all|scan|ssm|mecm|loss|imaging")
      ->check(CLI::IsMember({"all", "scan", "ssm", "mecm", "loss", "imaging"}));
  add_seed(check_cmd, check.seed);
  check_cmd->add_flag("--corrupt-gradient", check.corrupt_gradient,
                      "Scale analytic gradients by 1.1 (negative control)");

  DemoCommand demo;
  auto* demo_cmd = app.add_subcommand("demo", "End-to-end toy pipeline");
  demo_cmd->add_option("--t", demo.t, "Transmission PPM")->required();
  demo_cmd->add_option("--r", demo.r, "Reflection PPM")->required();
  demo_cmd->add_option("--proximity", demo.proximity, "Proximity PGM")->required();
  demo_cmd->add_option("--config", demo.config, "Run configuration JSON");
  add_seed(demo_cmd, demo.seed);
  demo_cmd->add_option("--outdir", demo.outdir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*scan_cmd) return cmd_scan(scan, out);
    if (*ssm_cmd) return cmd_ssm(ssm, out, err);
    if (*mecm_cmd) return cmd_mecm(mecm, out);
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*metrics_cmd) return cmd_metrics(metrics, out);
    if (*check_cmd) return cmd_check(check, out);
    if (*demo_cmd) return cmd_demo(demo, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace dmd::cli
