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

// Acceptance report: one PASS/FAIL line per criterion, exit 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "dmd/cli/cli.hpp"
#include "dmd/config.hpp"
#include "dmd/imaging.hpp"
#include "dmd/loss.hpp"
#include "dmd/random.hpp"
#include "dmd/ssm.hpp"
#include "dmd/verify/oracles.hpp"
#include "dmd/verify/suite.hpp"

namespace fs = std::filesystem;
using namespace dmd;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr double kScanBudgetSeconds = 5.0;
constexpr double kDemoBudgetSeconds = 10.0;
constexpr double kLoadZeroTol = 1e-12;
constexpr double kFixedPointTol = 1e-9;
constexpr double kBlendTol = 1e-12;
constexpr double kPsnrTol = 1e-3;
constexpr double kSsimSelfTol = 1e-9;
constexpr double kSsimConstTol = 1e-7;
constexpr double kPeTol = 1e-6;

struct Verdict {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_properties(Verdict& v, const std::vector<verify::PropertyResult>& results,
                        std::initializer_list<const char*> names) {
  for (const char* name : names) {
    const auto it = std::find_if(results.begin(), results.end(),
                                 [&](const auto& r) { return r.name == name; });
    if (it == results.end()) {
      v.fail(std::string("property ") + name + " missing");
    } else if (!it->passed) {
      v.fail(it->suite + "/" + it->name + ": " + it->detail);
    }
  }
}

std::vector<verify::PropertyResult> suite(const char* name, bool corrupt = false) {
  verify::SuiteOptions opts;
  opts.seed = kSeed;
  opts.corrupt_gradients = corrupt;
  return verify::run_suite(name, opts);
}

Verdict ac1_scan_validity() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = suite("scan");
  const double elapsed = seconds_since(t0);
  require_properties(v, results,
                     {"orders_are_permutations", "gscan_non_increasing", "rscan_region_order"});
  if (elapsed >= kScanBudgetSeconds) v.fail("scan suite took " + fmt(elapsed) + " s");
  if (v.ok) v.detail = "200 maps, " + fmt(elapsed) + " s";
  return v;
}

Verdict ac2_round_trip() {
  Verdict v;
  require_properties(v, suite("scan"),
                     {"apply_restore_round_trip", "reverse_and_inverse_involution"});
  if (v.ok) v.detail = "100 tensors, exact";
  return v;
}

Verdict ac3_recurrence() {
  Verdict v;
  require_properties(v, suite("ssm"),
                     {"ds_scan_matches_unrolled_oracle", "gamma_zero_equals_vanilla_bitwise"});
  if (v.ok) v.detail = "50 cases within 1e-6, gamma=0 bitwise";
  return v;
}

Verdict ac4_gradients() {
  Verdict v;
  std::size_t checked = 0, corrupted_failures = 0;
  for (const char* s : {"ssm", "mecm", "loss"}) {
    const auto clean = suite(s);
    for (const auto& r : clean) {
      if (r.name.rfind("gradient_", 0) != 0) continue;
      ++checked;
      if (!r.passed) v.fail(r.suite + "/" + r.name + ": " + r.detail);
    }
    for (const auto& r : suite(s, true)) {
      if (r.name.rfind("gradient_", 0) == 0 && r.name != "gradient_negative_control" &&
          !r.passed) {
        ++corrupted_failures;
      }
    }
  }
  // vanilla, ds, load, matching, appearance, total, gp_adjust, sc_refine
  constexpr std::size_t kTargets = 8;
  if (checked != kTargets + 3) v.fail("expected 11 gradient properties, saw " + std::to_string(checked));
  if (corrupted_failures != kTargets) {
    v.fail("corrupted gradients rejected by " + std::to_string(corrupted_failures) + "/8 targets");
  }
  if (v.ok) v.detail = "8 targets x 20 seeds, controls rejected";
  return v;
}

Verdict ac5_mecm() {
  Verdict v;
  require_properties(v, suite("mecm"),
                     {"sc_refine_matches_oracle", "memory_increment_matches_oracle",
                      "match_distributions"});
  if (v.ok) v.detail = "sc_refine 1e-6, increment exact, distributions 1e-6";
  return v;
}

Verdict ac6_loss_fixed_points() {
  Verdict v;
  const loss::LossWeights w;
  const double uniform = loss::load_loss(Matrix(1, 4, 0.25), Matrix(), w);
  if (!(std::abs(uniform) <= kLoadZeroTol)) v.fail("uniform load " + fmt(uniform));
  const double onehot =
      loss::load_loss(Matrix(1, 4, std::vector<double>{1, 0, 0, 0}), Matrix(), w, 0.0);
  if (!(std::abs(onehot - 0.024) <= kFixedPointTol)) v.fail("one-hot load " + fmt(onehot));

  const double s = 1.0 / std::sqrt(2.0);
  const mecm::MemoryBank bank{Matrix(2, 2, std::vector<double>{s, s, 0.0, 1.0}), 0.5};
  const std::vector<double> query{s, s};
  const auto terms = loss::memory_matching_terms(query, bank);
  const double matching =
      loss::memory_matching_loss(query, bank, loss::Layer::kTransmission, w);
  if (!(terms.d_neg >= terms.d_pos) || matching != 0.0) v.fail("matching " + fmt(matching));

  const Tensor3 t(3, 8, 8, 0.3), r(3, 8, 8, 0.6), t_hat(3, 8, 8, 0.4);
  const loss::IdentityExtractor id;
  const double app = loss::appearance_loss(t_hat, t, r, r, &id, w);
  if (!(std::abs(app - 0.102) <= kFixedPointTol)) v.fail("appearance " + fmt(app));
  if (v.ok) v.detail = "load 0 / " + fmt(onehot) + ", matching 0, appearance " + fmt(app);
  return v;
}

Verdict ac7_closed_forms() {
  Verdict v;
  const Tensor3 half(3, 16, 16, 0.5);
  const auto b = imaging::blend(half, half, 1.0, 1.0);
  for (double x : b.image.data()) {
    if (!(std::abs(x - 0.75) <= kBlendTol)) {
      v.fail("blend " + fmt(x));
      break;
    }
  }
  const double p = imaging::psnr(Tensor3(3, 16, 16, 0.0), half);
  if (!(std::abs(p - 6.0206) <= kPsnrTol)) v.fail("psnr " + fmt(p));
  Rng rng(kSeed);
  Tensor3 a(3, 16, 16);
  for (double& x : a.data()) x = rng.uniform();
  const double self = imaging::ssim(a, a);
  if (!(std::abs(self - 1.0) <= kSsimSelfTol)) v.fail("ssim(a,a) " + fmt(self));
  const double c = imaging::ssim(Tensor3(1, 16, 16, 0.0), Tensor3(1, 16, 16, 1.0));
  if (!(std::abs(c - 9.999e-5) <= kSsimConstTol)) v.fail("ssim(0,1) " + fmt(c));
  if (v.ok) v.detail = "psnr " + fmt(p) + " dB, ssim(0,1) " + fmt(c);
  return v;
}

Verdict ac8_positional_encoding() {
  Verdict v;
  double worst_pair = 0.0, worst_oracle = 0.0;
  const struct { std::size_t h, w, d; double base; } cases[] = {
      {4, 4, 8, 10000.0}, {1, 1, 4, 10000.0}, {7, 3, 16, 100.0}, {32, 32, 32, 10000.0}};
  for (const auto& c : cases) {
    const auto pe = ssm::spatial_positional_encoding(c.h, c.w, c.d, c.base);
    for (std::size_t y = 0; y < c.h; ++y) {
      for (std::size_t x = 0; x < c.w; ++x) {
        const auto row = pe.table.row(y * c.w + x);
        for (std::size_t ch = 0; ch < c.d; ++ch) {
          if (!(row[ch] >= -1.0 && row[ch] <= 1.0)) v.fail("entry outside [-1,1]");
          const double o = verify::oracle::pe_entry(c.h, c.w, c.d, c.base, y, x, ch);
          worst_oracle = std::max(worst_oracle, std::abs(row[ch] - o));
        }
        for (std::size_t ch = 0; ch < c.d; ch += 2) {
          const double n = row[ch] * row[ch] + row[ch + 1] * row[ch + 1];
          worst_pair = std::max(worst_pair, std::abs(n - 1.0));
        }
      }
    }
  }
  if (worst_pair > kPeTol) v.fail("sin^2+cos^2 off by " + fmt(worst_pair));
  if (worst_oracle > kPeTol) v.fail("oracle mismatch " + fmt(worst_oracle));
  if (v.ok) v.detail = "pair error " + fmt(worst_pair) + ", oracle error " + fmt(worst_oracle);
  return v;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict ac9_determinism(const fs::path& work) {
  Verdict v;
  const fs::path fixtures(DMD_FIXTURE_DIR);
  double slowest = 0.0;
  for (const char* name : {"run_a", "run_b"}) {
    fs::remove_all(work / name);
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    const int code = run_cli({"demo", "--t", (fixtures / "t.ppm").string(), "--r",
                              (fixtures / "r.ppm").string(), "--proximity",
                              (fixtures / "proximity.pgm").string(), "--config",
                              (fixtures / "config.json").string(), "--outdir",
                              (work / name).string()},
                             &err);
    slowest = std::max(slowest, seconds_since(t0));
    if (code != cli::kExitOk) {
      v.fail(std::string(name) + " exited " + std::to_string(code) + ": " + err);
      return v;
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(work / "run_a")) {
    ++files;
    const fs::path other = work / "run_b" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      v.fail(entry.path().filename().string() + " differs");
    }
  }
  std::size_t other_files = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(work / "run_b")) ++other_files;
  if (files != other_files) v.fail("file sets differ");
  if (slowest >= kDemoBudgetSeconds) v.fail("demo took " + fmt(slowest) + " s");
  if (v.ok) v.detail = std::to_string(files) + " files identical, " + fmt(slowest) + " s";
  return v;
}

Verdict ac10_config(const fs::path& work) {
  Verdict v;
  const RunConfig c;
  const loss::LossWeights& w = c.loss;
  if (c.num_experts != 4 || c.selected_experts != 2) v.fail("expert defaults");
  if (w.load_t != 0.008 || w.load_r != 0.008 || w.triplet_t != 0.1 || w.align_t != 0.1 ||
      w.triplet_r != 0.05 || w.align_r != 0.05 || w.l1_t != 1.0 || w.l1_r != 1.0 ||
      w.vgg_t != 0.02) {
    v.fail("loss weight defaults");
  }
  const fs::path fixtures(DMD_FIXTURE_DIR);
  const std::pair<const char*, const char*> invalid[] = {
      {"k_above_experts", R"({"mecm": {"num_experts": 3, "selected_experts": 4}})"},
      {"gamma_out_of_range", R"({"ssm": {"gamma": {"transform": "constant", "value": 1.2}}})"},
      {"unstable_a", R"({"ssm": {"state_size": 2, "a_init": [0.5, -1.0]}})"},
  };
  for (const auto& [name, text] : invalid) {
    const fs::path cfg = work / (std::string(name) + ".json");
    std::ofstream(cfg) << text;
    const int code = run_cli({"demo", "--t", (fixtures / "t.ppm").string(), "--r",
                              (fixtures / "r.ppm").string(), "--proximity",
                              (fixtures / "proximity.pgm").string(), "--config", cfg.string(),
                              "--outdir", (work / name).string()});
    if (code != cli::kExitFailure) v.fail(std::string(name) + " exited " + std::to_string(code));
  }
  if (v.ok) v.detail = "defaults match, 3 invalid configs exit 1";
  return v;
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "dmd-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"AC1 scan validity", ac1_scan_validity},
      {"AC2 round trip", ac2_round_trip},
      {"AC3 recurrence oracle", ac3_recurrence},
      {"AC4 gradient checks", ac4_gradients},
      {"AC5 mecm oracles", ac5_mecm},
      {"AC6 loss fixed points", ac6_loss_fixed_points},
      {"AC7 blend and metric closed forms", ac7_closed_forms},
      {"AC8 positional encoding", ac8_positional_encoding},
      {"AC9 end-to-end determinism", [&] { return ac9_determinism(work); }},
      {"AC10 configuration fidelity", [&] { return ac10_config(work); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %s (%s)\n", v.ok ? "PASS" : "FAIL", name, v.detail.c_str());
    if (!v.ok) ++failed;
  }
  fs::remove_all(work);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
