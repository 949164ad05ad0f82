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

#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <vector>

#include "dmd/error.hpp"
#include "dmd/imaging.hpp"
#include "dmd/mecm.hpp"
#include "dmd/netpbm.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/serialize.hpp"
#include "dmd/ssm.hpp"
#include "dmd/tensor_io.hpp"
#include "dmd/verify/suite.hpp"
#include "support.hpp"

namespace dmd::cli {
namespace {

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

ssm::GammaMap resolve_gamma(const std::string& text,
                            const scan::ProximityMap& p,
                            const scan::ScanOrder& order) {
  if (text == "proximity") return ssm::gamma_from_proximity(p, order);
  if (const auto v = parse_number(text)) {
    if (!(*v >= 0.0 && *v <= 1.0)) {
      throw ValidationError("--gamma " + text + " is outside [0,1]");
    }
    return ssm::GammaMap{std::vector<double>(order.size(), *v)};
  }
  const io::TensorFile f = io::read_tensor_file(text);
  if (f.type() != io::ElementType::kF32) {
    throw ValidationError(text + ": gamma file must hold f32 values");
  }
  const auto& values = std::get<std::vector<float>>(f.payload);
  if (f.dims.size() == 1 && f.dims[0] == order.size()) {
    return ssm::GammaMap{std::vector<double>(values.begin(), values.end())};
  }
  if (f.dims.size() == 2 && f.dims[0] == order.height &&
      f.dims[1] == order.width) {
    ssm::GammaMap g{std::vector<double>(order.size())};
    for (std::size_t t = 0; t < order.size(); ++t) {
      g.values[t] = values[order.forward[t]];
    }
    return g;
  }
  throw ValidationError(text + ": gamma must be rank 1 [H*W] in scan order or "
                               "rank 2 [H, W]");
}

}  // namespace

int cmd_scan(const ScanCommand& c, std::ostream& out) {
  const scan::ProximityMap p = load_proximity(c.proximity);
  scan::ScanOrder order;
  if (c.mode == "rscan") {
    const auto regions = scan::partition_regions(p, {c.bins, c.min_area});
    order = scan::da_rscan(p, regions);
    out << "regions: " << regions.region_count() << " (background "
        << regions.areas[0] << " px)\n";
  } else if (c.mode == "gscan") {
    order = scan::da_gscan(p);
  } else {
    throw ValidationError("unknown scan mode '" + c.mode + "'");
  }
  io::write_tensor_file(io::from_order(order), c.out);
  if (c.viz) imaging::save_image(order_visualization(order), *c.viz);
  out << c.mode << ": " << order.size() << " pixels -> " << c.out.string()
      << '\n';
  return 0;
}

int cmd_ssm(const SsmCommand& c, std::ostream& out, std::ostream& err) {
  const Tensor3 x = load_tensor(c.input);
  const scan::ProximityMap p = load_proximity(c.depth);
  if (p.height != x.height() || p.width != x.width()) {
    throw ValidationError("input and depth sizes differ");
  }
  const scan::ScanOrder order =
      c.order ? io::to_order(io::read_tensor_file(*c.order), x.height(),
                             x.width())
              : scan::da_gscan(p);
  ssm::SsmParams params;
  if (c.params) {
    params = io::ssm_params_from_json(io::read_json_file(*c.params));
  } else {
    params = ssm::SsmParams::random(4, x.channels(), 2,
                                    resolve_seed(c.seed, 1));
  }
  if (params.d_inner != x.channels() || params.depth_dim != 2) {
    throw ValidationError("params expect d_inner=" +
                          std::to_string(params.d_inner) + ", depth_dim=" +
                          std::to_string(params.depth_dim) + " but input has " +
                          std::to_string(x.channels()) +
                          " channels and depth features are 2-wide");
  }

  Sequence seq = scan::apply_order(x, order);
  if (c.pe_base) {
    const auto pe = ssm::spatial_positional_encoding(x.height(), x.width(),
                                                     x.channels(), *c.pe_base);
    const Sequence enc = ssm::realign_pe(pe, order);
    for (std::size_t i = 0; i < seq.data().size(); ++i) {
      seq.data()[i] += enc.data()[i];
    }
  }
  ssm::ScanDiagnostics diag;
  const Sequence y =
      ssm::ds_scan(seq, ssm::depth_features(p, order),
                   resolve_gamma(c.gamma, p, order), params, &diag);
  if (diag.gamma_clamped > 0) {
    err << "warning: " << diag.gamma_clamped
        << " gamma values clamped into [0,1]\n";
  }
  io::write_tensor_file(io::from_tensor(scan::restore_order(y, order)), c.out);
  out << "ssm: " << y.rows() << " steps x " << y.cols() << " channels -> "
      << c.out.string() << '\n';
  return 0;
}

int cmd_mecm(const MecmCommand& c, std::ostream& out) {
  const Tensor3 x = load_tensor(c.input);
  std::vector<io::ExpertFile> files = io::load_experts(c.experts);
  const io::GateFile gate = io::gate_from_json(io::read_json_file(c.gate));
  std::vector<mecm::ExpertParams> experts;
  for (const auto& f : files) experts.push_back(f.params);
  const mecm::MecmResult r =
      mecm::mecm_forward(x, experts, gate.params, gate.k, c.evolve);
  io::write_tensor_file(io::from_tensor(r.output), c.out);
  for (std::size_t i = 0; i < r.route.selected.size(); ++i) {
    out << "expert " << r.route.selected[i] << " weight "
        << format_fixed(r.route.weights[i], 6) << '\n';
  }
  if (c.evolve) {
    for (std::size_t e = 0; e < files.size(); ++e) files[e].params = r.experts[e];
    io::save_expert_memories(files, c.experts);
    out << "memory banks updated\n";
  }
  return 0;
}

int cmd_synth(const SynthCommand& c, std::ostream& out) {
  const Tensor3 t = imaging::load_image(c.t);
  const Tensor3 r = imaging::load_image(c.r);
  Rng rng(resolve_seed(c.seed, 1));
  auto [alpha, beta] = imaging::sample_coefficients(rng);
  if (c.alpha) alpha = *c.alpha;
  if (c.beta) beta = *c.beta;
  const imaging::BlendResult b = imaging::blend(t, r, alpha, beta);
  imaging::save_image(b.image, c.out);
  out << "alpha " << format_fixed(alpha, 6) << " beta " << format_fixed(beta, 6)
      << " clamped " << b.clamped << '\n';
  return 0;
}

int cmd_metrics(const MetricsCommand& c, std::ostream& out) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(c.test)) {
    if (!fs::is_directory(c.ref)) {
      throw IoError("--ref must be a directory when --test is one");
    }
    std::vector<fs::path> tests;
    for (const auto& entry : fs::directory_iterator(c.test)) {
      if (entry.is_regular_file() &&
          (is_image_path(entry.path()) || entry.path().extension() == ".dmd")) {
        tests.push_back(entry.path());
      }
    }
    std::sort(tests.begin(), tests.end());
    for (const auto& tp : tests) pairs.emplace_back(c.ref / tp.filename(), tp);
  } else {
    pairs.emplace_back(c.ref, c.test);
  }

  std::ofstream csv(c.out, std::ios::binary);
  if (!csv) throw IoError("cannot write " + c.out.string());
  csv << "pair,psnr_db,ssim,lpips\n";
  for (const auto& [ref_path, test_path] : pairs) {
    const Tensor3 a = load_tensor(ref_path);
    const Tensor3 b = load_tensor(test_path);
    const double p = imaging::psnr(a, b);
    const double s = imaging::ssim(a, b);
    csv << test_path.stem().string() << ',' << format_fixed(p, 4) << ','
        << format_fixed(s, 6) << ",n/a\n";
    out << test_path.stem().string() << ": psnr " << format_fixed(p, 4)
        << " dB, ssim " << format_fixed(s, 6) << '\n';
  }
  if (!csv) throw IoError("failed writing " + c.out.string());
  return 0;
}

int cmd_check(const CheckCommand& c, std::ostream& out) {
  verify::SuiteOptions options;
  options.seed = resolve_seed(c.seed, 1);
  options.corrupt_gradients = c.corrupt_gradient;
  const auto results = verify::run_suite(c.suite, options);
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ')';
    out << '\n';
    if (r.passed) ++passed;
  }
  out << passed << '/' << results.size() << " properties passed (seed "
      << options.seed << ")\n";
  return passed == results.size() ? 0 : 1;
}

}  // namespace dmd::cli
