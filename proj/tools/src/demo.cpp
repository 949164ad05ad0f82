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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "commands.hpp"
#include "dmd/config.hpp"
#include "dmd/error.hpp"
#include "dmd/imaging.hpp"
#include "dmd/loss.hpp"
#include "dmd/mecm.hpp"
#include "dmd/netpbm.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/serialize.hpp"
#include "dmd/ssm.hpp"
#include "dmd/tensor_io.hpp"
#include "support.hpp"

namespace dmd::cli {
namespace {

mecm::LinearMap random_map(Rng& rng, std::size_t out, std::size_t in,
                           double scale) {
  mecm::LinearMap m{Matrix(out, in), std::vector<double>(out, 0.0)};
  const double std_dev = scale / std::sqrt(static_cast<double>(in));
  for (double& v : m.weights.data()) v = rng.normal(0.0, std_dev);
  return m;
}

Tensor3 per_pixel(const Tensor3& x, const mecm::LinearMap& map) {
  Tensor3 out(map.out_dim(), x.height(), x.width());
  std::vector<double> v(x.channels());
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    for (std::size_t c = 0; c < x.channels(); ++c) v[c] = x.at(c, p);
    const std::vector<double> y = map.apply(v);
    for (std::size_t c = 0; c < y.size(); ++c) out.at(c, p) = y[c];
  }
  return out;
}

std::vector<double> pooled(const Tensor3& x) {
  std::vector<double> m(x.channels(), 0.0);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (double v : x.channel(c)) m[c] += v;
    m[c] /= static_cast<double>(x.pixels());
  }
  return m;
}

void write_labels(const scan::RegionMap& regions, const fs::path& path) {
  io::TensorFile f;
  f.dims = {static_cast<std::uint32_t>(regions.height),
            static_cast<std::uint32_t>(regions.width)};
  f.payload = std::vector<std::uint32_t>(regions.labels.begin(),
                                         regions.labels.end());
  io::write_tensor_file(f, path);
}

}  // namespace

int cmd_demo(const DemoCommand& c, std::ostream& out) {
  RunConfig cfg;
  if (c.config) cfg = io::run_config_from_json(io::read_json_file(*c.config));
  cfg.validate();
  const std::uint64_t seed = resolve_seed(c.seed, cfg.seed);

  const Tensor3 t = imaging::load_image(c.t);
  const Tensor3 r = imaging::load_image(c.r);
  const scan::ProximityMap p = load_proximity(c.proximity);
  if (!t.same_shape(r)) throw ValidationError("demo: T and R sizes differ");
  if (p.height != t.height() || p.width != t.width()) {
    throw ValidationError("demo: proximity size differs from the images");
  }
  fs::create_directories(c.outdir);
  Rng rng(seed);

  const auto [alpha, beta] = imaging::sample_coefficients(rng, cfg.blend);
  const imaging::BlendResult blended = imaging::blend(t, r, alpha, beta, cfg.blend);
  const Tensor3& image = blended.image;
  imaging::save_image(image, c.outdir / "blend.ppm");

  const scan::RegionMap regions = scan::partition_regions(p, cfg.partition);
  const scan::ScanOrder rscan = scan::da_rscan(p, regions);
  const scan::ScanOrder gscan = scan::da_gscan(p);
  write_labels(regions, c.outdir / "regions.dmd");
  io::write_tensor_file(io::from_order(rscan), c.outdir / "order_rscan.dmd");
  io::write_tensor_file(io::from_order(gscan), c.outdir / "order_gscan.dmd");
  imaging::save_image(order_visualization(rscan), c.outdir / "viz_rscan.ppm");
  imaging::save_image(order_visualization(gscan), c.outdir / "viz_gscan.ppm");

  const std::size_t d = cfg.d_inner;
  const Tensor3 features = per_pixel(image, random_map(rng, d, image.channels(), 1.0));
  ssm::DsMambaParams branches;
  for (auto& b : branches.branches) {
    b = ssm::SsmParams::random(cfg.state_size, d, 2, rng.next());
    if (!cfg.a_init.empty()) b.a = cfg.a_init;
  }
  const auto pe = ssm::spatial_positional_encoding(t.height(), t.width(), d,
                                                   cfg.pe_base);
  const Tensor3 ssm_out = ssm::ds_mamba_forward(features, p, regions, branches,
                                                &pe, cfg.gamma.make());
  io::write_tensor_file(io::from_tensor(ssm_out), c.outdir / "ssm_out.dmd");

  std::vector<mecm::ExpertParams> experts;
  for (std::size_t e = 0; e < cfg.num_experts; ++e) {
    experts.push_back(mecm::ExpertParams::random(
        d, cfg.memory_items, cfg.retrieval_topk, rng.next(), cfg.update_rate));
  }
  const auto gate = mecm::GateParams::random(cfg.num_experts, d, rng.next());
  const mecm::MecmResult moe =
      mecm::mecm_forward(ssm_out, experts, gate, cfg.selected_experts, cfg.evolve);
  Tensor3 mecm_out = moe.output;
  if (cfg.mecm_residual) {
    for (std::size_t i = 0; i < mecm_out.size(); ++i) {
      mecm_out.data()[i] += ssm_out.data()[i];
    }
  }
  io::write_tensor_file(io::from_tensor(mecm_out), c.outdir / "mecm_out.dmd");
  if (cfg.evolve) {
    for (std::size_t e = 0; e < moe.experts.size(); ++e) {
      io::write_tensor_file(io::dump_bank(moe.experts[e].memory),
                            c.outdir / ("memory_" + std::to_string(e) + ".dmd"));
    }
  }

  const Tensor3 delta = per_pixel(mecm_out, random_map(rng, image.channels(), d, 0.1));
  Tensor3 output = image;
  Tensor3 residual = image;
  for (std::size_t i = 0; i < output.size(); ++i) {
    output.data()[i] = std::clamp(image.data()[i] + delta.data()[i], 0.0, 1.0);
    residual.data()[i] = image.data()[i] - output.data()[i];
  }
  imaging::save_image(output, c.outdir / "output.ppm");

  std::ofstream csv(c.outdir / "metrics.csv", std::ios::binary);
  if (!csv) throw IoError("cannot write metrics.csv");
  csv << "pair,psnr_db,ssim,lpips\n";
  const std::pair<const char*, std::pair<const Tensor3*, const Tensor3*>> rows[] = {
      {"blend_vs_t", {&t, &image}},
      {"blend_vs_r", {&r, &image}},
      {"output_vs_t", {&t, &output}},
      {"output_vs_r", {&r, &output}},
  };
  for (const auto& [name, pair] : rows) {
    csv << name << ',' << format_fixed(imaging::psnr(*pair.first, *pair.second), 4)
        << ',' << format_fixed(imaging::ssim(*pair.first, *pair.second), 6)
        << ",n/a\n";
  }
  csv.close();

  loss::LossComponents parts;
  Matrix gates(1, cfg.num_experts);
  std::copy(moe.route.full_weights.begin(), moe.route.full_weights.end(),
            gates.row(0).begin());
  parts.load = loss::load_loss(gates, Matrix(0, cfg.num_experts), cfg.loss);
  parts.memory = loss::memory_matching_loss(
      pooled(mecm_out), experts[moe.route.selected[0]].memory,
      loss::Layer::kTransmission, cfg.loss);
  const loss::IdentityExtractor identity;
  parts.appearance =
      loss::appearance_loss(output, t, residual, r, &identity, cfg.loss);

  io::json summary = {
      {"seed", seed},
      {"alpha", alpha},
      {"beta", beta},
      {"blend_clamped", blended.clamped},
      {"regions", regions.region_count()},
      {"route",
       {{"selected", moe.route.selected},
        {"weights", moe.route.weights},
        {"full_weights", moe.route.full_weights}}},
      {"losses",
       {{"load", parts.load},
        {"memory", parts.memory},
        {"appearance", parts.appearance},
        {"total", loss::total_loss(parts)}}},
      {"config", io::to_json(cfg)},
  };
  io::write_json_file(summary, c.outdir / "summary.json");

  out << "demo: " << t.width() << 'x' << t.height() << ", alpha "
      << format_fixed(alpha, 4) << ", beta " << format_fixed(beta, 4) << ", "
      << regions.region_count() << " regions, experts";
  for (std::size_t e : moe.route.selected) out << ' ' << e;
  out << " -> " << c.outdir.string() << '\n';
  return 0;
}

}  // namespace dmd::cli
