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

#include "dmd/mecm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmd/error.hpp"
#include "dmd/random.hpp"

namespace dmd::mecm {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void softmax_inplace(std::span<double> v) {
  const double peak = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - peak);
    total += x;
  }
  for (double& x : v) x /= total;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> spatial_mean(const Tensor3& x) {
  std::vector<double> out(x.channels(), 0.0);
  const double inv = 1.0 / static_cast<double>(x.pixels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double acc = 0.0;
    for (double v : x.channel(c)) acc += v;
    out[c] = acc * inv;
  }
  return out;
}

// Indices of the k largest scores; ties prefer the lower index.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

void require_channels(const Tensor3& x, const MemoryBank& bank,
                      const char* who) {
  if (x.channels() != bank.channels()) {
    throw ValidationError(std::string(who) + ": input has " +
                          std::to_string(x.channels()) +
                          " channels, memory bank has " +
                          std::to_string(bank.channels()));
  }
  if (x.pixels() == 0) {
    throw ValidationError(std::string(who) + ": empty input");
  }
}

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const double norm = std::sqrt(dot(row, row));
    if (norm > 0.0) {
      for (double& v : row) v /= norm;
    }
  }
}

// Per-image forward state kept for the backward pass.
struct GpImageState {
  std::vector<double> pooled;
  std::vector<double> match;  // S_I row
  std::vector<double> response;
  std::vector<double> joint;  // [F_M ; I_G]
  std::vector<double> mask;
};

GpImageState gp_image_forward(const Tensor3& image, const MemoryBank& bank,
                              const LinearMap& mask_proj,
                              std::vector<double>* similarity) {
  const std::size_t m_items = bank.size();
  const std::size_t c = bank.channels();
  GpImageState s;
  s.pooled = spatial_mean(image);
  s.match.resize(m_items);
  for (std::size_t m = 0; m < m_items; ++m) {
    s.match[m] = dot(s.pooled, bank.items.row(m));
  }
  if (similarity != nullptr) *similarity = s.match;
  softmax_inplace(s.match);
  s.response.assign(c, 0.0);
  for (std::size_t m = 0; m < m_items; ++m) {
    const auto item = bank.items.row(m);
    for (std::size_t i = 0; i < c; ++i) s.response[i] += s.match[m] * item[i];
  }
  s.joint = s.response;
  s.joint.insert(s.joint.end(), s.pooled.begin(), s.pooled.end());
  s.mask = mask_proj.apply(s.joint);
  for (double& v : s.mask) v = logistic(v);
  return s;
}

void check_mask_proj(const LinearMap& mask_proj, std::size_t c) {
  if (mask_proj.in_dim() != 2 * c || mask_proj.out_dim() != c ||
      mask_proj.bias.size() != c) {
    throw ValidationError("mask projection must map 2C=" +
                          std::to_string(2 * c) + " to C=" +
                          std::to_string(c));
  }
}

}  // namespace

void MemoryBank::validate() const {
  if (items.rows() == 0 || items.cols() == 0) {
    throw ValidationError("MemoryBank: needs at least one item and channel");
  }
  for (double v : items.data()) {
    if (!std::isfinite(v)) {
      throw ValidationError("MemoryBank: non-finite entry");
    }
  }
  if (!(update_rate > 0.0 && update_rate <= 1.0)) {
    throw ValidationError("MemoryBank: update rate must be in (0,1]");
  }
}

MemoryBank MemoryBank::random(std::size_t items, std::size_t channels,
                              std::uint64_t seed, double update_rate) {
  Rng rng(seed);
  MemoryBank bank{Matrix(items, channels), update_rate};
  for (double& v : bank.items.data()) v = rng.normal();
  normalize_rows(bank.items);
  return bank;
}

std::vector<double> LinearMap::apply(std::span<const double> v) const {
  if (v.size() != in_dim() || bias.size() != out_dim()) {
    throw ValidationError("LinearMap: input size mismatch");
  }
  std::vector<double> out(bias);
  for (std::size_t r = 0; r < out_dim(); ++r) out[r] += dot(weights.row(r), v);
  return out;
}

void Conv3x3::validate() const {
  if (weights.size() != out_channels * in_channels * 9 ||
      bias.size() != out_channels) {
    throw ValidationError("Conv3x3: weight or bias size mismatch");
  }
}

Tensor3 conv3x3(const Tensor3& x, const Conv3x3& conv) {
  conv.validate();
  if (x.channels() != conv.in_channels) {
    throw ValidationError("conv3x3: input has " +
                          std::to_string(x.channels()) +
                          " channels, kernel expects " +
                          std::to_string(conv.in_channels));
  }
  const auto h = static_cast<std::ptrdiff_t>(x.height());
  const auto w = static_cast<std::ptrdiff_t>(x.width());
  Tensor3 out(conv.out_channels, x.height(), x.width());
  for (std::size_t o = 0; o < conv.out_channels; ++o) {
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t xx = 0; xx < w; ++xx) {
        double acc = conv.bias[o];
        for (std::size_t i = 0; i < conv.in_channels; ++i) {
          for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
            const std::ptrdiff_t sy = y + ky - 1;
            if (sy < 0 || sy >= h) continue;
            for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
              const std::ptrdiff_t sx = xx + kx - 1;
              if (sx < 0 || sx >= w) continue;
              acc += conv.w(o, i, static_cast<std::size_t>(ky),
                            static_cast<std::size_t>(kx)) *
                     x.at(i, static_cast<std::size_t>(sy),
                          static_cast<std::size_t>(sx));
            }
          }
        }
        out.at(o, static_cast<std::size_t>(y), static_cast<std::size_t>(xx)) =
            acc;
      }
    }
  }
  return out;
}

void GateParams::validate() const {
  if (weights.rows() == 0 || weights.cols() == 0) {
    throw ValidationError("GateParams: empty weight matrix");
  }
  if (bias.size() != weights.rows()) {
    throw ValidationError("GateParams: bias size does not match experts");
  }
}

GateParams GateParams::random(std::size_t experts, std::size_t channels,
                              std::uint64_t seed) {
  Rng rng(seed);
  GateParams g{Matrix(experts, channels), std::vector<double>(experts, 0.0)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(channels));
  for (double& v : g.weights.data()) v = rng.normal(0.0, scale);
  return g;
}

void ExpertParams::validate() const {
  memory.validate();
  const std::size_t c = memory.channels();
  check_mask_proj(mask_proj, c);
  fusion.validate();
  if (fusion.in_channels != 2 * c) {
    throw ValidationError("ExpertParams: fusion must take 2C input channels");
  }
  if (topk < 1 || topk > memory.size()) {
    throw ValidationError("ExpertParams: top-k " + std::to_string(topk) +
                          " must be in [1, M=" +
                          std::to_string(memory.size()) + "]");
  }
}

ExpertParams ExpertParams::random(std::size_t channels,
                                  std::size_t memory_items, std::size_t topk,
                                  std::uint64_t seed, double update_rate) {
  Rng rng(seed);
  ExpertParams e;
  e.memory = MemoryBank::random(memory_items, channels, rng.next(),
                                update_rate);
  e.mask_proj.weights = Matrix(channels, 2 * channels);
  e.mask_proj.bias.assign(channels, 0.0);
  const double proj_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(channels));
  for (double& v : e.mask_proj.weights.data()) v = rng.normal(0.0, proj_scale);
  e.fusion.out_channels = channels;
  e.fusion.in_channels = 2 * channels;
  e.fusion.weights.resize(channels * 2 * channels * 9);
  e.fusion.bias.assign(channels, 0.0);
  const double conv_scale =
      1.0 / std::sqrt(18.0 * static_cast<double>(channels));
  for (double& v : e.fusion.weights) v = rng.normal(0.0, conv_scale);
  e.topk = topk;
  return e;
}

ExpertRoute gate_route(const Tensor3& features, const GateParams& gate,
                       std::size_t num_experts, std::size_t k) {
  gate.validate();
  if (num_experts != gate.experts()) {
    throw ValidationError("gate_route: gate has " +
                          std::to_string(gate.experts()) +
                          " experts, expected " + std::to_string(num_experts));
  }
  if (k < 1 || k > num_experts) {
    throw ValidationError("gate_route: K=" + std::to_string(k) +
                          " must be in [1, N_Exp=" +
                          std::to_string(num_experts) + "]");
  }
  if (features.channels() != gate.weights.cols() || features.pixels() == 0) {
    throw ValidationError("gate_route: feature channels do not match gate");
  }
  const std::vector<double> pooled = spatial_mean(features);
  ExpertRoute route;
  route.logits.resize(num_experts);
  for (std::size_t e = 0; e < num_experts; ++e) {
    route.logits[e] = gate.bias[e] + dot(gate.weights.row(e), pooled);
  }
  route.full_weights = route.logits;
  softmax_inplace(route.full_weights);
  route.selected = top_k(route.logits, k);
  route.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    route.weights[i] = route.logits[route.selected[i]];
  }
  softmax_inplace(route.weights);
  return route;
}

GpResult gp_adjust(std::span<const Tensor3> batch, const MemoryBank& bank,
                   const LinearMap& mask_proj) {
  bank.validate();
  if (batch.empty()) throw ValidationError("gp_adjust: empty batch");
  const std::size_t b_count = batch.size();
  const std::size_t m_items = bank.size();
  const std::size_t c = bank.channels();
  check_mask_proj(mask_proj, c);

  GpResult r;
  r.pooled = Matrix(b_count, c);
  r.similarity = Matrix(b_count, m_items);
  r.match_image = Matrix(b_count, m_items);
  r.match_memory = Matrix(b_count, m_items);
  r.memory_response = Matrix(b_count, c);
  r.mask = Matrix(b_count, c);
  r.outputs.reserve(b_count);

  for (std::size_t b = 0; b < b_count; ++b) {
    const Tensor3& image = batch[b];
    require_channels(image, bank, "gp_adjust");
    std::vector<double> sim;
    const GpImageState s = gp_image_forward(image, bank, mask_proj, &sim);
    std::copy(s.pooled.begin(), s.pooled.end(), r.pooled.row(b).begin());
    std::copy(sim.begin(), sim.end(), r.similarity.row(b).begin());
    std::copy(s.match.begin(), s.match.end(), r.match_image.row(b).begin());
    std::copy(s.response.begin(), s.response.end(),
              r.memory_response.row(b).begin());
    std::copy(s.mask.begin(), s.mask.end(), r.mask.row(b).begin());

    Tensor3 out = image;
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (double& v : out.channel(ch)) v *= s.mask[ch];
    }
    r.outputs.push_back(std::move(out));
  }

  // Softmax along the image dimension, one column per memory item.
  std::vector<double> column(b_count);
  for (std::size_t m = 0; m < m_items; ++m) {
    for (std::size_t b = 0; b < b_count; ++b) column[b] = r.similarity(b, m);
    softmax_inplace(column);
    for (std::size_t b = 0; b < b_count; ++b) r.match_memory(b, m) = column[b];
  }
  return r;
}

GpGrads gp_adjust_backward(const Tensor3& image, const MemoryBank& bank,
                           const LinearMap& mask_proj, const Tensor3& d_out) {
  bank.validate();
  require_channels(image, bank, "gp_adjust_backward");
  check_mask_proj(mask_proj, bank.channels());
  if (!d_out.same_shape(image)) {
    throw ValidationError("gp_adjust_backward: gradient shape mismatch");
  }
  const std::size_t c = bank.channels();
  const std::size_t m_items = bank.size();
  const GpImageState s = gp_image_forward(image, bank, mask_proj, nullptr);

  GpGrads g;
  g.d_input = Tensor3(image.channels(), image.height(), image.width());
  g.d_memory = Matrix(m_items, c);
  g.d_mask_proj.weights = Matrix(c, 2 * c);
  g.d_mask_proj.bias.assign(c, 0.0);

  // O_G[c,p] = I[c,p] * mask[c]
  std::vector<double> d_pre(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    const auto in = image.channel(ch);
    const auto dout = d_out.channel(ch);
    auto din = g.d_input.channel(ch);
    double d_mask = 0.0;
    for (std::size_t p = 0; p < in.size(); ++p) {
      din[p] = dout[p] * s.mask[ch];
      d_mask += dout[p] * in[p];
    }
    d_pre[ch] = d_mask * s.mask[ch] * (1.0 - s.mask[ch]);
  }

  std::vector<double> d_joint(2 * c, 0.0);
  for (std::size_t r = 0; r < c; ++r) {
    g.d_mask_proj.bias[r] = d_pre[r];
    for (std::size_t i = 0; i < 2 * c; ++i) {
      g.d_mask_proj.weights(r, i) = d_pre[r] * s.joint[i];
      d_joint[i] += mask_proj.weights(r, i) * d_pre[r];
    }
  }
  const std::span<const double> d_response(d_joint.data(), c);
  std::vector<double> d_pooled(d_joint.begin() + static_cast<std::ptrdiff_t>(c),
                               d_joint.end());

  // F_M = sum_m S_I[m] Mem[m]; S_I = softmax(Mem I_G).
  std::vector<double> d_match(m_items);
  double weighted = 0.0;
  for (std::size_t m = 0; m < m_items; ++m) {
    d_match[m] = dot(bank.items.row(m), d_response);
    weighted += s.match[m] * d_match[m];
    auto dm = g.d_memory.row(m);
    for (std::size_t i = 0; i < c; ++i) dm[i] += s.match[m] * d_response[i];
  }
  for (std::size_t m = 0; m < m_items; ++m) {
    const double d_sim = s.match[m] * (d_match[m] - weighted);
    const auto item = bank.items.row(m);
    auto dm = g.d_memory.row(m);
    for (std::size_t i = 0; i < c; ++i) {
      d_pooled[i] += d_sim * item[i];
      dm[i] += d_sim * s.pooled[i];
    }
  }

  const double inv = 1.0 / static_cast<double>(image.pixels());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (double& v : g.d_input.channel(ch)) v += d_pooled[ch] * inv;
  }
  return g;
}

MemoryIncrement memory_increment(const MemoryBank& bank, const Matrix& pooled,
                                 const Matrix& match_image,
                                 const Matrix& match_memory) {
  const std::size_t m_items = bank.size();
  const std::size_t c = bank.channels();
  const std::size_t b_count = pooled.rows();
  if (pooled.cols() != c || match_image.rows() != b_count ||
      match_memory.rows() != b_count || match_image.cols() != m_items ||
      match_memory.cols() != m_items) {
    throw ValidationError("memory_evolve: S_I and S_M must be B x M and I_G "
                          "must be B x C");
  }
  MemoryIncrement inc{Matrix(m_items, c), std::vector<std::size_t>(b_count)};
  for (std::size_t b = 0; b < b_count; ++b) {
    const auto row = match_image.row(b);
    // max_element returns the first maximum, i.e. the lower index on ties.
    const auto j = static_cast<std::size_t>(
        std::max_element(row.begin(), row.end()) - row.begin());
    inc.best_item[b] = j;
    const double weight = match_memory(b, j);
    auto delta = inc.delta.row(j);
    for (std::size_t i = 0; i < c; ++i) {
      const double u = weight * pooled(b, i);
      if (!std::isfinite(u)) {
        throw NumericError("memory_evolve: non-finite update vector for "
                           "image " + std::to_string(b));
      }
      delta[i] += u;
    }
  }
  return inc;
}

MemoryBank memory_evolve(const MemoryBank& bank, const Matrix& pooled,
                         const Matrix& match_image,
                         const Matrix& match_memory) {
  bank.validate();
  const MemoryIncrement inc =
      memory_increment(bank, pooled, match_image, match_memory);
  MemoryBank out = bank;
  for (std::size_t i = 0; i < out.items.data().size(); ++i) {
    out.items.data()[i] += bank.update_rate * inc.delta.data()[i];
  }
  normalize_rows(out.items);
  return out;
}

ScResult sc_refine(const Tensor3& image, const MemoryBank& bank,
                   std::size_t k) {
  bank.validate();
  require_channels(image, bank, "sc_refine");
  const std::size_t m_items = bank.size();
  if (k < 1 || k > m_items) {
    throw ValidationError("sc_refine: K=" + std::to_string(k) +
                          " must be in [1, M=" + std::to_string(m_items) +
                          "]");
  }
  const std::size_t c = bank.channels();
  const std::size_t n_pix = image.pixels();
  ScResult r;
  r.output = Tensor3(c, image.height(), image.width());
  r.top_indices.resize(n_pix * k);
  r.attention.resize(n_pix * k);

  std::vector<double> pixel(c), scores(m_items), weights(k);
  for (std::size_t p = 0; p < n_pix; ++p) {
    for (std::size_t ch = 0; ch < c; ++ch) pixel[ch] = image.at(ch, p);
    for (std::size_t m = 0; m < m_items; ++m) {
      scores[m] = dot(pixel, bank.items.row(m));
    }
    const std::vector<std::size_t> best = top_k(scores, k);
    for (std::size_t i = 0; i < k; ++i) weights[i] = scores[best[i]];
    softmax_inplace(weights);
    for (std::size_t i = 0; i < k; ++i) {
      r.top_indices[p * k + i] = best[i];
      r.attention[p * k + i] = weights[i];
      const auto item = bank.items.row(best[i]);
      for (std::size_t ch = 0; ch < c; ++ch) {
        r.output.at(ch, p) += weights[i] * item[ch];
      }
    }
  }
  return r;
}

ScGrads sc_refine_backward(const Tensor3& image, const MemoryBank& bank,
                           std::size_t k, const Tensor3& d_out) {
  const ScResult fwd = sc_refine(image, bank, k);
  if (!d_out.same_shape(fwd.output)) {
    throw ValidationError("sc_refine_backward: gradient shape mismatch");
  }
  const std::size_t c = bank.channels();
  ScGrads g{Tensor3(c, image.height(), image.width()),
            Matrix(bank.size(), c)};
  std::vector<double> d_weight(k);
  for (std::size_t p = 0; p < image.pixels(); ++p) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t m = fwd.top_indices[p * k + i];
      const double wa = fwd.attention[p * k + i];
      const auto item = bank.items.row(m);
      auto dm = g.d_memory.row(m);
      double dw = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double go = d_out.at(ch, p);
        dw += go * item[ch];
        dm[ch] += wa * go;
      }
      d_weight[i] = dw;
      weighted += wa * dw;
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t m = fwd.top_indices[p * k + i];
      const double d_score =
          fwd.attention[p * k + i] * (d_weight[i] - weighted);
      const auto item = bank.items.row(m);
      auto dm = g.d_memory.row(m);
      for (std::size_t ch = 0; ch < c; ++ch) {
        g.d_input.at(ch, p) += d_score * item[ch];
        dm[ch] += d_score * image.at(ch, p);
      }
    }
  }
  return g;
}

ExpertOutput expert_forward(const Tensor3& image, const ExpertParams& expert,
                            bool evolve) {
  expert.validate();
  const std::span<const Tensor3> batch(&image, 1);
  GpResult gp = gp_adjust(batch, expert.memory, expert.mask_proj);
  ScResult sc = sc_refine(image, expert.memory, expert.topk);

  const std::size_t c = expert.channels();
  Tensor3 joint(2 * c, image.height(), image.width());
  for (std::size_t ch = 0; ch < c; ++ch) {
    std::copy_n(gp.outputs[0].channel(ch).begin(), image.pixels(),
                joint.channel(ch).begin());
    std::copy_n(sc.output.channel(ch).begin(), image.pixels(),
                joint.channel(c + ch).begin());
  }

  ExpertOutput out;
  out.output = conv3x3(joint, expert.fusion);
  out.global = std::move(gp.outputs[0]);
  out.spatial = std::move(sc.output);
  if (evolve) {
    ExpertParams next = expert;
    next.memory = memory_evolve(expert.memory, gp.pooled, gp.match_image,
                                gp.match_memory);
    out.evolved = std::move(next);
  }
  return out;
}

Tensor3 mix_experts(std::span<const Tensor3> outputs,
                    std::span<const double> weights) {
  if (outputs.empty() || outputs.size() != weights.size()) {
    throw ValidationError("mix_experts: need one weight per expert output");
  }
  Tensor3 out(outputs[0].channels(), outputs[0].height(), outputs[0].width());
  for (std::size_t e = 0; e < outputs.size(); ++e) {
    if (!outputs[e].same_shape(out)) {
      throw ValidationError("mix_experts: expert outputs differ in shape");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.data()[i] += weights[e] * outputs[e].data()[i];
    }
  }
  return out;
}

MecmResult mecm_forward(const Tensor3& image,
                        std::span<const ExpertParams> experts,
                        const GateParams& gate, std::size_t k, bool evolve) {
  MecmResult r;
  r.route = gate_route(image, gate, experts.size(), k);
  std::vector<Tensor3> outputs;
  outputs.reserve(k);
  if (evolve) r.experts.assign(experts.begin(), experts.end());
  for (std::size_t e : r.route.selected) {
    ExpertOutput eo = expert_forward(image, experts[e], evolve);
    outputs.push_back(std::move(eo.output));
    if (evolve) r.experts[e] = std::move(*eo.evolved);
  }
  r.output = mix_experts(outputs, r.route.weights);
  return r;
}

}  // namespace dmd::mecm
