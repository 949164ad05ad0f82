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

#include "dmd/verify/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

namespace dmd::verify::oracle {

Partition flood_fill_partition(const scan::ProximityMap& p, int bins,
                               double min_area_frac) {
  const std::size_t h = p.height;
  const std::size_t w = p.width;
  const std::size_t n = h * w;
  std::vector<int> bin(n, 0);
  if (!p.constant) {
    for (std::size_t i = 0; i < n; ++i) {
      int b = static_cast<int>(std::floor(p.values[i] * bins));
      if (b < 0) b = 0;
      if (b > bins - 1) b = bins - 1;
      bin[i] = b;
    }
  }

  std::vector<int> component(n, -1);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (component[seed] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<std::size_t> stack{seed};
    component[seed] = id;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      members[static_cast<std::size_t>(id)].push_back(cur);
      const std::size_t y = cur / w;
      const std::size_t x = cur % w;
      std::vector<std::size_t> nbrs;
      if (y > 0) nbrs.push_back(cur - w);
      if (y + 1 < h) nbrs.push_back(cur + w);
      if (x > 0) nbrs.push_back(cur - 1);
      if (x + 1 < w) nbrs.push_back(cur + 1);
      for (std::size_t nb : nbrs) {
        if (component[nb] < 0 && bin[nb] == bin[cur]) {
          component[nb] = id;
          stack.push_back(nb);
        }
      }
    }
  }

  // (negative area, first pixel, component id)
  std::vector<std::tuple<long, std::size_t, std::size_t>> keep;
  for (std::size_t id = 0; id < members.size(); ++id) {
    const auto& m = members[id];
    if (static_cast<double>(m.size()) < min_area_frac * static_cast<double>(n)) {
      continue;
    }
    keep.emplace_back(-static_cast<long>(m.size()),
                      *std::min_element(m.begin(), m.end()), id);
  }
  std::sort(keep.begin(), keep.end());

  Partition out{std::vector<std::int32_t>(n, 0),
                std::vector<std::size_t>(keep.size() + 1, 0)};
  for (std::size_t rank = 0; rank < keep.size(); ++rank) {
    for (std::size_t px : members[std::get<2>(keep[rank])]) {
      out.labels[px] = static_cast<std::int32_t>(rank + 1);
    }
  }
  for (std::int32_t l : out.labels) ++out.areas[static_cast<std::size_t>(l)];
  return out;
}

std::vector<std::uint32_t> near_to_far(std::span<const double> values,
                                       std::vector<std::uint32_t> subset) {
  std::vector<std::pair<double, std::uint32_t>> keys;
  keys.reserve(subset.size());
  for (std::uint32_t i : subset) keys.emplace_back(-values[i], i);
  std::sort(keys.begin(), keys.end());
  for (std::size_t t = 0; t < keys.size(); ++t) subset[t] = keys[t].second;
  return subset;
}

std::vector<std::uint32_t> gscan(const scan::ProximityMap& p) {
  std::vector<std::uint32_t> all(p.values.size());
  std::iota(all.begin(), all.end(), 0u);
  return near_to_far(p.values, std::move(all));
}

std::vector<std::uint32_t> rscan(const scan::ProximityMap& p,
                                 std::span<const std::int32_t> labels) {
  std::int32_t max_label = 0;
  for (std::int32_t l : labels) max_label = std::max(max_label, l);
  std::vector<std::vector<std::uint32_t>> groups(
      static_cast<std::size_t>(max_label) + 1);
  for (std::uint32_t i = 0; i < labels.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::vector<std::tuple<long, std::uint32_t, std::size_t>> regions;
  for (std::size_t l = 1; l < groups.size(); ++l) {
    if (groups[l].empty()) continue;
    regions.emplace_back(-static_cast<long>(groups[l].size()),
                         *std::min_element(groups[l].begin(), groups[l].end()),
                         l);
  }
  std::sort(regions.begin(), regions.end());
  std::vector<std::uint32_t> out;
  for (const auto& r : regions) {
    const auto part = near_to_far(p.values, groups[std::get<2>(r)]);
    out.insert(out.end(), part.begin(), part.end());
  }
  const auto background = near_to_far(p.values, groups[0]);
  out.insert(out.end(), background.begin(), background.end());
  return out;
}

Sequence gather(const Tensor3& x, std::span<const std::uint32_t> order) {
  Sequence s(order.size(), x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t t = 0; t < order.size(); ++t) {
      const std::size_t y = order[t] / x.width();
      const std::size_t xx = order[t] % x.width();
      s(t, c) = x.at(c, y, xx);
    }
  }
  return s;
}

Tensor3 scatter(const Sequence& s, std::span<const std::uint32_t> order,
                std::size_t height, std::size_t width) {
  // Build the inverse permutation explicitly, then read sequentially.
  std::vector<std::size_t> position_of(order.size());
  for (std::size_t t = 0; t < order.size(); ++t) position_of[order[t]] = t;
  Tensor3 out(s.cols(), height, width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t t = position_of[y * width + x];
      for (std::size_t c = 0; c < s.cols(); ++c) out.at(c, y, x) = s(t, c);
    }
  }
  return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
    }
  }
  return e;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
  Eigen::VectorXd e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) e(static_cast<Eigen::Index>(i)) = v[i];
  return e;
}

Sequence unrolled(const Sequence& x, const Sequence* depth,
                  std::span<const double> gamma, const ssm::SsmParams& p) {
  const auto n = static_cast<Eigen::Index>(p.state_size);
  const auto d = static_cast<Eigen::Index>(p.d_inner);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = p.a[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd w_b = to_eigen(p.w_b), w_c = to_eigen(p.w_c);
  const Eigen::MatrixXd w_bd = to_eigen(p.w_bdepth), w_cd = to_eigen(p.w_cdepth);
  const Eigen::VectorXd b_b = to_eigen(p.b_b), b_c = to_eigen(p.b_c);
  const Eigen::VectorXd b_bd = to_eigen(p.b_bdepth), b_cd = to_eigen(p.b_cdepth);
  const Eigen::VectorXd skip = to_eigen(p.skip);

  std::vector<Eigen::MatrixXd> states;  // every h_t, N x d
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, d);
  Sequence y(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const Eigen::VectorXd xt = to_eigen(x.row(t));
    Eigen::VectorXd b = w_b * xt + b_b;
    Eigen::VectorXd c = w_c * xt + b_c;
    if (depth != nullptr) {
      const Eigen::VectorXd zt = to_eigen(depth->row(t));
      const double g = std::clamp(gamma[t], 0.0, 1.0);
      b = (1.0 - g) * b + g * (w_bd * zt + b_bd);
      c = (1.0 - g) * c + g * (w_cd * zt + b_cd);
    }
    h = a * h + b * xt.transpose();
    states.push_back(h);
    const Eigen::RowVectorXd yt =
        c.transpose() * states.back() + skip.cwiseProduct(xt).transpose();
    for (Eigen::Index k = 0; k < d; ++k) y(t, static_cast<std::size_t>(k)) = yt(k);
  }
  return y;
}

}  // namespace

Sequence unrolled_ds_scan(const Sequence& x, const Sequence& depth,
                          std::span<const double> gamma,
                          const ssm::SsmParams& params) {
  return unrolled(x, &depth, gamma, params);
}

Sequence unrolled_vanilla_scan(const Sequence& x,
                               const ssm::SsmParams& params) {
  return unrolled(x, nullptr, {}, params);
}

double pe_entry(std::size_t height, std::size_t width, std::size_t d_inner,
                double base, std::size_t y, std::size_t x, std::size_t ch) {
  const double xn = width > 1 ? double(x) / double(width - 1) : 0.0;
  const double yn = height > 1 ? double(y) / double(height - 1) : 0.0;
  const std::size_t half = d_inner / 2;
  const double coord = ch < half ? xn : yn;
  const std::size_t local = ch < half ? ch : ch - half;
  const std::size_t band = local / 2;
  const double f = std::pow(base, -4.0 * double(band) / double(d_inner));
  return local % 2 == 0 ? std::sin(coord * f) : std::cos(coord * f);
}

std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> e(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp(v[i]);
    total += e[i];
  }
  for (double& x : e) x /= total;
  return e;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<bool> taken(scores.size(), false);
  std::vector<std::size_t> out;
  for (std::size_t round = 0; round < k; ++round) {
    std::size_t best = scores.size();
    for (std::size_t m = 0; m < scores.size(); ++m) {
      if (taken[m]) continue;
      if (best == scores.size() || scores[m] > scores[best]) best = m;
    }
    taken[best] = true;
    out.push_back(best);
  }
  return out;
}

Tensor3 sc_refine(const Tensor3& image, const Matrix& memory, std::size_t k) {
  const std::size_t c = image.channels();
  Tensor3 out(c, image.height(), image.width());
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      std::vector<double> scores(memory.rows(), 0.0);
      for (std::size_t m = 0; m < memory.rows(); ++m) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          scores[m] += image.at(ch, y, x) * memory(m, ch);
        }
      }
      const std::vector<std::size_t> idx = top_k(scores, k);
      std::vector<double> top(k);
      for (std::size_t i = 0; i < k; ++i) top[i] = scores[idx[i]];
      const std::vector<double> wa = softmax(top);
      for (std::size_t ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += wa[i] * memory(idx[i], ch);
        out.at(ch, y, x) = acc;
      }
    }
  }
  return out;
}

Matrix memory_increment(const Matrix& pooled, const Matrix& match_image,
                        const Matrix& match_memory, std::size_t items) {
  Matrix delta(items, pooled.cols());
  for (std::size_t b = 0; b < pooled.rows(); ++b) {
    std::size_t j = 0;
    for (std::size_t m = 1; m < items; ++m) {
      if (match_image(b, m) > match_image(b, j)) j = m;
    }
    for (std::size_t c = 0; c < pooled.cols(); ++c) {
      delta(j, c) += match_memory(b, j) * pooled(b, c);
    }
  }
  return delta;
}

GpReference gp_adjust(const Tensor3& image, const Matrix& memory,
                      const mecm::LinearMap& mask_proj) {
  const std::size_t c = image.channels();
  std::vector<double> pooled(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t x = 0; x < image.width(); ++x) {
        pooled[ch] += image.at(ch, y, x);
      }
    }
    pooled[ch] /= double(image.pixels());
  }
  std::vector<double> sim(memory.rows(), 0.0);
  for (std::size_t m = 0; m < memory.rows(); ++m) {
    for (std::size_t ch = 0; ch < c; ++ch) sim[m] += pooled[ch] * memory(m, ch);
  }
  GpReference r;
  r.match_image = softmax(sim);
  r.response.assign(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t m = 0; m < memory.rows(); ++m) {
      r.response[ch] += r.match_image[m] * memory(m, ch);
    }
  }
  r.output = image;
  for (std::size_t o = 0; o < c; ++o) {
    double u = mask_proj.bias[o];
    for (std::size_t i = 0; i < c; ++i) {
      u += mask_proj.weights(o, i) * r.response[i];
      u += mask_proj.weights(o, c + i) * pooled[i];
    }
    const double mask = 1.0 / (1.0 + std::exp(-u));
    for (std::size_t p = 0; p < image.pixels(); ++p) r.output.at(o, p) *= mask;
  }
  return r;
}

Tensor3 conv3x3(const Tensor3& x, const mecm::Conv3x3& conv) {
  const std::size_t h = x.height(), w = x.width();
  Tensor3 padded(x.channels(), h + 2, w + 2);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        padded.at(c, y + 1, xx + 1) = x.at(c, y, xx);
      }
    }
  }
  Tensor3 out(conv.out_channels, h, w);
  for (std::size_t o = 0; o < conv.out_channels; ++o) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        double acc = conv.bias[o];
        for (std::size_t i = 0; i < conv.in_channels; ++i) {
          for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
              acc += conv.w(o, i, ky, kx) * padded.at(i, y + ky, xx + kx);
            }
          }
        }
        out.at(o, y, xx) = acc;
      }
    }
  }
  return out;
}

double coefficient_of_variation_sq(std::span<const double> row, double eps) {
  const double n = double(row.size());
  const double mu = std::accumulate(row.begin(), row.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : row) ss += (v - mu) * (v - mu);
  const double sigma = std::sqrt(ss / n);
  const double cv = sigma / (mu + eps);
  return cv * cv;
}

}  // namespace dmd::verify::oracle
