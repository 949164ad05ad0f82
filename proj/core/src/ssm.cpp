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

#include "dmd/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmd/error.hpp"
#include "dmd/random.hpp"

namespace dmd::ssm {
namespace {

void check_vector(const std::vector<double>& v, std::size_t n,
                  const char* name) {
  if (v.size() != n) {
    throw ValidationError(std::string("SsmParams: ") + name + " has size " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(n));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValidationError(std::string("SsmParams: ") + name +
                            " has a non-finite entry");
    }
  }
}

void check_matrix(const Matrix& m, std::size_t rows, std::size_t cols,
                  const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ValidationError(std::string("SsmParams: ") + name + " has shape " +
                          std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()) + ", expected " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  check_vector(m.data(), rows * cols, name);
}

// out = W v + bias for every row of `inputs`.
Matrix project(const Matrix& w, const std::vector<double>& bias,
               const Sequence& inputs) {
  Matrix out(inputs.rows(), w.rows());
  for (std::size_t t = 0; t < inputs.rows(); ++t) {
    const auto v = inputs.row(t);
    for (std::size_t n = 0; n < w.rows(); ++n) {
      double acc = bias[n];
      const auto wr = w.row(n);
      for (std::size_t k = 0; k < v.size(); ++k) acc += wr[k] * v[k];
      out(t, n) = acc;
    }
  }
  return out;
}

double blend_scalar(double vanilla, double depth, double g) {
  if (g == 0.0) return vanilla;
  if (g == 1.0) return depth;
  return (1.0 - g) * vanilla + g * depth;
}

double clamp_gamma(double g, ScanDiagnostics* diag) {
  if (g >= 0.0 && g <= 1.0) return g;
  if (diag != nullptr) ++diag->gamma_clamped;
  if (std::isnan(g)) return 0.0;
  return std::clamp(g, 0.0, 1.0);
}

// Per-step matrices feeding the recurrence.
struct StepMatrices {
  Matrix b, c;              // vanilla projections
  Matrix b_depth, c_depth;  // empty without depth branch
  Matrix b_aware, c_aware;
  std::vector<double> gamma;  // clamped
  std::vector<bool> gamma_was_clamped;
};

StepMatrices build_step_matrices(const Sequence& x, const Sequence* depth,
                                 const GammaMap* gamma,
                                 const SsmParams& params,
                                 ScanDiagnostics* diag) {
  StepMatrices m;
  m.b = project(params.w_b, params.b_b, x);
  m.c = project(params.w_c, params.b_c, x);
  if (depth == nullptr) {
    m.b_aware = m.b;
    m.c_aware = m.c;
    return m;
  }
  m.b_depth = project(params.w_bdepth, params.b_bdepth, *depth);
  m.c_depth = project(params.w_cdepth, params.b_cdepth, *depth);
  const std::size_t steps = x.rows();
  const std::size_t n_state = params.state_size;
  m.b_aware = Matrix(steps, n_state);
  m.c_aware = Matrix(steps, n_state);
  m.gamma.resize(steps);
  m.gamma_was_clamped.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const double raw = gamma->values[t];
    const double g = clamp_gamma(raw, diag);
    m.gamma[t] = g;
    m.gamma_was_clamped[t] = (g != raw);
    for (std::size_t n = 0; n < n_state; ++n) {
      m.b_aware(t, n) = blend_scalar(m.b(t, n), m.b_depth(t, n), g);
      m.c_aware(t, n) = blend_scalar(m.c(t, n), m.c_depth(t, n), g);
    }
  }
  return m;
}

void check_inputs(const Sequence& x, const Sequence* depth,
                  const GammaMap* gamma, const SsmParams& params) {
  params.validate();
  if (x.cols() != params.d_inner) {
    throw ValidationError("ssm: input width " + std::to_string(x.cols()) +
                          " does not match d_inner " +
                          std::to_string(params.d_inner));
  }
  if (depth != nullptr) {
    if (depth->rows() != x.rows() || depth->cols() != params.depth_dim) {
      throw ValidationError("ds_scan: depth features must be " +
                            std::to_string(x.rows()) + "x" +
                            std::to_string(params.depth_dim));
    }
    if (gamma->values.size() != x.rows()) {
      throw ValidationError("ds_scan: gamma length " +
                            std::to_string(gamma->values.size()) +
                            " does not match sequence length " +
                            std::to_string(x.rows()));
    }
  }
}

// Runs the recurrence. When `states` is non-null it receives h_t for every
// step laid out as [t][channel][n].
Sequence recur(const Sequence& x, const StepMatrices& m,
               const SsmParams& params, std::vector<double>* states) {
  const std::size_t steps = x.rows();
  const std::size_t d = params.d_inner;
  const std::size_t n_state = params.state_size;
  std::vector<double> h(d * n_state, 0.0);
  if (states != nullptr) states->assign(steps * d * n_state, 0.0);
  Sequence y(steps, d);
  for (std::size_t t = 0; t < steps; ++t) {
    bool finite = true;
    for (std::size_t c = 0; c < d; ++c) {
      const double xc = x(t, c);
      double* hc = h.data() + c * n_state;
      double acc = 0.0;
      for (std::size_t n = 0; n < n_state; ++n) {
        hc[n] = params.a[n] * hc[n] + m.b_aware(t, n) * xc;
        acc += m.c_aware(t, n) * hc[n];
      }
      const double out = acc + params.skip[c] * xc;
      finite = finite && std::isfinite(acc) && std::isfinite(out);
      y(t, c) = out;
    }
    if (!finite) {
      throw NumericError("ssm state became non-finite at step " +
                         std::to_string(t));
    }
    if (states != nullptr) {
      std::copy(h.begin(), h.end(), states->begin() + t * d * n_state);
    }
  }
  return y;
}

// Accumulates dW += g v^T, db += g and dv += W^T g for one step.
void projection_backward(const Matrix& w, std::span<const double> v,
                         std::span<const double> g, Matrix& dw,
                         std::vector<double>& db, std::span<double> dv) {
  for (std::size_t n = 0; n < w.rows(); ++n) {
    const double gn = g[n];
    db[n] += gn;
    if (gn == 0.0) continue;
    for (std::size_t k = 0; k < v.size(); ++k) {
      dw(n, k) += gn * v[k];
      dv[k] += w(n, k) * gn;
    }
  }
}

SsmGrads backward_impl(const Sequence& x, const Sequence* depth,
                       const GammaMap* gamma, const SsmParams& params,
                       const Sequence& dy) {
  check_inputs(x, depth, gamma, params);
  if (dy.rows() != x.rows() || dy.cols() != x.cols()) {
    throw ValidationError("ssm backward: dy shape does not match output");
  }
  const StepMatrices m = build_step_matrices(x, depth, gamma, params, nullptr);
  std::vector<double> states;
  recur(x, m, params, &states);

  const std::size_t steps = x.rows();
  const std::size_t d = params.d_inner;
  const std::size_t n_state = params.state_size;

  SsmGrads g;
  g.dx = Sequence(steps, d);
  g.dparams = SsmParams::zeros(n_state, d, params.depth_dim);
  if (depth != nullptr) {
    g.ddepth = Sequence(steps, params.depth_dim);
    g.dgamma.assign(steps, 0.0);
  }

  std::vector<double> carry(d * n_state, 0.0);  // A * dL/dh_{t+1}
  std::vector<double> dh(d * n_state);
  std::vector<double> d_baware(n_state), d_caware(n_state);
  std::vector<double> d_b(n_state), d_c(n_state);
  std::vector<double> d_bd(n_state), d_cd(n_state);

  for (std::size_t step = steps; step-- > 0;) {
    const double* h_t = states.data() + step * d * n_state;
    const double* h_prev =
        step > 0 ? states.data() + (step - 1) * d * n_state : nullptr;
    std::fill(d_baware.begin(), d_baware.end(), 0.0);
    std::fill(d_caware.begin(), d_caware.end(), 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      const double gy = dy(step, c);
      const double xc = x(step, c);
      double dxc = gy * params.skip[c];
      g.dparams.skip[c] += gy * xc;
      for (std::size_t n = 0; n < n_state; ++n) {
        const std::size_t i = c * n_state + n;
        dh[i] = carry[i] + gy * m.c_aware(step, n);
        d_caware[n] += gy * h_t[i];
        d_baware[n] += dh[i] * xc;
        dxc += dh[i] * m.b_aware(step, n);
        if (h_prev != nullptr) g.dparams.a[n] += dh[i] * h_prev[i];
        carry[i] = params.a[n] * dh[i];
      }
      g.dx(step, c) += dxc;
    }

    if (depth == nullptr) {
      d_b = d_baware;
      d_c = d_caware;
    } else {
      const double gm = m.gamma[step];
      double dgam = 0.0;
      for (std::size_t n = 0; n < n_state; ++n) {
        d_b[n] = (1.0 - gm) * d_baware[n];
        d_bd[n] = gm * d_baware[n];
        d_c[n] = (1.0 - gm) * d_caware[n];
        d_cd[n] = gm * d_caware[n];
        dgam += d_baware[n] * (m.b_depth(step, n) - m.b(step, n)) +
                d_caware[n] * (m.c_depth(step, n) - m.c(step, n));
      }
      g.dgamma[step] = m.gamma_was_clamped[step] ? 0.0 : dgam;
      projection_backward(params.w_bdepth, depth->row(step), d_bd,
                          g.dparams.w_bdepth, g.dparams.b_bdepth,
                          g.ddepth.row(step));
      projection_backward(params.w_cdepth, depth->row(step), d_cd,
                          g.dparams.w_cdepth, g.dparams.b_cdepth,
                          g.ddepth.row(step));
    }
    projection_backward(params.w_b, x.row(step), d_b, g.dparams.w_b,
                        g.dparams.b_b, g.dx.row(step));
    projection_backward(params.w_c, x.row(step), d_c, g.dparams.w_c,
                        g.dparams.b_c, g.dx.row(step));
  }
  return g;
}

}  // namespace

void SsmParams::validate() const {
  if (state_size == 0 || d_inner == 0) {
    throw ValidationError("SsmParams: state_size and d_inner must be >= 1");
  }
  check_vector(a, state_size, "A");
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!(std::abs(a[n]) < 1.0)) {
      throw ValidationError("SsmParams: |A[" + std::to_string(n) +
                            "]| = " + std::to_string(std::abs(a[n])) +
                            " must be < 1");
    }
  }
  check_vector(skip, d_inner, "D");
  check_matrix(w_b, state_size, d_inner, "W_B");
  check_matrix(w_c, state_size, d_inner, "W_C");
  check_vector(b_b, state_size, "b_B");
  check_vector(b_c, state_size, "b_C");
  check_matrix(w_bdepth, state_size, depth_dim, "W_Bdepth");
  check_matrix(w_cdepth, state_size, depth_dim, "W_Cdepth");
  check_vector(b_bdepth, state_size, "b_Bdepth");
  check_vector(b_cdepth, state_size, "b_Cdepth");
}

SsmParams SsmParams::zeros(std::size_t state_size, std::size_t d_inner,
                           std::size_t depth_dim) {
  SsmParams p;
  p.state_size = state_size;
  p.d_inner = d_inner;
  p.depth_dim = depth_dim;
  p.a.assign(state_size, 0.0);
  p.skip.assign(d_inner, 0.0);
  p.w_b = Matrix(state_size, d_inner);
  p.w_c = Matrix(state_size, d_inner);
  p.b_b.assign(state_size, 0.0);
  p.b_c.assign(state_size, 0.0);
  p.w_bdepth = Matrix(state_size, depth_dim);
  p.w_cdepth = Matrix(state_size, depth_dim);
  p.b_bdepth.assign(state_size, 0.0);
  p.b_cdepth.assign(state_size, 0.0);
  return p;
}

SsmParams SsmParams::random(std::size_t state_size, std::size_t d_inner,
                            std::size_t depth_dim, std::uint64_t seed) {
  Rng rng(seed);
  SsmParams p = zeros(state_size, d_inner, depth_dim);
  for (double& v : p.a) v = rng.uniform(0.3, 0.9);
  for (double& v : p.skip) v = rng.normal(0.0, 0.5);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(d_inner));
  const double depth_scale =
      depth_dim > 0 ? 1.0 / std::sqrt(static_cast<double>(depth_dim)) : 0.0;
  for (double& v : p.w_b.data()) v = rng.normal(0.0, in_scale);
  for (double& v : p.w_c.data()) v = rng.normal(0.0, in_scale);
  for (double& v : p.b_b) v = rng.normal(0.0, 0.1);
  for (double& v : p.b_c) v = rng.normal(0.0, 0.1);
  for (double& v : p.w_bdepth.data()) v = rng.normal(0.0, depth_scale);
  for (double& v : p.w_cdepth.data()) v = rng.normal(0.0, depth_scale);
  for (double& v : p.b_bdepth) v = rng.normal(0.0, 0.1);
  for (double& v : p.b_cdepth) v = rng.normal(0.0, 0.1);
  return p;
}

std::vector<double> pack(const SsmParams& p) {
  std::vector<double> out;
  auto append = [&out](const std::vector<double>& v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  append(p.a);
  append(p.skip);
  append(p.w_b.data());
  append(p.b_b);
  append(p.w_c.data());
  append(p.b_c);
  append(p.w_bdepth.data());
  append(p.b_bdepth);
  append(p.w_cdepth.data());
  append(p.b_cdepth);
  return out;
}

void unpack(std::span<const double> packed, SsmParams& p) {
  std::size_t offset = 0;
  auto take = [&](std::vector<double>& v) {
    if (offset + v.size() > packed.size()) {
      throw ValidationError("unpack: packed vector too short");
    }
    std::copy_n(packed.begin() + offset, v.size(), v.begin());
    offset += v.size();
  };
  take(p.a);
  take(p.skip);
  take(p.w_b.data());
  take(p.b_b);
  take(p.w_c.data());
  take(p.b_c);
  take(p.w_bdepth.data());
  take(p.b_bdepth);
  take(p.w_cdepth.data());
  take(p.b_cdepth);
  if (offset != packed.size()) {
    throw ValidationError("unpack: packed vector too long");
  }
}

std::pair<std::vector<double>, std::vector<double>> blend_matrices(
    std::span<const double> b, std::span<const double> b_depth,
    std::span<const double> c, std::span<const double> c_depth, double gamma,
    ScanDiagnostics* diag) {
  if (b.size() != b_depth.size() || c.size() != c_depth.size()) {
    throw ValidationError("blend_matrices: vanilla and depth sizes differ");
  }
  const double g = clamp_gamma(gamma, diag);
  std::pair<std::vector<double>, std::vector<double>> out;
  out.first.resize(b.size());
  out.second.resize(c.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.first[i] = blend_scalar(b[i], b_depth[i], g);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.second[i] = blend_scalar(c[i], c_depth[i], g);
  }
  return out;
}

Sequence vanilla_scan(const Sequence& x, const SsmParams& params) {
  check_inputs(x, nullptr, nullptr, params);
  const StepMatrices m =
      build_step_matrices(x, nullptr, nullptr, params, nullptr);
  return recur(x, m, params, nullptr);
}

Sequence ds_scan(const Sequence& x, const Sequence& depth_feats,
                 const GammaMap& gamma, const SsmParams& params,
                 ScanDiagnostics* diag) {
  check_inputs(x, &depth_feats, &gamma, params);
  const StepMatrices m =
      build_step_matrices(x, &depth_feats, &gamma, params, diag);
  return recur(x, m, params, nullptr);
}

SsmGrads vanilla_scan_backward(const Sequence& x, const SsmParams& params,
                               const Sequence& dy) {
  return backward_impl(x, nullptr, nullptr, params, dy);
}

SsmGrads ds_scan_backward(const Sequence& x, const Sequence& depth_feats,
                          const GammaMap& gamma, const SsmParams& params,
                          const Sequence& dy) {
  return backward_impl(x, &depth_feats, &gamma, params, dy);
}

PositionalEncoding spatial_positional_encoding(std::size_t height,
                                               std::size_t width,
                                               std::size_t d_inner,
                                               double base) {
  if (height == 0 || width == 0) {
    throw ValidationError("positional encoding needs a non-empty grid");
  }
  if (d_inner == 0 || d_inner % 4 != 0) {
    throw ValidationError("positional encoding: d_inner " +
                          std::to_string(d_inner) +
                          " is not a positive multiple of 4");
  }
  if (!(base > 1.0) || !std::isfinite(base)) {
    throw ValidationError("positional encoding: base must be > 1");
  }
  PositionalEncoding pe;
  pe.height = height;
  pe.width = width;
  pe.d_inner = d_inner;
  const std::size_t bands = d_inner / 4;
  pe.frequencies.resize(bands);
  for (std::size_t i = 0; i < bands; ++i) {
    pe.frequencies[i] = std::pow(
        base, -4.0 * static_cast<double>(i) / static_cast<double>(d_inner));
  }
  pe.table = Matrix(height * width, d_inner);
  const std::size_t half = d_inner / 2;
  for (std::size_t yi = 0; yi < height; ++yi) {
    const double y = height > 1 ? static_cast<double>(yi) / (height - 1) : 0.0;
    for (std::size_t xi = 0; xi < width; ++xi) {
      const double x = width > 1 ? static_cast<double>(xi) / (width - 1) : 0.0;
      auto row = pe.table.row(yi * width + xi);
      for (std::size_t i = 0; i < bands; ++i) {
        const double f = pe.frequencies[i];
        row[2 * i] = std::sin(x * f);
        row[2 * i + 1] = std::cos(x * f);
        row[half + 2 * i] = std::sin(y * f);
        row[half + 2 * i + 1] = std::cos(y * f);
      }
    }
  }
  return pe;
}

Sequence realign_pe(const PositionalEncoding& pe,
                    const scan::ScanOrder& order) {
  if (order.height != pe.height || order.width != pe.width ||
      order.size() != pe.table.rows()) {
    throw ValidationError("realign_pe: encoding grid does not match order");
  }
  Sequence out(order.size(), pe.d_inner);
  for (std::size_t t = 0; t < order.size(); ++t) {
    const auto src = pe.table.row(order.forward[t]);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

GammaMap gamma_from_proximity(const scan::ProximityMap& p,
                              const scan::ScanOrder& order,
                              const GammaTransform& transform) {
  GammaMap g{scan::ordered_values(p, order)};
  for (double& v : g.values) {
    if (transform) v = transform(v);
    // Constant maps keep their raw values, which may lie outside [0,1].
    v = std::clamp(v, 0.0, 1.0);
  }
  return g;
}

Sequence depth_features(const scan::ProximityMap& p,
                        const scan::ScanOrder& order) {
  const std::vector<double> v = scan::ordered_values(p, order);
  Sequence out(v.size(), 2);
  for (std::size_t t = 0; t < v.size(); ++t) {
    out(t, 0) = v[t];
    out(t, 1) = 1.0;
  }
  return out;
}

Tensor3 ds_mamba_forward(const Tensor3& x, const scan::ProximityMap& p,
                         const scan::RegionMap& regions,
                         const DsMambaParams& params,
                         const PositionalEncoding* pe,
                         const GammaTransform& transform) {
  if (x.height() != p.height || x.width() != p.width) {
    throw ValidationError("ds_mamba_forward: input and proximity sizes differ");
  }
  if (pe != nullptr && pe->d_inner != x.channels()) {
    throw ValidationError(
        "ds_mamba_forward: positional encoding width differs from channels");
  }
  const scan::ScanOrder region = scan::da_rscan(p, regions);
  const scan::ScanOrder global = scan::da_gscan(p);
  const std::array<scan::ScanOrder, 4> orders = {
      region, scan::reverse_order(region), global,
      scan::reverse_order(global)};

  Tensor3 out(x.channels(), x.height(), x.width());
  for (std::size_t b = 0; b < orders.size(); ++b) {
    const scan::ScanOrder& o = orders[b];
    Sequence seq = scan::apply_order(x, o);
    if (pe != nullptr) {
      const Sequence enc = realign_pe(*pe, o);
      for (std::size_t i = 0; i < seq.data().size(); ++i) {
        seq.data()[i] += enc.data()[i];
      }
    }
    const Sequence y = ds_scan(seq, depth_features(p, o),
                               gamma_from_proximity(p, o, transform),
                               params.branches[b]);
    const Tensor3 restored = scan::restore_order(y, o);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.data()[i] += restored.data()[i];
    }
  }
  return out;
}

}  // namespace dmd::ssm
