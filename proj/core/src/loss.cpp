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

#include "dmd/loss.hpp"

#include <cmath>
#include <string>

#include "dmd/error.hpp"

namespace dmd::loss {
namespace {

double l1_mean(const Tensor3& a, const Tensor3& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(a.data()[i] - b.data()[i]);
  }
  return acc / static_cast<double>(a.size());
}

// d/da of mean |a - b|, with sign(0) = 0.
Tensor3 l1_mean_grad(const Tensor3& a, const Tensor3& b, double scale) {
  Tensor3 g(a.channels(), a.height(), a.width());
  const double k = scale / static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    g.data()[i] = d > 0.0 ? k : (d < 0.0 ? -k : 0.0);
  }
  return g;
}

void require_same(const Tensor3& a, const Tensor3& b, const char* what) {
  if (!a.same_shape(b) || a.size() == 0) {
    throw ValidationError(std::string("appearance_loss: ") + what +
                          " shapes do not match");
  }
}

double layer_load(const Matrix& gates, double lambda, double eps) {
  if (gates.rows() == 0) return 0.0;
  if (gates.cols() == 0) throw ValidationError("load_loss: zero experts");
  double acc = 0.0;
  for (std::size_t s = 0; s < gates.rows(); ++s) {
    for (double v : gates.row(s)) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError("load_loss: gate weights must be finite and "
                              "non-negative");
      }
    }
    acc += squared_cv(gates.row(s), eps);
  }
  return lambda * acc / static_cast<double>(gates.rows());
}

Matrix layer_load_grad(const Matrix& gates, double lambda, double eps) {
  Matrix g(gates.rows(), gates.cols());
  if (gates.rows() == 0) return g;
  const double e = static_cast<double>(gates.cols());
  const double scale = lambda / static_cast<double>(gates.rows());
  for (std::size_t s = 0; s < gates.rows(); ++s) {
    const auto row = gates.row(s);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= e;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= e;
    const double denom = mean + eps;
    // cv^2 = var / denom^2
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double d_var = 2.0 * (row[i] - mean) / e;
      g(s, i) = scale * (d_var / (denom * denom) -
                         2.0 * var / (denom * denom * denom) / e);
    }
  }
  return g;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

void LossWeights::validate() const {
  const double all[] = {load_t, load_r, triplet_t, triplet_r, align_t,
                        align_r, l1_t,   l1_r,      vgg_t};
  for (double w : all) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("loss weights must be finite and >= 0");
    }
  }
}

double squared_cv(std::span<const double> row, double eps) {
  if (row.empty()) throw ValidationError("squared_cv: empty row");
  const double n = static_cast<double>(row.size());
  double mean = 0.0;
  for (double v : row) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : row) var += (v - mean) * (v - mean);
  var /= n;
  const double denom = mean + eps;
  return var / (denom * denom);
}

double load_loss(const Matrix& gates_t, const Matrix& gates_r,
                 const LossWeights& weights, double eps) {
  weights.validate();
  if (gates_t.rows() == 0 && gates_r.rows() == 0) {
    throw ValidationError("load_loss: empty weight set");
  }
  return layer_load(gates_t, weights.load_t, eps) +
         layer_load(gates_r, weights.load_r, eps);
}

LoadGrads load_loss_backward(const Matrix& gates_t, const Matrix& gates_r,
                             const LossWeights& weights, double eps) {
  weights.validate();
  if (gates_t.rows() == 0 && gates_r.rows() == 0) {
    throw ValidationError("load_loss: empty weight set");
  }
  return {layer_load_grad(gates_t, weights.load_t, eps),
          layer_load_grad(gates_r, weights.load_r, eps)};
}

MatchingTerms memory_matching_terms(std::span<const double> query,
                                    const mecm::MemoryBank& bank) {
  if (bank.size() == 0) throw ValidationError("memory matching: empty bank");
  if (query.size() != bank.channels()) {
    throw ValidationError("memory matching: query has " +
                          std::to_string(query.size()) +
                          " channels, bank has " +
                          std::to_string(bank.channels()));
  }
  // Two-slot selection keeps the first occurrence on ties.
  std::size_t best = 0;
  std::size_t second = bank.size();
  double best_sim = 0.0;
  double second_sim = 0.0;
  for (std::size_t m = 0; m < bank.size(); ++m) {
    double sim = 0.0;
    const auto item = bank.items.row(m);
    for (std::size_t i = 0; i < query.size(); ++i) sim += query[i] * item[i];
    if (m == 0 || sim > best_sim) {
      if (m != 0) {
        second = best;
        second_sim = best_sim;
      }
      best = m;
      best_sim = sim;
    } else if (second == bank.size() || sim > second_sim) {
      second = m;
      second_sim = sim;
    }
  }
  MatchingTerms t;
  t.positive = best;
  t.d_pos = squared_distance(query, bank.items.row(best));
  t.align = t.d_pos;
  if (second == bank.size()) {
    t.negative = best;
    t.d_neg = t.d_pos;
    t.triplet = 0.0;
  } else {
    t.negative = second;
    t.d_neg = squared_distance(query, bank.items.row(second));
    t.triplet = std::max(t.d_pos - t.d_neg, 0.0);
  }
  return t;
}

double memory_matching_loss(std::span<const double> query,
                            const mecm::MemoryBank& bank, Layer layer,
                            const LossWeights& weights) {
  weights.validate();
  const MatchingTerms t = memory_matching_terms(query, bank);
  return weights.triplet(layer) * t.triplet + weights.align(layer) * t.align;
}

MatchingGrads memory_matching_backward(std::span<const double> query,
                                       const mecm::MemoryBank& bank,
                                       Layer layer,
                                       const LossWeights& weights) {
  weights.validate();
  const MatchingTerms t = memory_matching_terms(query, bank);
  const std::size_t c = query.size();
  MatchingGrads g{std::vector<double>(c, 0.0), Matrix(bank.size(), c)};
  const auto pos = bank.items.row(t.positive);
  const auto neg = bank.items.row(t.negative);
  const double la = weights.align(layer);
  const double lt =
      (t.negative != t.positive && t.d_pos - t.d_neg > 0.0)
          ? weights.triplet(layer)
          : 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    const double to_pos = query[i] - pos[i];
    const double to_neg = query[i] - neg[i];
    g.d_query[i] = 2.0 * (la + lt) * to_pos - 2.0 * lt * to_neg;
    g.d_memory(t.positive, i) -= 2.0 * (la + lt) * to_pos;
    if (lt != 0.0) g.d_memory(t.negative, i) += 2.0 * lt * to_neg;
  }
  return g;
}

double appearance_loss(const Tensor3& t_hat, const Tensor3& t,
                       const Tensor3& r_hat, const Tensor3& r,
                       const FeatureExtractor* extractor,
                       const LossWeights& weights) {
  weights.validate();
  require_same(t_hat, t, "transmission");
  require_same(r_hat, r, "reflection");
  const IdentityExtractor identity;
  const FeatureExtractor& phi = extractor != nullptr ? *extractor : identity;
  const Tensor3 f_hat = phi.extract(t_hat);
  const Tensor3 f_ref = phi.extract(t);
  require_same(f_hat, f_ref, "feature");
  return weights.l1_t * l1_mean(t_hat, t) + weights.l1_r * l1_mean(r_hat, r) +
         weights.vgg_t * l1_mean(f_hat, f_ref);
}

AppearanceGrads appearance_backward(const Tensor3& t_hat, const Tensor3& t,
                                    const Tensor3& r_hat, const Tensor3& r,
                                    const FeatureExtractor* extractor,
                                    const LossWeights& weights) {
  weights.validate();
  require_same(t_hat, t, "transmission");
  require_same(r_hat, r, "reflection");
  const IdentityExtractor identity;
  const FeatureExtractor& phi = extractor != nullptr ? *extractor : identity;
  const Tensor3 f_hat = phi.extract(t_hat);
  const Tensor3 f_ref = phi.extract(t);
  AppearanceGrads g;
  g.d_t_hat = l1_mean_grad(t_hat, t, weights.l1_t);
  const Tensor3 d_feat =
      phi.backward(t_hat, l1_mean_grad(f_hat, f_ref, weights.vgg_t));
  for (std::size_t i = 0; i < g.d_t_hat.size(); ++i) {
    g.d_t_hat.data()[i] += d_feat.data()[i];
  }
  g.d_r_hat = l1_mean_grad(r_hat, r, weights.l1_r);
  return g;
}

double total_loss(const LossComponents& c) {
  if (!std::isfinite(c.load) || !std::isfinite(c.memory) ||
      !std::isfinite(c.appearance)) {
    throw NumericError("total_loss: non-finite component");
  }
  return c.load + c.memory + c.appearance;
}

}  // namespace dmd::loss
