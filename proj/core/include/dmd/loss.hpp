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

#ifndef DMD_LOSS_HPP_
#define DMD_LOSS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "dmd/mecm.hpp"
#include "dmd/tensor.hpp"

namespace dmd::loss {

inline constexpr double kLoadEps = 1e-8;

enum class Layer { kTransmission, kReflection };

// Defaults are the published training weights.
struct LossWeights {
  double load_t = 0.008;
  double load_r = 0.008;
  double triplet_t = 0.1;
  double triplet_r = 0.05;
  double align_t = 0.1;
  double align_r = 0.05;
  double l1_t = 1.0;
  double l1_r = 1.0;
  double vgg_t = 0.02;

  void validate() const;
  double triplet(Layer layer) const {
    return layer == Layer::kTransmission ? triplet_t : triplet_r;
  }
  double align(Layer layer) const {
    return layer == Layer::kTransmission ? align_t : align_r;
  }

  bool operator==(const LossWeights&) const = default;
};

// Squared coefficient of variation (population std) of one gate row.
double squared_cv(std::span<const double> row, double eps = kLoadEps);

// Mean over samples (rows) of the squared CV of each layer's full gate
// distribution, weighted per layer. An empty layer contributes nothing; both
// empty is an error.
double load_loss(const Matrix& gates_t, const Matrix& gates_r,
                 const LossWeights& weights, double eps = kLoadEps);

struct LoadGrads {
  Matrix d_gates_t;
  Matrix d_gates_r;
};
LoadGrads load_loss_backward(const Matrix& gates_t, const Matrix& gates_r,
                             const LossWeights& weights,
                             double eps = kLoadEps);

// Positive/negative items picked by dot-product similarity (ties: lower
// index). With a single item the negative equals the positive and the
// triplet term is zero.
struct MatchingTerms {
  std::size_t positive = 0;
  std::size_t negative = 0;
  double d_pos = 0.0;  // ||q - m+||^2
  double d_neg = 0.0;  // ||q - m-||^2
  double triplet = 0.0;
  double align = 0.0;
};

MatchingTerms memory_matching_terms(std::span<const double> query,
                                    const mecm::MemoryBank& bank);

double memory_matching_loss(std::span<const double> query,
                            const mecm::MemoryBank& bank, Layer layer,
                            const LossWeights& weights);

struct MatchingGrads {
  std::vector<double> d_query;
  Matrix d_memory;
};
MatchingGrads memory_matching_backward(std::span<const double> query,
                                       const mecm::MemoryBank& bank,
                                       Layer layer,
                                       const LossWeights& weights);

// Perceptual feature hook. The default is the identity map.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual Tensor3 extract(const Tensor3& image) const = 0;
  // Vector-Jacobian product at `image`.
  virtual Tensor3 backward(const Tensor3& image,
                           const Tensor3& d_features) const = 0;
};

class IdentityExtractor final : public FeatureExtractor {
 public:
  Tensor3 extract(const Tensor3& image) const override { return image; }
  Tensor3 backward(const Tensor3&, const Tensor3& d_features) const override {
    return d_features;
  }
};

// Mean-reduced L1 on both layers plus the perceptual term on T.
// `extractor` may be null, meaning identity.
double appearance_loss(const Tensor3& t_hat, const Tensor3& t,
                       const Tensor3& r_hat, const Tensor3& r,
                       const FeatureExtractor* extractor,
                       const LossWeights& weights);

struct AppearanceGrads {
  Tensor3 d_t_hat;
  Tensor3 d_r_hat;
};
AppearanceGrads appearance_backward(const Tensor3& t_hat, const Tensor3& t,
                                    const Tensor3& r_hat, const Tensor3& r,
                                    const FeatureExtractor* extractor,
                                    const LossWeights& weights);

struct LossComponents {
  double load = 0.0;
  double memory = 0.0;
  double appearance = 0.0;
};

// Plain sum; throws NumericError if any component is non-finite.
double total_loss(const LossComponents& components);

}  // namespace dmd::loss

#endif  // DMD_LOSS_HPP_
