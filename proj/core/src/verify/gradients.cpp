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

#include "dmd/verify/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>

#include "dmd/error.hpp"
#include "dmd/loss.hpp"
#include "dmd/mecm.hpp"
#include "dmd/random.hpp"
#include "dmd/ssm.hpp"
#include "dmd/verify/generators.hpp"

namespace dmd::verify {
namespace {

constexpr int kMaxResample = 200;

// Flat parameter vector with typed views into consecutive slices.
class Cursor {
 public:
  explicit Cursor(std::span<const double> v) : v_(v) {}

  void read(std::vector<double>& dst) {
    std::copy_n(v_.begin() + static_cast<std::ptrdiff_t>(pos_), dst.size(),
                dst.begin());
    pos_ += dst.size();
  }
  std::span<const double> take(std::size_t n) {
    auto s = v_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const double> v_;
  std::size_t pos_ = 0;
};

void append(std::vector<double>& dst, std::span<const double> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

double contract(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Problem {
  std::vector<double> x;
  ScalarFn f;
  GradientFn grad;
};

Problem vanilla_scan_problem(Rng& rng) {
  const std::size_t length = 10, d = 3, n = 2;
  const Sequence x = gen::sequence(rng, length, d);
  const ssm::SsmParams params = gen::ssm_params(rng, n, d, 2);
  const Sequence r = gen::sequence(rng, length, d);

  Problem p;
  append(p.x, x.data());
  append(p.x, ssm::pack(params));
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Sequence xs(length, d);
    cur.read(xs.data());
    ssm::SsmParams ps = params;
    ssm::unpack(cur.take(v.size() - length * d), ps);
    return std::pair{xs, ps};
  };
  p.f = [=](std::span<const double> v) {
    const auto [xs, ps] = split(v);
    return contract(r.data(), ssm::vanilla_scan(xs, ps).data());
  };
  p.grad = [=](std::span<const double> v) {
    const auto [xs, ps] = split(v);
    const ssm::SsmGrads g = ssm::vanilla_scan_backward(xs, ps, r);
    std::vector<double> out;
    append(out, g.dx.data());
    append(out, ssm::pack(g.dparams));
    return out;
  };
  return p;
}

Problem ds_scan_problem(Rng& rng) {
  const std::size_t length = 10, d = 3, n = 2, z = 2;
  const Sequence x = gen::sequence(rng, length, d);
  const Sequence depth = gen::sequence(rng, length, z, 0.0, 1.0);
  std::vector<double> gamma(length);
  for (double& g : gamma) g = rng.uniform(0.05, 0.95);
  const ssm::SsmParams params = gen::ssm_params(rng, n, d, z);
  const Sequence r = gen::sequence(rng, length, d);

  Problem p;
  append(p.x, x.data());
  append(p.x, depth.data());
  append(p.x, gamma);
  append(p.x, ssm::pack(params));
  struct Parts {
    Sequence x, depth;
    ssm::GammaMap gamma;
    ssm::SsmParams params;
  };
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Parts parts{Sequence(length, d), Sequence(length, z),
                ssm::GammaMap{std::vector<double>(length)}, params};
    cur.read(parts.x.data());
    cur.read(parts.depth.data());
    cur.read(parts.gamma.values);
    ssm::unpack(cur.take(v.size() - length * (d + z + 1)), parts.params);
    return parts;
  };
  p.f = [=](std::span<const double> v) {
    const Parts s = split(v);
    return contract(r.data(),
                    ssm::ds_scan(s.x, s.depth, s.gamma, s.params).data());
  };
  p.grad = [=](std::span<const double> v) {
    const Parts s = split(v);
    const ssm::SsmGrads g =
        ssm::ds_scan_backward(s.x, s.depth, s.gamma, s.params, r);
    std::vector<double> out;
    append(out, g.dx.data());
    append(out, g.ddepth.data());
    append(out, g.dgamma);
    append(out, ssm::pack(g.dparams));
    return out;
  };
  return p;
}

Matrix gate_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(0.05, 1.0);
  return m;
}

Problem load_loss_problem(Rng& rng) {
  const std::size_t b = 3, e = 4;
  const Matrix gt = gate_matrix(rng, b, e);
  const Matrix gr = gate_matrix(rng, b, e);
  const loss::LossWeights w;
  Problem p;
  append(p.x, gt.data());
  append(p.x, gr.data());
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Matrix a(b, e), c(b, e);
    cur.read(a.data());
    cur.read(c.data());
    return std::pair{a, c};
  };
  p.f = [=](std::span<const double> v) {
    const auto [a, c] = split(v);
    return loss::load_loss(a, c, w);
  };
  p.grad = [=](std::span<const double> v) {
    const auto [a, c] = split(v);
    const loss::LoadGrads g = loss::load_loss_backward(a, c, w);
    std::vector<double> out;
    append(out, g.d_gates_t.data());
    append(out, g.d_gates_r.data());
    return out;
  };
  return p;
}

// True when the positive/negative choice and the hinge are stable under
// perturbations much larger than the finite-difference step.
bool matching_is_smooth(std::span<const double> q, const mecm::MemoryBank& bank) {
  std::vector<double> sims;
  for (std::size_t m = 0; m < bank.size(); ++m) {
    sims.push_back(contract(q, bank.items.row(m)));
  }
  std::sort(sims.begin(), sims.end(), std::greater<>());
  if (sims.size() >= 2 && sims[0] - sims[1] < 0.05) return false;
  if (sims.size() >= 3 && sims[1] - sims[2] < 0.05) return false;
  const loss::MatchingTerms t = loss::memory_matching_terms(q, bank);
  return std::abs(t.d_pos - t.d_neg) > 0.05;
}

Problem matching_problem(Rng& rng) {
  const std::size_t c = 4, m = 5;
  std::vector<double> q(c);
  mecm::MemoryBank bank;
  for (int attempt = 0;; ++attempt) {
    if (attempt > kMaxResample) {
      throw NumericError("gradient check: no smooth memory matching case");
    }
    for (double& v : q) v = rng.uniform(-1.0, 1.0);
    bank = gen::bank(rng, m, c);
    // Item norms in [0.5, 1.5]; the hinge is active for part of the cases.
    for (std::size_t i = 0; i < m; ++i) {
      const double s = rng.uniform(0.5, 1.5);
      for (double& v : bank.items.row(i)) v *= s;
    }
    if (matching_is_smooth(q, bank)) break;
  }
  const loss::LossWeights w;
  Problem p;
  append(p.x, q);
  append(p.x, bank.items.data());
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    std::vector<double> qs(c);
    cur.read(qs);
    mecm::MemoryBank bs = bank;
    cur.read(bs.items.data());
    return std::pair{qs, bs};
  };
  p.f = [=](std::span<const double> v) {
    const auto [qs, bs] = split(v);
    return loss::memory_matching_loss(qs, bs, loss::Layer::kTransmission, w);
  };
  p.grad = [=](std::span<const double> v) {
    const auto [qs, bs] = split(v);
    const loss::MatchingGrads g =
        loss::memory_matching_backward(qs, bs, loss::Layer::kTransmission, w);
    std::vector<double> out;
    append(out, g.d_query);
    append(out, g.d_memory.data());
    return out;
  };
  return p;
}

// Prediction whose every entry is at least `gap` away from the target, so
// the L1 term stays differentiable at the probe points.
Tensor3 away_from(Rng& rng, const Tensor3& target, double gap) {
  Tensor3 out = target;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mag = rng.uniform(gap, 0.5);
    out.data()[i] += rng.uniform() < 0.5 ? -mag : mag;
  }
  return out;
}

Problem appearance_problem(Rng& rng) {
  const std::size_t c = 2, h = 3, w = 3;
  const Tensor3 t = gen::tensor(rng, c, h, w, 0.0, 1.0);
  const Tensor3 r = gen::tensor(rng, c, h, w, 0.0, 1.0);
  const Tensor3 t_hat = away_from(rng, t, 1e-2);
  const Tensor3 r_hat = away_from(rng, r, 1e-2);
  const loss::LossWeights weights;
  const auto extractor = std::make_shared<loss::IdentityExtractor>();
  Problem p;
  append(p.x, t_hat.data());
  append(p.x, r_hat.data());
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Tensor3 a(c, h, w), b(c, h, w);
    cur.read(a.data());
    cur.read(b.data());
    return std::pair{a, b};
  };
  p.f = [=](std::span<const double> v) {
    const auto [a, b] = split(v);
    return loss::appearance_loss(a, t, b, r, extractor.get(), weights);
  };
  p.grad = [=](std::span<const double> v) {
    const auto [a, b] = split(v);
    const loss::AppearanceGrads g =
        loss::appearance_backward(a, t, b, r, extractor.get(), weights);
    std::vector<double> out;
    append(out, g.d_t_hat.data());
    append(out, g.d_r_hat.data());
    return out;
  };
  return p;
}

Problem total_loss_problem(Rng& rng) {
  Problem load = load_loss_problem(rng);
  Problem match = matching_problem(rng);
  Problem look = appearance_problem(rng);
  const std::size_t n_load = load.x.size();
  const std::size_t n_match = match.x.size();
  Problem p;
  append(p.x, load.x);
  append(p.x, match.x);
  append(p.x, look.x);
  p.f = [=](std::span<const double> v) {
    loss::LossComponents parts;
    parts.load = load.f(v.subspan(0, n_load));
    parts.memory = match.f(v.subspan(n_load, n_match));
    parts.appearance = look.f(v.subspan(n_load + n_match));
    return loss::total_loss(parts);
  };
  p.grad = [=](std::span<const double> v) {
    std::vector<double> out = load.grad(v.subspan(0, n_load));
    append(out, match.grad(v.subspan(n_load, n_match)));
    append(out, look.grad(v.subspan(n_load + n_match)));
    return out;
  };
  return p;
}

Problem gp_adjust_problem(Rng& rng) {
  const std::size_t c = 3, h = 3, w = 3, m = 4;
  const Tensor3 image = gen::tensor(rng, c, h, w);
  const mecm::MemoryBank bank = gen::bank(rng, m, c);
  mecm::LinearMap proj{Matrix(c, 2 * c), std::vector<double>(c)};
  for (double& v : proj.weights.data()) v = rng.normal(0.0, 0.7);
  for (double& v : proj.bias) v = rng.normal(0.0, 0.3);
  const Tensor3 r = gen::tensor(rng, c, h, w);

  Problem p;
  append(p.x, image.data());
  append(p.x, bank.items.data());
  append(p.x, proj.weights.data());
  append(p.x, proj.bias);
  struct Parts {
    Tensor3 image;
    mecm::MemoryBank bank;
    mecm::LinearMap proj;
  };
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Parts s{Tensor3(c, h, w), bank, proj};
    cur.read(s.image.data());
    cur.read(s.bank.items.data());
    cur.read(s.proj.weights.data());
    cur.read(s.proj.bias);
    return s;
  };
  p.f = [=](std::span<const double> v) {
    const Parts s = split(v);
    const std::vector<Tensor3> batch{s.image};
    return contract(r.data(),
                    mecm::gp_adjust(batch, s.bank, s.proj).outputs[0].data());
  };
  p.grad = [=](std::span<const double> v) {
    const Parts s = split(v);
    const mecm::GpGrads g = mecm::gp_adjust_backward(s.image, s.bank, s.proj, r);
    std::vector<double> out;
    append(out, g.d_input.data());
    append(out, g.d_memory.data());
    append(out, g.d_mask_proj.weights.data());
    append(out, g.d_mask_proj.bias);
    return out;
  };
  return p;
}

bool retrieval_is_smooth(const Tensor3& image, const mecm::MemoryBank& bank,
                         std::size_t k) {
  for (std::size_t px = 0; px < image.pixels(); ++px) {
    std::vector<double> scores;
    for (std::size_t m = 0; m < bank.size(); ++m) {
      double s = 0.0;
      for (std::size_t ch = 0; ch < image.channels(); ++ch) {
        s += image.at(ch, px) * bank.items(m, ch);
      }
      scores.push_back(s);
    }
    std::sort(scores.begin(), scores.end(), std::greater<>());
    if (scores[k - 1] - scores[k] < 0.02) return false;
  }
  return true;
}

Problem sc_refine_problem(Rng& rng) {
  const std::size_t c = 3, h = 2, w = 2, m = 5, k = 2;
  Tensor3 image;
  mecm::MemoryBank bank;
  for (int attempt = 0;; ++attempt) {
    if (attempt > kMaxResample) {
      throw NumericError("gradient check: no smooth retrieval case");
    }
    image = gen::tensor(rng, c, h, w);
    bank = gen::bank(rng, m, c);
    if (retrieval_is_smooth(image, bank, k)) break;
  }
  const Tensor3 r = gen::tensor(rng, c, h, w);
  Problem p;
  append(p.x, image.data());
  append(p.x, bank.items.data());
  auto split = [=](std::span<const double> v) {
    Cursor cur(v);
    Tensor3 img(c, h, w);
    mecm::MemoryBank b = bank;
    cur.read(img.data());
    cur.read(b.items.data());
    return std::pair{img, b};
  };
  p.f = [=](std::span<const double> v) {
    const auto [img, b] = split(v);
    return contract(r.data(), mecm::sc_refine(img, b, k).output.data());
  };
  p.grad = [=](std::span<const double> v) {
    const auto [img, b] = split(v);
    const mecm::ScGrads g = mecm::sc_refine_backward(img, b, k, r);
    std::vector<double> out;
    append(out, g.d_input.data());
    append(out, g.d_memory.data());
    return out;
  };
  return p;
}

// Central differences cannot resolve a coordinate whose gradient is near the
// roundoff floor ulp(f) / eps; such cases are redrawn.
bool resolvable(const Problem& p) {
  const double scale = std::max(1.0, std::abs(p.f(p.x)));
  for (double g : p.grad(p.x)) {
    if (g != 0.0 && std::abs(g) < 1e-6 * scale) return false;
  }
  return true;
}

Problem make_problem(GradTarget target, Rng& rng) {
  switch (target) {
    case GradTarget::kVanillaScan:
      return vanilla_scan_problem(rng);
    case GradTarget::kDsScan:
      return ds_scan_problem(rng);
    case GradTarget::kLoadLoss:
      return load_loss_problem(rng);
    case GradTarget::kMemoryMatchingLoss:
      return matching_problem(rng);
    case GradTarget::kAppearanceLoss:
      return appearance_problem(rng);
    case GradTarget::kTotalLoss:
      return total_loss_problem(rng);
    case GradTarget::kGpAdjust:
      return gp_adjust_problem(rng);
    case GradTarget::kScRefine:
      return sc_refine_problem(rng);
  }
  throw ValidationError("unknown gradient target");
}

}  // namespace

const char* to_string(GradTarget target) {
  switch (target) {
    case GradTarget::kVanillaScan:
      return "vanilla_scan";
    case GradTarget::kDsScan:
      return "ds_scan";
    case GradTarget::kLoadLoss:
      return "load_loss";
    case GradTarget::kMemoryMatchingLoss:
      return "memory_matching_loss";
    case GradTarget::kAppearanceLoss:
      return "appearance_loss";
    case GradTarget::kTotalLoss:
      return "total_loss";
    case GradTarget::kGpAdjust:
      return "gp_adjust";
    case GradTarget::kScRefine:
      return "sc_refine";
  }
  return "?";
}

std::vector<GradTarget> all_grad_targets() {
  return {GradTarget::kVanillaScan,        GradTarget::kDsScan,
          GradTarget::kLoadLoss,           GradTarget::kMemoryMatchingLoss,
          GradTarget::kAppearanceLoss,     GradTarget::kTotalLoss,
          GradTarget::kGpAdjust,           GradTarget::kScRefine};
}

GradCheckReport check_gradients(GradTarget target, std::uint64_t seed,
                                bool corrupt) {
  Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(target));
  Problem p = make_problem(target, rng);
  for (int attempt = 0; !resolvable(p); ++attempt) {
    if (attempt > kMaxResample) {
      throw NumericError("gradient check: no well-conditioned case");
    }
    p = make_problem(target, rng);
  }
  GradientFn grad = p.grad;
  if (corrupt) {
    grad = [inner = p.grad](std::span<const double> v) {
      std::vector<double> g = inner(v);
      for (double& x : g) x *= 1.1;
      return g;
    };
  }
  return finite_diff_grad_check(p.f, grad, p.x, kGradEps, kGradTol);
}

}  // namespace dmd::verify
