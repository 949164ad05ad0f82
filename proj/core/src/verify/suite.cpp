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

#include "dmd/verify/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "dmd/error.hpp"
#include "dmd/imaging.hpp"
#include "dmd/loss.hpp"
#include "dmd/mecm.hpp"
#include "dmd/random.hpp"
#include "dmd/scan.hpp"
#include "dmd/ssm.hpp"
#include "dmd/verify/generators.hpp"
#include "dmd/verify/gradients.hpp"
#include "dmd/verify/oracles.hpp"

namespace dmd::verify {
namespace {

// Test sizes and tolerances for the executable properties.
constexpr std::size_t kScanMaps = 200;
constexpr std::size_t kRoundTripTensors = 100;
constexpr std::size_t kRecurrenceCases = 50;
constexpr std::size_t kGradientSeeds = 20;
constexpr std::size_t kMecmCases = 40;
constexpr double kOracleTol = 1e-6;
constexpr double kSumTol = 1e-6;
constexpr std::size_t kLongSequence = 10000;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

// max |a - b| / max(max |b|, tiny)
double normwise_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  if (scale == 0.0) return diff;
  return diff / scale;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff;
}

using Body = std::function<std::string(Rng&)>;

class Recorder {
 public:
  Recorder(std::string suite, std::uint64_t seed,
           std::vector<PropertyResult>& out)
      : suite_(std::move(suite)), seed_(seed), out_(out) {}

  // The body returns an empty string on success or a failure description.
  void check(const std::string& name, const std::string& scope,
             const Body& body) {
    Rng rng(seed_ * 0x9E3779B97F4A7C15ull + ++counter_ +
            std::hash<std::string>{}(suite_) % 4096);
    PropertyResult r{suite_, name, false, {}};
    try {
      const std::string failure = body(rng);
      r.passed = failure.empty();
      r.detail = r.passed ? scope : failure;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    out_.push_back(std::move(r));
  }

 private:
  std::string suite_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::vector<PropertyResult>& out_;
};

// ---------------------------------------------------------------- scan

scan::ProximityMap random_map(Rng& rng, std::size_t i) {
  const auto h = static_cast<std::size_t>(rng.integer(1, 32));
  const auto w = static_cast<std::size_t>(rng.integer(1, 32));
  return gen::proximity_map(rng, h, w, gen::map_kind_for(i));
}

std::string check_rscan_layout(const scan::ProximityMap& p,
                               const scan::RegionMap& regions,
                               const scan::ScanOrder& order) {
  // Expected region sequence: labels 1..R ascending (already ranked), then 0.
  std::int32_t current = -1;
  std::vector<bool> finished(regions.areas.size(), false);
  double last_value = 0.0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::uint32_t px = order.forward[t];
    const std::int32_t label = regions.labels[px];
    if (label != current) {
      if (finished[static_cast<std::size_t>(label)]) {
        return "region " + std::to_string(label) + " revisited at step " +
               std::to_string(t);
      }
      if (current > 0 && label != 0 && label < current) {
        return "region " + std::to_string(label) + " visited after region " +
               std::to_string(current);
      }
      if (current == 0) return "pixels visited after the background";
      if (current >= 0) finished[static_cast<std::size_t>(current)] = true;
      current = label;
    } else if (p.values[px] > last_value) {
      return "proximity increases inside region " + std::to_string(label) +
             " at step " + std::to_string(t);
    }
    last_value = p.values[px];
  }
  for (std::size_t l = 1; l < regions.areas.size(); ++l) {
    if (l + 1 < regions.areas.size() &&
        regions.areas[l] < regions.areas[l + 1]) {
      return "region areas are not descending";
    }
  }
  return {};
}

void scan_suite(Recorder& rec) {
  rec.check("orders_are_permutations", std::to_string(kScanMaps) + " maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kScanMaps; ++i) {
                const auto p = random_map(rng, i);
                const auto regions = scan::partition_regions(p);
                if (!scan::is_permutation(scan::da_rscan(p, regions))) {
                  return "rscan is not a permutation on map " + std::to_string(i);
                }
                if (!scan::is_permutation(scan::da_gscan(p))) {
                  return "gscan is not a permutation on map " + std::to_string(i);
                }
              }
              return {};
            });

  rec.check("gscan_non_increasing", std::to_string(kScanMaps) + " maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kScanMaps; ++i) {
                const auto p = random_map(rng, i);
                const auto v = scan::ordered_values(p, scan::da_gscan(p));
                if (!std::is_sorted(v.begin(), v.end(), std::greater<>())) {
                  return "proximity increases along gscan on map " +
                         std::to_string(i);
                }
              }
              return {};
            });

  rec.check("rscan_region_order", std::to_string(kScanMaps) + " maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kScanMaps; ++i) {
                const auto p = random_map(rng, i);
                const auto regions = scan::partition_regions(p);
                const std::string f =
                    check_rscan_layout(p, regions, scan::da_rscan(p, regions));
                if (!f.empty()) return "map " + std::to_string(i) + ": " + f;
              }
              return {};
            });

  rec.check("partition_matches_flood_fill",
            std::to_string(kScanMaps) + " maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kScanMaps; ++i) {
                const auto p = random_map(rng, i);
                const int bins = static_cast<int>(rng.integer(1, 10));
                const double frac = rng.uniform(0.0, 0.05);
                const auto regions = scan::partition_regions(p, {bins, frac});
                const auto ref = oracle::flood_fill_partition(p, bins, frac);
                if (regions.labels != ref.labels || regions.areas != ref.areas) {
                  return "labels differ from flood fill on map " +
                         std::to_string(i);
                }
              }
              return {};
            });

  rec.check("orders_match_sort_oracle", std::to_string(kScanMaps) + " maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kScanMaps; ++i) {
                const auto p = random_map(rng, i);
                const auto regions = scan::partition_regions(p);
                if (scan::da_gscan(p).forward != oracle::gscan(p)) {
                  return "gscan differs from the sort oracle on map " +
                         std::to_string(i);
                }
                if (scan::da_rscan(p, regions).forward !=
                    oracle::rscan(p, regions.labels)) {
                  return "rscan differs from the grouped-sort oracle on map " +
                         std::to_string(i);
                }
              }
              return {};
            });

  rec.check("partition_idempotent", "50 maps", [](Rng& rng) -> std::string {
    for (std::size_t i = 0; i < 50; ++i) {
      const auto p = random_map(rng, i);
      const auto a = scan::partition_regions(p);
      const auto b = scan::partition_regions(p);
      if (a.labels != b.labels || a.areas != b.areas) {
        return "relabeling differs between runs on map " + std::to_string(i);
      }
    }
    return {};
  });

  rec.check("constant_map_single_region", "20 maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto h = static_cast<std::size_t>(rng.integer(1, 16));
                const auto w = static_cast<std::size_t>(rng.integer(1, 16));
                const auto p =
                    gen::proximity_map(rng, h, w, gen::MapKind::kConstant);
                const auto regions = scan::partition_regions(p);
                if (regions.region_count() != 1) {
                  return "constant map produced " +
                         std::to_string(regions.region_count()) + " regions";
                }
                const auto id = scan::identity_order(h, w).forward;
                if (scan::da_gscan(p).forward != id ||
                    scan::da_rscan(p, regions).forward != id) {
                  return "constant map order is not row-major";
                }
              }
              return {};
            });

  rec.check("apply_restore_round_trip",
            std::to_string(kRoundTripTensors) + " tensors",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kRoundTripTensors; ++i) {
                const auto p = random_map(rng, i);
                const auto c = static_cast<std::size_t>(rng.integer(1, 4));
                const Tensor3 x = gen::tensor(rng, c, p.height, p.width);
                const auto regions = scan::partition_regions(p);
                const scan::ScanOrder base = i % 2 == 0
                                                 ? scan::da_rscan(p, regions)
                                                 : scan::da_gscan(p);
                const std::array<scan::ScanOrder, 4> orders = {
                    base, scan::reverse_order(base), scan::inverse_order(base),
                    scan::identity_order(p.height, p.width)};
                for (const auto& o : orders) {
                  const Sequence s = scan::apply_order(x, o);
                  if (s.data() != oracle::gather(x, o.forward).data()) {
                    return "apply_order differs from the gather oracle";
                  }
                  const Tensor3 back = scan::restore_order(s, o);
                  if (!bitwise_equal(back.data(), x.data())) {
                    return "restore(apply(x)) != x on tensor " +
                           std::to_string(i);
                  }
                  const Tensor3 ref =
                      oracle::scatter(s, o.forward, p.height, p.width);
                  if (!bitwise_equal(back.data(), ref.data())) {
                    return "restore_order differs from the scatter oracle";
                  }
                }
              }
              return {};
            });

  rec.check("reverse_and_inverse_involution",
            std::to_string(kRoundTripTensors) + " orders",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kRoundTripTensors; ++i) {
                const auto p = random_map(rng, i);
                const auto regions = scan::partition_regions(p);
                for (const auto& o :
                     {scan::da_rscan(p, regions), scan::da_gscan(p)}) {
                  if (scan::reverse_order(scan::reverse_order(o)).forward !=
                      o.forward) {
                    return "reverse(reverse(o)) != o on order " +
                           std::to_string(i);
                  }
                  if (scan::inverse_order(scan::inverse_order(o)).forward !=
                      o.forward) {
                    return "inverse(inverse(o)) != o on order " +
                           std::to_string(i);
                  }
                }
              }
              return {};
            });
}

// ----------------------------------------------------------------- ssm

struct RecurrenceCase {
  Sequence x, depth;
  ssm::GammaMap gamma;
  ssm::SsmParams params;
};

RecurrenceCase random_recurrence(Rng& rng, std::size_t max_n,
                                 std::size_t max_len) {
  const auto n = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_n)));
  const auto len = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_len)));
  const auto d = static_cast<std::size_t>(rng.integer(1, 6));
  const auto z = static_cast<std::size_t>(rng.integer(1, 3));
  RecurrenceCase c{gen::sequence(rng, len, d), gen::sequence(rng, len, z, 0, 1),
                   {std::vector<double>(len)}, gen::ssm_params(rng, n, d, z)};
  for (double& g : c.gamma.values) {
    const double u = rng.uniform();
    g = u < 0.1 ? 0.0 : (u < 0.2 ? 1.0 : rng.uniform());
  }
  return c;
}

std::string gradient_property(GradTarget target, const SuiteOptions& options) {
  for (std::size_t s = 0; s < kGradientSeeds; ++s) {
    const GradCheckReport r = check_gradients(
        target, options.seed * 100 + s, options.corrupt_gradients);
    if (!r.passed) {
      return std::string(to_string(target)) + " seed " + std::to_string(s) +
             ": max rel error " + num(r.max_rel_error) + " at coordinate " +
             std::to_string(r.worst_index);
    }
  }
  return {};
}

void gradient_checks(Recorder& rec, const SuiteOptions& options,
                     std::initializer_list<GradTarget> targets) {
  for (GradTarget t : targets) {
    rec.check(std::string("gradient_") + to_string(t),
              std::to_string(kGradientSeeds) + " seeds, tol " + num(kGradTol),
              [t, options](Rng&) { return gradient_property(t, options); });
  }
}

void negative_control(Recorder& rec, GradTarget target) {
  rec.check("gradient_negative_control",
            std::string(to_string(target)) + " with a 1.1x gradient is rejected",
            [target](Rng&) -> std::string {
              const GradCheckReport r = check_gradients(target, 1, true);
              if (r.passed) return "corrupted gradient passed the check";
              return {};
            });
}

// Elementwise bound on |y| implied by |h| <= max|B x| / (1 - |a|).
std::string check_bounded(const Sequence& x, const Sequence& depth,
                          const ssm::GammaMap& gamma,
                          const ssm::SsmParams& p, const Sequence& y) {
  const std::size_t n = p.state_size, d = p.d_inner;
  auto project = [](const Matrix& w, const std::vector<double>& b,
                    std::span<const double> v) {
    std::vector<double> out(b);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t k = 0; k < v.size(); ++k) out[i] += w(i, k) * v[k];
    }
    return out;
  };
  std::vector<double> b_max(n * d, 0.0);
  std::vector<std::vector<double>> cs;
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto [b, c] = ssm::blend_matrices(
        project(p.w_b, p.b_b, x.row(t)), project(p.w_bdepth, p.b_bdepth, depth.row(t)),
        project(p.w_c, p.b_c, x.row(t)), project(p.w_cdepth, p.b_cdepth, depth.row(t)),
        gamma.values[t]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < d; ++ch) {
        b_max[i * d + ch] = std::max(b_max[i * d + ch], std::abs(b[i] * x(t, ch)));
      }
    }
    cs.push_back(c);
  }
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t ch = 0; ch < d; ++ch) {
      if (!std::isfinite(y(t, ch))) return "non-finite output at step " + std::to_string(t);
      double bound = std::abs(p.skip[ch] * x(t, ch));
      for (std::size_t i = 0; i < n; ++i) {
        bound += std::abs(cs[t][i]) * b_max[i * d + ch] / (1.0 - std::abs(p.a[i]));
      }
      if (std::abs(y(t, ch)) > bound * (1.0 + 1e-9) + 1e-12) {
        return "output exceeds the stability bound at step " + std::to_string(t);
      }
    }
  }
  return {};
}

void ssm_suite(Recorder& rec, const SuiteOptions& options) {
  rec.check("gamma_zero_equals_vanilla_bitwise",
            std::to_string(kRecurrenceCases) + " cases",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kRecurrenceCases; ++i) {
                RecurrenceCase c = random_recurrence(rng, 8, 64);
                std::fill(c.gamma.values.begin(), c.gamma.values.end(), 0.0);
                const Sequence ds = ssm::ds_scan(c.x, c.depth, c.gamma, c.params);
                const Sequence va = ssm::vanilla_scan(c.x, c.params);
                if (!bitwise_equal(ds.data(), va.data())) {
                  return "case " + std::to_string(i) + " differs bitwise";
                }
              }
              return {};
            });

  rec.check("zero_input_zero_output", "50 cases", [](Rng& rng) -> std::string {
    for (std::size_t i = 0; i < 50; ++i) {
      RecurrenceCase c = random_recurrence(rng, 8, 64);
      std::fill(c.x.data().begin(), c.x.data().end(), 0.0);
      const Sequence y = ssm::ds_scan(c.x, c.depth, c.gamma, c.params);
      for (double v : y.data()) {
        if (v != 0.0) return "non-zero output on case " + std::to_string(i);
      }
    }
    return {};
  });

  rec.check("bounded_long_sequence",
            std::to_string(kLongSequence) + " steps, 3 sequences",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 3; ++i) {
                const std::size_t n = 4, d = 4, z = 2;
                ssm::SsmParams p = gen::ssm_params(rng, n, d, z);
                for (double& a : p.a) a = rng.uniform(-0.99, 0.99);
                const Sequence x = gen::sequence(rng, kLongSequence, d);
                const Sequence depth = gen::sequence(rng, kLongSequence, z, 0, 1);
                ssm::GammaMap g{std::vector<double>(kLongSequence)};
                for (double& v : g.values) v = rng.uniform();
                const Sequence y = ssm::ds_scan(x, depth, g, p);
                const std::string f = check_bounded(x, depth, g, p, y);
                if (!f.empty()) return f;
              }
              return {};
            });

  rec.check("ds_scan_matches_unrolled_oracle",
            std::to_string(kRecurrenceCases) + " cases, N<=8, L<=64, rel " +
                num(kOracleTol),
            [](Rng& rng) -> std::string {
              double worst = 0.0;
              for (std::size_t i = 0; i < kRecurrenceCases; ++i) {
                const RecurrenceCase c = random_recurrence(rng, 8, 64);
                const Sequence got = ssm::ds_scan(c.x, c.depth, c.gamma, c.params);
                const Sequence want = oracle::unrolled_ds_scan(
                    c.x, c.depth, c.gamma.values, c.params);
                worst = std::max(worst, normwise_rel(got.data(), want.data()));
                const Sequence va = ssm::vanilla_scan(c.x, c.params);
                const Sequence va_ref = oracle::unrolled_vanilla_scan(c.x, c.params);
                worst = std::max(worst, normwise_rel(va.data(), va_ref.data()));
              }
              if (worst > kOracleTol) return "relative error " + num(worst);
              return {};
            });

  rec.check("gamma_clamped_and_counted", "out-of-range gamma",
            [](Rng& rng) -> std::string {
              RecurrenceCase c = random_recurrence(rng, 4, 16);
              ssm::GammaMap wild = c.gamma;
              ssm::GammaMap clamped = c.gamma;
              std::size_t expected = 0;
              for (std::size_t t = 0; t < wild.values.size(); t += 2) {
                wild.values[t] = t % 4 == 0 ? -0.5 : 1.7;
                clamped.values[t] = t % 4 == 0 ? 0.0 : 1.0;
                ++expected;
              }
              ssm::ScanDiagnostics diag;
              const Sequence a = ssm::ds_scan(c.x, c.depth, wild, c.params, &diag);
              const Sequence b = ssm::ds_scan(c.x, c.depth, clamped, c.params);
              if (diag.gamma_clamped != expected) {
                return "clamp count " + std::to_string(diag.gamma_clamped) +
                       ", expected " + std::to_string(expected);
              }
              if (!bitwise_equal(a.data(), b.data())) {
                return "clamped gamma does not act as its clamped value";
              }
              return {};
            });

  rec.check("gamma_from_proximity_in_unit_range", "50 maps",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 50; ++i) {
                const auto p = random_map(rng, i);
                const auto g = ssm::gamma_from_proximity(p, scan::da_gscan(p));
                for (double v : g.values) {
                  if (!(v >= 0.0 && v <= 1.0)) return "gamma " + num(v);
                }
              }
              return {};
            });

  gradient_checks(rec, options, {GradTarget::kVanillaScan, GradTarget::kDsScan});
  negative_control(rec, GradTarget::kDsScan);

  rec.check("positional_encoding", "range, pair norm and entrywise oracle",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto h = static_cast<std::size_t>(rng.integer(1, 12));
                const auto w = static_cast<std::size_t>(rng.integer(1, 12));
                const std::size_t d = 4 * static_cast<std::size_t>(rng.integer(1, 8));
                const double base = i % 2 == 0 ? 10000.0 : rng.uniform(2.0, 1e5);
                const auto pe = ssm::spatial_positional_encoding(h, w, d, base);
                for (std::size_t px = 0; px < h * w; ++px) {
                  const auto row = pe.table.row(px);
                  for (std::size_t ch = 0; ch < d; ++ch) {
                    if (row[ch] < -1.0 || row[ch] > 1.0) return "entry outside [-1,1]";
                    const double want =
                        oracle::pe_entry(h, w, d, base, px / w, px % w, ch);
                    if (std::abs(row[ch] - want) > 1e-12) {
                      return "entry differs from oracle by " +
                             num(std::abs(row[ch] - want));
                    }
                  }
                  for (std::size_t ch = 0; ch < d; ch += 2) {
                    const double norm = row[ch] * row[ch] + row[ch + 1] * row[ch + 1];
                    if (std::abs(norm - 1.0) > 1e-6) return "pair norm " + num(norm);
                  }
                }
              }
              return {};
            });

  rec.check("four_branch_sum", "ds_mamba_forward vs per-branch oracles",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 10; ++i) {
                const auto h = static_cast<std::size_t>(rng.integer(2, 8));
                const auto w = static_cast<std::size_t>(rng.integer(2, 8));
                const std::size_t d = 4;
                const auto p = gen::proximity_map(rng, h, w, gen::map_kind_for(i));
                const auto regions = scan::partition_regions(p);
                const Tensor3 x = gen::tensor(rng, d, h, w);
                ssm::DsMambaParams params;
                for (auto& b : params.branches) b = gen::ssm_params(rng, 3, d, 2);
                const auto pe = ssm::spatial_positional_encoding(h, w, d);
                const Tensor3 got = ssm::ds_mamba_forward(x, p, regions, params, &pe);

                std::vector<std::uint32_t> rs = oracle::rscan(p, regions.labels);
                std::vector<std::uint32_t> gs = oracle::gscan(p);
                std::vector<std::uint32_t> rs_rev(rs.rbegin(), rs.rend());
                std::vector<std::uint32_t> gs_rev(gs.rbegin(), gs.rend());
                const std::array<std::vector<std::uint32_t>, 4> orders = {rs, rs_rev, gs, gs_rev};
                std::vector<double> want(x.size(), 0.0);
                for (std::size_t b = 0; b < 4; ++b) {
                  Sequence seq = oracle::gather(x, orders[b]);
                  Sequence depth(orders[b].size(), 2);
                  std::vector<double> gamma(orders[b].size());
                  for (std::size_t t = 0; t < orders[b].size(); ++t) {
                    const std::uint32_t px = orders[b][t];
                    for (std::size_t ch = 0; ch < d; ++ch) {
                      seq(t, ch) += oracle::pe_entry(h, w, d, 10000.0, px / w, px % w, ch);
                    }
                    depth(t, 0) = p.values[px];
                    depth(t, 1) = 1.0;
                    gamma[t] = p.values[px];
                  }
                  const Sequence y =
                      oracle::unrolled_ds_scan(seq, depth, gamma, params.branches[b]);
                  const Tensor3 back = oracle::scatter(y, orders[b], h, w);
                  for (std::size_t k = 0; k < want.size(); ++k) want[k] += back.data()[k];
                }
                const double rel = normwise_rel(got.data(), want);
                if (rel > kOracleTol) return "relative error " + num(rel);
              }
              return {};
            });
}

// ---------------------------------------------------------------- mecm

mecm::LinearMap random_linear(Rng& rng, std::size_t out, std::size_t in) {
  mecm::LinearMap m{Matrix(out, in), std::vector<double>(out)};
  for (double& v : m.weights.data()) v = rng.normal(0.0, 0.7);
  for (double& v : m.bias) v = rng.normal(0.0, 0.3);
  return m;
}

void mecm_suite(Recorder& rec, const SuiteOptions& options) {
  rec.check("match_distributions", std::to_string(kMecmCases) + " batches",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 6));
                const auto m = static_cast<std::size_t>(rng.integer(1, 8));
                const auto b = static_cast<std::size_t>(rng.integer(1, 4));
                std::vector<Tensor3> batch;
                for (std::size_t k = 0; k < b; ++k) {
                  batch.push_back(gen::tensor(rng, c, 3, 4));
                }
                const auto bank = gen::bank(rng, m, c);
                const auto gp = mecm::gp_adjust(batch, bank, random_linear(rng, c, 2 * c));
                for (std::size_t r = 0; r < b; ++r) {
                  double s = 0.0;
                  for (double v : gp.match_image.row(r)) {
                    if (v < 0.0) return "negative S_I entry";
                    s += v;
                  }
                  if (std::abs(s - 1.0) > kSumTol) return "S_I row sums to " + num(s);
                }
                for (std::size_t j = 0; j < m; ++j) {
                  double s = 0.0;
                  for (std::size_t r = 0; r < b; ++r) {
                    if (gp.match_memory(r, j) < 0.0) return "negative S_M entry";
                    s += gp.match_memory(r, j);
                  }
                  if (std::abs(s - 1.0) > kSumTol) return "S_M column sums to " + num(s);
                }
              }
              return {};
            });

  rec.check("gp_adjust_matches_oracle", std::to_string(kMecmCases) + " images",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 6));
                const auto m = static_cast<std::size_t>(rng.integer(1, 8));
                const Tensor3 img = gen::tensor(rng, c, static_cast<std::size_t>(rng.integer(1, 8)),
                                                static_cast<std::size_t>(rng.integer(1, 8)));
                const auto bank = gen::bank(rng, m, c);
                const auto proj = random_linear(rng, c, 2 * c);
                const std::vector<Tensor3> batch{img};
                const auto gp = mecm::gp_adjust(batch, bank, proj);
                const auto ref = oracle::gp_adjust(img, bank.items, proj);
                const double rel = normwise_rel(gp.outputs[0].data(), ref.output.data());
                if (rel > kOracleTol) return "relative error " + num(rel);
              }
              return {};
            });

  rec.check("route_is_top_k", std::to_string(kMecmCases) + " routes",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 6));
                const auto e = static_cast<std::size_t>(rng.integer(1, 8));
                const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(e)));
                const auto gate = mecm::GateParams::random(e, c, rng.next());
                const auto route = mecm::gate_route(gen::tensor(rng, c, 3, 3), gate, e, k);
                if (route.selected != oracle::top_k(route.logits, k)) {
                  return "selected experts are not the top-K logits";
                }
                std::vector<double> sel;
                for (std::size_t s : route.selected) sel.push_back(route.logits[s]);
                if (max_abs_diff(route.weights, oracle::softmax(sel)) > 1e-12) {
                  return "route weights are not the softmax of selected logits";
                }
                const double s1 = std::accumulate(route.weights.begin(), route.weights.end(), 0.0);
                const double s2 = std::accumulate(route.full_weights.begin(),
                                                  route.full_weights.end(), 0.0);
                if (std::abs(s1 - 1.0) > kSumTol || std::abs(s2 - 1.0) > kSumTol) {
                  return "route weights do not sum to 1";
                }
              }
              return {};
            });

  rec.check("route_permutation_invariance", std::to_string(kMecmCases) + " relabelings",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const std::size_t c = 3, e = 4, k = 2;
                const auto gate = mecm::GateParams::random(e, c, rng.next());
                const Tensor3 x = gen::tensor(rng, c, 3, 3);
                std::vector<std::size_t> perm(e);
                std::iota(perm.begin(), perm.end(), 0);
                std::shuffle(perm.begin(), perm.end(), rng.engine());
                // Permuted gate: new expert p holds old expert perm[p].
                mecm::GateParams permuted = gate;
                for (std::size_t p = 0; p < e; ++p) {
                  std::copy_n(gate.weights.row(perm[p]).begin(), c,
                              permuted.weights.row(p).begin());
                  permuted.bias[p] = gate.bias[perm[p]];
                }
                const auto a = mecm::gate_route(x, gate, e, k);
                const auto b = mecm::gate_route(x, permuted, e, k);
                std::vector<double> la = a.logits, lb;
                std::sort(la.begin(), la.end());
                // Ties would make the mapping ambiguous; skip them.
                if (std::adjacent_find(la.begin(), la.end()) != la.end()) continue;
                for (std::size_t s = 0; s < k; ++s) {
                  if (perm[b.selected[s]] != a.selected[s]) {
                    return "route does not follow the expert relabeling";
                  }
                  if (std::abs(a.weights[s] - b.weights[s]) > 1e-12) {
                    return "route weights change under relabeling";
                  }
                }
              }
              return {};
            });

  rec.check("memory_increment_matches_oracle", std::to_string(kMecmCases) + " batches, exact",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 6));
                const auto m = static_cast<std::size_t>(rng.integer(1, 8));
                const auto b = static_cast<std::size_t>(rng.integer(1, 5));
                std::vector<Tensor3> batch;
                for (std::size_t k = 0; k < b; ++k) batch.push_back(gen::tensor(rng, c, 2, 3));
                const auto bank = gen::bank(rng, m, c);
                const auto gp = mecm::gp_adjust(batch, bank, random_linear(rng, c, 2 * c));
                const auto inc = mecm::memory_increment(bank, gp.pooled, gp.match_image,
                                                        gp.match_memory);
                const Matrix want = oracle::memory_increment(gp.pooled, gp.match_image,
                                                             gp.match_memory, m);
                if (!bitwise_equal(inc.delta.data(), want.data())) {
                  return "increment differs from the accumulation oracle";
                }
                const auto evolved = mecm::memory_evolve(bank, gp.pooled, gp.match_image,
                                                         gp.match_memory);
                std::vector<bool> touched(m, false);
                for (std::size_t j : inc.best_item) touched[j] = true;
                for (std::size_t r = 0; r < m; ++r) {
                  std::vector<double> row(bank.items.row(r).begin(), bank.items.row(r).end());
                  for (std::size_t ch = 0; ch < c; ++ch) {
                    row[ch] += bank.update_rate * want(r, ch);
                  }
                  double norm = 0.0;
                  for (double v : row) norm += v * v;
                  norm = std::sqrt(norm);
                  for (double& v : row) v /= norm;
                  const std::vector<double> got(evolved.items.row(r).begin(),
                                                evolved.items.row(r).end());
                  if (max_abs_diff(got, row) > 1e-12) {
                    return "evolved row " + std::to_string(r) + " differs from oracle";
                  }
                  if (!touched[r]) {
                    const std::vector<double> orig(bank.items.row(r).begin(),
                                                   bank.items.row(r).end());
                    if (max_abs_diff(got, orig) > 1e-12) {
                      return "untouched row " + std::to_string(r) + " changed";
                    }
                  }
                }
              }
              return {};
            });

  rec.check("sc_refine_matches_oracle",
            std::to_string(kMecmCases) + " cases, M<=8, images<=8x8",
            [](Rng& rng) -> std::string {
              double worst = 0.0;
              for (std::size_t i = 0; i < kMecmCases; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 6));
                const auto m = static_cast<std::size_t>(rng.integer(1, 8));
                const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(m)));
                const Tensor3 img = gen::tensor(rng, c, static_cast<std::size_t>(rng.integer(1, 8)),
                                                static_cast<std::size_t>(rng.integer(1, 8)));
                const auto bank = gen::bank(rng, m, c);
                const auto got = mecm::sc_refine(img, bank, k);
                const auto want = oracle::sc_refine(img, bank.items, k);
                worst = std::max(worst, normwise_rel(got.output.data(), want.data()));
              }
              if (worst > kOracleTol) return "relative error " + num(worst);
              return {};
            });

  rec.check("expert_forward_matches_oracle", "20 experts",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto c = static_cast<std::size_t>(rng.integer(1, 4));
                const auto expert = mecm::ExpertParams::random(c, 6, 3, rng.next());
                const Tensor3 img = gen::tensor(rng, c, 5, 4);
                const auto got = mecm::expert_forward(img, expert, false);
                const auto gp = oracle::gp_adjust(img, expert.memory.items, expert.mask_proj);
                const auto sc = oracle::sc_refine(img, expert.memory.items, expert.topk);
                Tensor3 joint(2 * c, 5, 4);
                for (std::size_t ch = 0; ch < c; ++ch) {
                  for (std::size_t p = 0; p < img.pixels(); ++p) {
                    joint.at(ch, p) = gp.output.at(ch, p);
                    joint.at(c + ch, p) = sc.at(ch, p);
                  }
                }
                const Tensor3 want = oracle::conv3x3(joint, expert.fusion);
                const double rel = normwise_rel(got.output.data(), want.data());
                if (rel > kOracleTol) return "relative error " + num(rel);
              }
              return {};
            });

  rec.check("pure_without_evolve", "10 forwards twice",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 10; ++i) {
                const std::size_t c = 3, e = 4;
                std::vector<mecm::ExpertParams> experts;
                for (std::size_t k = 0; k < e; ++k) {
                  experts.push_back(mecm::ExpertParams::random(c, 8, 4, rng.next()));
                }
                const auto before = experts;
                const auto gate = mecm::GateParams::random(e, c, rng.next());
                const Tensor3 x = gen::tensor(rng, c, 4, 4);
                const auto a = mecm::mecm_forward(x, experts, gate, 2, false);
                const auto b = mecm::mecm_forward(x, experts, gate, 2, false);
                if (!bitwise_equal(a.output.data(), b.output.data())) {
                  return "repeated forward differs";
                }
                if (!a.experts.empty() || experts != before) {
                  return "forward without evolve produced parameter changes";
                }
              }
              return {};
            });

  rec.check("only_selected_experts_evolve", "10 forwards",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 10; ++i) {
                const std::size_t c = 3, e = 4;
                std::vector<mecm::ExpertParams> experts;
                for (std::size_t k = 0; k < e; ++k) {
                  experts.push_back(mecm::ExpertParams::random(c, 8, 4, rng.next()));
                }
                const auto gate = mecm::GateParams::random(e, c, rng.next());
                const auto r = mecm::mecm_forward(gen::tensor(rng, c, 4, 4), experts, gate, 2, true);
                for (std::size_t k = 0; k < e; ++k) {
                  const bool selected = std::find(r.route.selected.begin(),
                                                  r.route.selected.end(),
                                                  k) != r.route.selected.end();
                  if (!selected && !(r.experts[k] == experts[k])) {
                    return "unselected expert " + std::to_string(k) + " evolved";
                  }
                }
              }
              return {};
            });

  rec.check("mixture_one_homogeneous", "20 scalings",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const std::vector<Tensor3> outs{gen::tensor(rng, 3, 4, 4),
                                                gen::tensor(rng, 3, 4, 4)};
                const std::vector<double> w{rng.uniform(), rng.uniform()};
                const double c = rng.uniform(0.1, 10.0);
                const std::vector<double> cw{c * w[0], c * w[1]};
                const Tensor3 base = mecm::mix_experts(outs, w);
                Tensor3 scaled = mecm::mix_experts(outs, cw);
                for (double& v : scaled.data()) v /= c;
                if (normwise_rel(scaled.data(), base.data()) > 1e-12) {
                  return "mixture is not 1-homogeneous in the route weights";
                }
              }
              return {};
            });

  rec.check("conv3x3_matches_oracle", "20 convolutions",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto in = static_cast<std::size_t>(rng.integer(1, 4));
                const auto out = static_cast<std::size_t>(rng.integer(1, 4));
                mecm::Conv3x3 conv{out, in, std::vector<double>(out * in * 9), std::vector<double>(out)};
                for (double& v : conv.weights) v = rng.normal(0.0, 0.5);
                for (double& v : conv.bias) v = rng.normal(0.0, 0.5);
                const Tensor3 x = gen::tensor(rng, in, static_cast<std::size_t>(rng.integer(1, 7)),
                                              static_cast<std::size_t>(rng.integer(1, 7)));
                const double rel = normwise_rel(mecm::conv3x3(x, conv).data(),
                                                oracle::conv3x3(x, conv).data());
                if (rel > 1e-12) return "relative error " + num(rel);
              }
              return {};
            });

  gradient_checks(rec, options, {GradTarget::kGpAdjust, GradTarget::kScRefine});
  negative_control(rec, GradTarget::kScRefine);
}

// ---------------------------------------------------------------- loss

void loss_suite(Recorder& rec, const SuiteOptions& options) {
  const loss::LossWeights weights;

  rec.check("losses_non_negative", "100 random inputs",
            [weights](Rng& rng) -> std::string {
              const loss::IdentityExtractor id;
              for (std::size_t i = 0; i < 100; ++i) {
                Matrix gt(3, 4), gr(2, 4);
                for (double& v : gt.data()) v = rng.uniform();
                for (double& v : gr.data()) v = rng.uniform();
                const double l = loss::load_loss(gt, gr, weights);
                const auto bank = gen::bank(rng, static_cast<std::size_t>(rng.integer(1, 6)), 3);
                std::vector<double> q(3);
                for (double& v : q) v = rng.uniform(-1, 1);
                const double m = memory_matching_loss(q, bank, loss::Layer::kReflection, weights);
                const Tensor3 a = gen::tensor(rng, 3, 4, 4, 0, 1);
                const Tensor3 b = gen::tensor(rng, 3, 4, 4, 0, 1);
                const double app = loss::appearance_loss(a, b, b, a, &id, weights);
                for (double v : {l, m, app}) {
                  if (!(v >= 0.0) || !std::isfinite(v)) return "loss value " + num(v);
                }
              }
              return {};
            });

  rec.check("losses_zero_at_optimum", "uniform gates, perfect match, exact reconstruction",
            [weights](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto e = static_cast<std::size_t>(rng.integer(1, 8));
                Matrix uniform(3, e);
                const double v0 = rng.uniform(0.01, 1.0);
                for (double& v : uniform.data()) v = v0;
                const double l = loss::load_loss(uniform, uniform, weights);
                if (l > 1e-12) return "uniform load loss " + num(l);

                const auto bank = gen::bank(rng, static_cast<std::size_t>(rng.integer(1, 6)), 4);
                const auto first = loss::memory_matching_terms(bank.items.row(0), bank);
                const std::vector<double> q(bank.items.row(first.positive).begin(),
                                            bank.items.row(first.positive).end());
                const auto t = loss::memory_matching_terms(q, bank);
                if (t.d_neg >= t.d_pos) {
                  const double m = loss::memory_matching_loss(q, bank, loss::Layer::kTransmission, weights);
                  if (m != 0.0) return "matching loss at its optimum " + num(m);
                }
                const loss::IdentityExtractor id;
                const Tensor3 a = gen::tensor(rng, 3, 4, 4, 0, 1);
                const Tensor3 b = gen::tensor(rng, 3, 4, 4, 0, 1);
                const double app = loss::appearance_loss(a, a, b, b, &id, weights);
                if (app != 0.0) return "appearance loss on exact reconstruction " + num(app);
              }
              return {};
            });

  rec.check("load_loss_scale_invariant", "50 rescalings, rel 1e-6",
            [weights](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 50; ++i) {
                Matrix g(3, 4);
                for (double& v : g.data()) v = rng.uniform(0.05, 1.0);
                const double base = loss::load_loss(g, Matrix(0, 4), weights);
                Matrix scaled = g;
                const auto row = static_cast<std::size_t>(rng.integer(0, 2));
                const double c = rng.uniform(0.2, 5.0);
                for (double& v : scaled.row(row)) v *= c;
                const double got = loss::load_loss(scaled, Matrix(0, 4), weights);
                if (std::abs(got - base) > 1e-6 * base) {
                  return "load loss changes under row rescaling: " + num(base) + " vs " + num(got);
                }
              }
              return {};
            });

  rec.check("documented_values", "one-hot 0.024, hand-evaluated matching, offset 0.102",
            [weights](Rng&) -> std::string {
              Matrix one_hot(1, 4);
              one_hot(0, 0) = 1.0;
              const double l = loss::load_loss(one_hot, Matrix(0, 4), weights, 0.0);
              if (std::abs(l - 0.024) > 1e-9) return "one-hot load loss " + num(l);

              mecm::MemoryBank bank{Matrix(2, 2), 0.5};
              bank.items(0, 0) = bank.items(0, 1) = 1.0 / std::sqrt(2.0);
              bank.items(1, 1) = 1.0;
              const std::vector<double> q{1.0, 0.0};
              const double m = loss::memory_matching_loss(q, bank, loss::Layer::kTransmission, weights);
              const double want = (2.0 - std::sqrt(2.0)) * weights.align_t;
              if (std::abs(m - want) > 1e-12) return "matching loss " + num(m);

              const loss::IdentityExtractor id;
              Tensor3 t(3, 4, 4), r(3, 4, 4);
              for (double& v : t.data()) v = 0.3;
              for (double& v : r.data()) v = 0.6;
              Tensor3 t_hat = t;
              for (double& v : t_hat.data()) v += 0.1;
              const double app = loss::appearance_loss(t_hat, t, r, r, &id, weights);
              if (std::abs(app - 0.102) > 1e-9) return "appearance loss " + num(app);

              const double total = loss::total_loss({0.024, 0.05, 0.102});
              if (std::abs(total - 0.176) > 1e-12) return "total loss " + num(total);
              return {};
            });

  gradient_checks(rec, options,
                  {GradTarget::kLoadLoss, GradTarget::kMemoryMatchingLoss,
                   GradTarget::kAppearanceLoss, GradTarget::kTotalLoss});
  negative_control(rec, GradTarget::kTotalLoss);
}

// ------------------------------------------------------------- imaging

Tensor3 constant(std::size_t c, std::size_t h, std::size_t w, double v) {
  Tensor3 t(c, h, w);
  std::fill(t.data().begin(), t.data().end(), v);
  return t;
}

void imaging_suite(Recorder& rec) {
  rec.check("blend_monotone", "100 pairs inside the configured ranges",
            [](Rng& rng) -> std::string {
              const imaging::BlendRanges ranges;
              for (std::size_t i = 0; i < 100; ++i) {
                const auto [alpha, beta] = imaging::sample_coefficients(rng, ranges);
                // dI/dT = alpha - R >= 0 needs R <= alpha; dI/dR = beta - T
                // >= 0 needs T <= beta.
                Tensor3 t = gen::tensor(rng, 3, 4, 4, 0.0, beta);
                Tensor3 r = gen::tensor(rng, 3, 4, 4, 0.0, alpha);
                const Tensor3 base = imaging::blend(t, r, alpha, beta).image;
                Tensor3 t_up = t, r_up = r;
                for (double& v : t_up.data()) v = std::min(beta, v + rng.uniform(0.0, 0.2));
                for (double& v : r_up.data()) v = std::min(alpha, v + rng.uniform(0.0, 0.2));
                const Tensor3 a = imaging::blend(t_up, r, alpha, beta).image;
                const Tensor3 b = imaging::blend(t, r_up, alpha, beta).image;
                for (std::size_t k = 0; k < base.size(); ++k) {
                  if (a.data()[k] < base.data()[k] - 1e-15) return "blend decreased when T grew";
                  if (b.data()[k] < base.data()[k] - 1e-15) return "blend decreased when R grew";
                }
              }
              return {};
            });

  rec.check("blend_in_unit_range", "100 pairs", [](Rng& rng) -> std::string {
    for (std::size_t i = 0; i < 100; ++i) {
      const auto [alpha, beta] = imaging::sample_coefficients(rng);
      const auto out = imaging::blend(gen::tensor(rng, 3, 5, 5, 0, 1),
                                      gen::tensor(rng, 3, 5, 5, 0, 1), alpha, beta);
      for (double v : out.image.data()) {
        if (v < 0.0 || v > 1.0) return "blend produced " + num(v);
      }
    }
    return {};
  });

  rec.check("psnr_noise_ladder", "10 ladders of 8 amplitudes",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 10; ++i) {
                const Tensor3 clean = gen::tensor(rng, 3, 16, 16, 0.25, 0.75);
                const Tensor3 noise = gen::tensor(rng, 3, 16, 16, -1.0, 1.0);
                double previous = imaging::kPsnrCapDb + 1.0;
                for (int step = 1; step <= 8; ++step) {
                  const double amp = 0.03 * step;
                  Tensor3 noisy = clean;
                  for (std::size_t k = 0; k < noisy.size(); ++k) {
                    noisy.data()[k] += amp * noise.data()[k];
                  }
                  const double p = imaging::psnr(clean, noisy);
                  if (!(p < previous)) return "psnr did not decrease at amplitude " + num(amp);
                  previous = p;
                }
              }
              return {};
            });

  rec.check("ssim_identity_and_symmetry", "20 images, 1e-9",
            [](Rng& rng) -> std::string {
              for (std::size_t i = 0; i < 20; ++i) {
                const auto c = i % 2 == 0 ? std::size_t{1} : std::size_t{3};
                const Tensor3 a = gen::tensor(rng, c, static_cast<std::size_t>(rng.integer(11, 24)),
                                              static_cast<std::size_t>(rng.integer(11, 24)), 0, 1);
                Tensor3 b = a;
                for (double& v : b.data()) v = std::clamp(v + rng.uniform(-0.2, 0.2), 0.0, 1.0);
                const double self = imaging::ssim(a, a);
                if (std::abs(self - 1.0) > 1e-9) return "ssim(a,a) = " + num(self);
                const double ab = imaging::ssim(a, b), ba = imaging::ssim(b, a);
                if (std::abs(ab - ba) > 1e-9) return "ssim is not symmetric";
                if (std::abs(imaging::psnr(a, b) - imaging::psnr(b, a)) > 1e-12) {
                  return "psnr is not symmetric";
                }
              }
              return {};
            });

  rec.check("closed_forms", "blend 0.75, psnr 6.0206 dB, ssim 9.999e-5",
            [](Rng&) -> std::string {
              const auto half = constant(3, 12, 12, 0.5);
              const auto b = imaging::blend(half, half, 1.0, 1.0).image;
              for (double v : b.data()) {
                if (std::abs(v - 0.75) > 1e-12) return "blend gave " + num(v);
              }
              const double p = imaging::psnr(constant(3, 12, 12, 0.0), half);
              if (std::abs(p - 6.0206) > 1e-3) return "psnr gave " + num(p);
              if (imaging::psnr(half, half) != imaging::kPsnrCapDb) return "psnr cap";
              const double s = imaging::ssim(constant(1, 12, 12, 0.0), constant(1, 12, 12, 1.0));
              if (std::abs(s - 9.999e-5) > 1e-7) return "ssim gave " + num(s);
              return {};
            });
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"scan", "ssm", "mecm", "loss", "imaging"};
}

bool is_suite(std::string_view name) {
  if (name == "all") return true;
  const auto names = suite_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<PropertyResult> run_suite(std::string_view name,
                                      const SuiteOptions& options) {
  if (!is_suite(name)) {
    throw ValidationError("unknown suite '" + std::string(name) + "'");
  }
  std::vector<PropertyResult> out;
  const bool all = name == "all";
  if (all || name == "scan") {
    Recorder rec("scan", options.seed, out);
    scan_suite(rec);
  }
  if (all || name == "ssm") {
    Recorder rec("ssm", options.seed, out);
    ssm_suite(rec, options);
  }
  if (all || name == "mecm") {
    Recorder rec("mecm", options.seed, out);
    mecm_suite(rec, options);
  }
  if (all || name == "loss") {
    Recorder rec("loss", options.seed, out);
    loss_suite(rec, options);
  }
  if (all || name == "imaging") {
    Recorder rec("imaging", options.seed, out);
    imaging_suite(rec);
  }
  return out;
}

}  // namespace dmd::verify
