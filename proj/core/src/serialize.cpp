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

#include "dmd/serialize.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include "dmd/error.hpp"
#include "dmd/tensor_io.hpp"

namespace dmd::io {
namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw ValidationError("json: " + what);
}

const json& object(const json& j, const char* what) {
  if (!j.is_object()) schema_error(std::string(what) + " must be an object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const char* what) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (allowed.count(item.key()) == 0) {
      schema_error(std::string("unknown key '") + item.key() + "' in " + what);
    }
  }
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) schema_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

double as_real(const json& v, const char* key) {
  if (!v.is_number()) schema_error(std::string(key) + " must be a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const char* key) {
  if (!v.is_number_unsigned()) {
    schema_error(std::string(key) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> as_reals(const json& v, const char* key) {
  if (!v.is_array()) schema_error(std::string(key) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_real(e, key));
  return out;
}

void read_real(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = as_real(j.at(key), key);
}
void read_count(const json& j, const char* key, std::size_t& out) {
  if (j.contains(key)) out = as_count(j.at(key), key);
}
void read_bool(const json& j, const char* key, bool& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean()) schema_error(std::string(key) + " must be bool");
  out = j.at(key).get<bool>();
}

std::vector<double> sized(const json& j, const char* key, std::size_t n) {
  std::vector<double> v = as_reals(require(j, key), key);
  if (v.size() != n) {
    schema_error(std::string(key) + " has " + std::to_string(v.size()) +
                 " entries, expected " + std::to_string(n));
  }
  return v;
}

json rows_to_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return out;
}

Matrix rows_from_json(const json& v, const char* key) {
  if (!v.is_array() || v.empty()) {
    schema_error(std::string(key) + " must be a non-empty array of rows");
  }
  const std::size_t cols = v.at(0).is_array() ? v.at(0).size() : 0;
  Matrix m(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    const std::vector<double> row = as_reals(v.at(r), key);
    if (row.size() != cols || cols == 0) {
      schema_error(std::string(key) + " rows must be non-empty and equal length");
    }
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

json range_to_json(double lo, double hi) { return json::array({lo, hi}); }

void read_range(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const std::vector<double> v = as_reals(j.at(key), key);
  if (v.size() != 2) schema_error(std::string(key) + " must be [min, max]");
  lo = v[0];
  hi = v[1];
}

const char* gamma_name(GammaConfig::Transform t) {
  switch (t) {
    case GammaConfig::Transform::kIdentity:
      return "identity";
    case GammaConfig::Transform::kPower:
      return "power";
    case GammaConfig::Transform::kConstant:
      return "constant";
  }
  return "identity";
}

}  // namespace

json to_json(const ssm::SsmParams& p) {
  return json{{"state_size", p.state_size},
              {"d_inner", p.d_inner},
              {"depth_dim", p.depth_dim},
              {"A", p.a},
              {"D", p.skip},
              {"W_B", p.w_b.data()},
              {"b_B", p.b_b},
              {"W_C", p.w_c.data()},
              {"b_C", p.b_c},
              {"W_Bdepth", p.w_bdepth.data()},
              {"b_Bdepth", p.b_bdepth},
              {"W_Cdepth", p.w_cdepth.data()},
              {"b_Cdepth", p.b_cdepth}};
}

ssm::SsmParams ssm_params_from_json(const json& j) {
  object(j, "ssm params");
  reject_unknown(j,
                 {"state_size", "d_inner", "depth_dim", "A", "D", "W_B", "b_B",
                  "W_C", "b_C", "W_Bdepth", "b_Bdepth", "W_Cdepth",
                  "b_Cdepth"},
                 "ssm params");
  const std::size_t n = as_count(require(j, "state_size"), "state_size");
  const std::size_t d = as_count(require(j, "d_inner"), "d_inner");
  const std::size_t z = as_count(require(j, "depth_dim"), "depth_dim");
  ssm::SsmParams p = ssm::SsmParams::zeros(n, d, z);
  p.a = sized(j, "A", n);
  p.skip = sized(j, "D", d);
  p.w_b = Matrix(n, d, sized(j, "W_B", n * d));
  p.b_b = sized(j, "b_B", n);
  p.w_c = Matrix(n, d, sized(j, "W_C", n * d));
  p.b_c = sized(j, "b_C", n);
  p.w_bdepth = Matrix(n, z, sized(j, "W_Bdepth", n * z));
  p.b_bdepth = sized(j, "b_Bdepth", n);
  p.w_cdepth = Matrix(n, z, sized(j, "W_Cdepth", n * z));
  p.b_cdepth = sized(j, "b_Cdepth", n);
  p.validate();
  return p;
}

json to_json(const loss::LossWeights& w) {
  return json{{"load_t", w.load_t},       {"load_r", w.load_r},
              {"triplet_t", w.triplet_t}, {"triplet_r", w.triplet_r},
              {"align_t", w.align_t},     {"align_r", w.align_r},
              {"l1_t", w.l1_t},           {"l1_r", w.l1_r},
              {"vgg_t", w.vgg_t}};
}

loss::LossWeights loss_weights_from_json(const json& j) {
  object(j, "loss weights");
  reject_unknown(j,
                 {"load_t", "load_r", "triplet_t", "triplet_r", "align_t",
                  "align_r", "l1_t", "l1_r", "vgg_t"},
                 "loss weights");
  loss::LossWeights w;
  read_real(j, "load_t", w.load_t);
  read_real(j, "load_r", w.load_r);
  read_real(j, "triplet_t", w.triplet_t);
  read_real(j, "triplet_r", w.triplet_r);
  read_real(j, "align_t", w.align_t);
  read_real(j, "align_r", w.align_r);
  read_real(j, "l1_t", w.l1_t);
  read_real(j, "l1_r", w.l1_r);
  read_real(j, "vgg_t", w.vgg_t);
  w.validate();
  return w;
}

json to_json(const RunConfig& c) {
  json gamma{{"transform", gamma_name(c.gamma.transform)},
             {"exponent", c.gamma.exponent},
             {"value", c.gamma.value}};
  json ssm{{"state_size", c.state_size},
           {"d_inner", c.d_inner},
           {"pe_base", c.pe_base},
           {"gamma", gamma}};
  if (!c.a_init.empty()) ssm["a_init"] = c.a_init;
  return json{
      {"seed", c.seed},
      {"scan",
       {{"bins", c.partition.bins},
        {"min_area_frac", c.partition.min_area_frac}}},
      {"ssm", ssm},
      {"mecm",
       {{"num_experts", c.num_experts},
        {"selected_experts", c.selected_experts},
        {"memory_items", c.memory_items},
        {"retrieval_topk", c.retrieval_topk},
        {"update_rate", c.update_rate},
        {"evolve", c.evolve},
        {"residual", c.mecm_residual}}},
      {"blend",
       {{"alpha", range_to_json(c.blend.alpha_min, c.blend.alpha_max)},
        {"beta", range_to_json(c.blend.beta_min, c.blend.beta_max)}}},
      {"loss", to_json(c.loss)},
      {"channels", c.channels}};
}

RunConfig run_config_from_json(const json& j) {
  object(j, "config");
  reject_unknown(j, {"seed", "scan", "ssm", "mecm", "blend", "loss", "channels"},
                 "config");
  RunConfig c;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      schema_error("seed must be a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("scan")) {
    const json& s = object(j.at("scan"), "scan");
    reject_unknown(s, {"bins", "min_area_frac"}, "scan");
    if (s.contains("bins")) {
      if (!s.at("bins").is_number_integer()) schema_error("bins must be int");
      c.partition.bins = s.at("bins").get<int>();
    }
    read_real(s, "min_area_frac", c.partition.min_area_frac);
  }
  if (j.contains("ssm")) {
    const json& s = object(j.at("ssm"), "ssm");
    reject_unknown(s, {"state_size", "d_inner", "pe_base", "a_init", "gamma"},
                   "ssm");
    read_count(s, "state_size", c.state_size);
    read_count(s, "d_inner", c.d_inner);
    read_real(s, "pe_base", c.pe_base);
    if (s.contains("a_init")) c.a_init = as_reals(s.at("a_init"), "a_init");
    if (s.contains("gamma")) {
      const json& g = object(s.at("gamma"), "gamma");
      reject_unknown(g, {"transform", "exponent", "value"}, "gamma");
      if (g.contains("transform")) {
        if (!g.at("transform").is_string()) {
          schema_error("gamma.transform must be a string");
        }
        const std::string t = g.at("transform").get<std::string>();
        if (t == "identity") {
          c.gamma.transform = GammaConfig::Transform::kIdentity;
        } else if (t == "power") {
          c.gamma.transform = GammaConfig::Transform::kPower;
        } else if (t == "constant") {
          c.gamma.transform = GammaConfig::Transform::kConstant;
        } else {
          schema_error("gamma.transform must be identity, power or constant");
        }
      }
      read_real(g, "exponent", c.gamma.exponent);
      read_real(g, "value", c.gamma.value);
    }
  }
  if (j.contains("mecm")) {
    const json& m = object(j.at("mecm"), "mecm");
    reject_unknown(m,
                   {"num_experts", "selected_experts", "memory_items",
                    "retrieval_topk", "update_rate", "evolve", "residual"},
                   "mecm");
    read_count(m, "num_experts", c.num_experts);
    read_count(m, "selected_experts", c.selected_experts);
    read_count(m, "memory_items", c.memory_items);
    read_count(m, "retrieval_topk", c.retrieval_topk);
    read_real(m, "update_rate", c.update_rate);
    read_bool(m, "evolve", c.evolve);
    read_bool(m, "residual", c.mecm_residual);
  }
  if (j.contains("blend")) {
    const json& b = object(j.at("blend"), "blend");
    reject_unknown(b, {"alpha", "beta"}, "blend");
    read_range(b, "alpha", c.blend.alpha_min, c.blend.alpha_max);
    read_range(b, "beta", c.blend.beta_min, c.blend.beta_max);
  }
  if (j.contains("loss")) c.loss = loss_weights_from_json(j.at("loss"));
  if (j.contains("channels")) {
    const json& ch = j.at("channels");
    if (!ch.is_array()) schema_error("channels must be an array");
    c.channels.clear();
    for (const auto& v : ch) c.channels.push_back(as_count(v, "channels"));
  }
  c.validate();
  return c;
}

json to_json(const GateFile& gate) {
  return json{{"weights", rows_to_json(gate.params.weights)},
              {"bias", gate.params.bias},
              {"k", gate.k}};
}

GateFile gate_from_json(const json& j) {
  object(j, "gate");
  reject_unknown(j, {"weights", "bias", "k"}, "gate");
  GateFile g;
  g.params.weights = rows_from_json(require(j, "weights"), "weights");
  g.params.bias = sized(j, "bias", g.params.weights.rows());
  read_count(j, "k", g.k);
  g.params.validate();
  if (g.k < 1 || g.k > g.params.experts()) {
    throw ValidationError("gate: k=" + std::to_string(g.k) +
                          " must be in [1, N_Exp=" +
                          std::to_string(g.params.experts()) + "]");
  }
  return g;
}

std::vector<ExpertFile> load_experts(const std::filesystem::path& json_path) {
  const json j = read_json_file(json_path);
  object(j, "experts file");
  reject_unknown(j, {"experts"}, "experts file");
  const json& list = require(j, "experts");
  if (!list.is_array() || list.empty()) {
    schema_error("experts must be a non-empty array");
  }
  const std::filesystem::path dir = json_path.parent_path();
  std::vector<ExpertFile> out;
  for (const json& e : list) {
    object(e, "expert");
    reject_unknown(e, {"memory", "update_rate", "topk", "mask_proj", "fusion"},
                   "expert");
    ExpertFile f;
    const json& mem = require(e, "memory");
    if (!mem.is_string()) schema_error("expert.memory must be a blob path");
    f.memory_blob = mem.get<std::string>();
    double rate = mecm::kDefaultUpdateRate;
    read_real(e, "update_rate", rate);
    f.params.memory = restore_bank(read_tensor_file(dir / f.memory_blob), rate);
    read_count(e, "topk", f.params.topk);

    const json& mp = object(require(e, "mask_proj"), "mask_proj");
    reject_unknown(mp, {"weights", "bias"}, "mask_proj");
    f.params.mask_proj.weights = rows_from_json(require(mp, "weights"), "weights");
    f.params.mask_proj.bias = sized(mp, "bias", f.params.mask_proj.out_dim());

    const json& fu = object(require(e, "fusion"), "fusion");
    reject_unknown(fu, {"weights", "bias"}, "fusion");
    const json& fw = require(fu, "weights");
    if (!fw.is_string()) schema_error("fusion.weights must be a blob path");
    f.fusion_blob = fw.get<std::string>();
    const TensorFile kernel = read_tensor_file(dir / f.fusion_blob);
    if (kernel.type() != ElementType::kF32 || kernel.dims.size() != 4 ||
        kernel.dims[2] != 3 || kernel.dims[3] != 3) {
      throw IoError("fusion blob must be an f32 tensor [out, in, 3, 3]");
    }
    const auto& values = std::get<std::vector<float>>(kernel.payload);
    f.params.fusion.out_channels = kernel.dims[0];
    f.params.fusion.in_channels = kernel.dims[1];
    f.params.fusion.weights.assign(values.begin(), values.end());
    f.params.fusion.bias = sized(fu, "bias", kernel.dims[0]);
    f.params.validate();
    out.push_back(std::move(f));
  }
  return out;
}

void save_expert_memories(const std::vector<ExpertFile>& experts,
                          const std::filesystem::path& json_path) {
  const std::filesystem::path dir = json_path.parent_path();
  for (const ExpertFile& f : experts) {
    write_tensor_file(dump_bank(f.params.memory), dir / f.memory_blob);
  }
}

void save_experts(const std::vector<ExpertFile>& experts,
                  const std::filesystem::path& json_path) {
  const std::filesystem::path dir = json_path.parent_path();
  json list = json::array();
  for (const ExpertFile& f : experts) {
    const mecm::ExpertParams& p = f.params;
    TensorFile kernel;
    kernel.dims = {static_cast<std::uint32_t>(p.fusion.out_channels),
                   static_cast<std::uint32_t>(p.fusion.in_channels), 3, 3};
    std::vector<float> w(p.fusion.weights.begin(), p.fusion.weights.end());
    kernel.payload = std::move(w);
    write_tensor_file(kernel, dir / f.fusion_blob);
    list.push_back(json{
        {"memory", f.memory_blob.generic_string()},
        {"update_rate", p.memory.update_rate},
        {"topk", p.topk},
        {"mask_proj",
         {{"weights", rows_to_json(p.mask_proj.weights)},
          {"bias", p.mask_proj.bias}}},
        {"fusion",
         {{"weights", f.fusion_blob.generic_string()}, {"bias", p.fusion.bias}}}});
  }
  save_expert_memories(experts, json_path);
  write_json_file(json{{"experts", list}}, json_path);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace dmd::io
