// Copyright 2026 The sfg Authors.
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

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sfg/errors.hpp"
#include "sfg/graph_io.hpp"
#include "sfg/harness.hpp"

namespace sfg {

// Experiment config as JSON. Keys:
//
//   algorithm     edge_catcher | otcg | exp3g_strong | exp3g_weak | uniform_baseline
//   mode          local | full_graph (default local)
//   T             horizon
//   seeds         list of seeds, or num_seeds (+ first_seed, default 1)
//   threads       worker threads (default 1)
//   graph         {"K": n, "p": [[...]]}  or  graph_file: path
//   losses        {"kind": "bernoulli", "means": [...]}
//                 {"kind": "constant", "values": [...]}
//                 {"kind": "alternating"}
//   hard_instance {"kind": "c1".."c4", "eps": x, "K": n, "base_graph_file": path}
//   instance_file dump written by `sfg hard-instance --full-table`
//   phi_check     every | pow2
//   phi_constants {"c_strong": x, "c_weak": y}
//   otcg          {"gamma_log": "kt" | "confidence", "lambda_check": "every" | "pow2",
//                  "lambda_constant": x, "exact_domination_limit": n}
//   out           output directory
//
// Relative paths resolve against `base_dir`.

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).string();
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline LossModel parse_loss_model(const nlohmann::json& j) {
  LossModel m;
  const std::string kind = get_or<std::string>(j, "kind", "bernoulli");
  if (kind == "bernoulli") {
    m.kind = LossModel::Kind::kBernoulli;
    m.values = get_or<std::vector<double>>(j, "means", {});
  } else if (kind == "constant") {
    m.kind = LossModel::Kind::kConstant;
    m.values = get_or<std::vector<double>>(j, "values", {});
  } else if (kind == "alternating") {
    m.kind = LossModel::Kind::kAlternating;
  } else {
    throw ConfigError("unknown loss kind '" + kind + "'");
  }
  for (double v : m.values)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("loss parameters must lie in [0, 1]");
  return m;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "algorithm", "mode",          "T",           "seeds",         "num_seeds", "first_seed",
      "threads",   "graph",         "graph_file",  "losses",        "hard_instance", "instance_file",
      "phi_check", "phi_constants", "otcg",        "out"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  c.algorithm = parse_algorithm(detail::get_or<std::string>(j, "algorithm", "edge_catcher"));
  c.mode = parse_feedback_mode(detail::get_or<std::string>(j, "mode", "local"));
  c.horizon = detail::get_or<std::size_t>(j, "T", 1000);
  if (j.contains("seeds")) {
    c.seeds = detail::get_or<std::vector<std::uint64_t>>(j, "seeds", {});
  } else {
    c.seeds = default_seeds(detail::get_or<std::size_t>(j, "num_seeds", 20),
                            detail::get_or<std::uint64_t>(j, "first_seed", 1));
  }
  c.threads = detail::get_or<std::size_t>(j, "threads", 1);
  try {
    if (j.contains("graph")) c.graph = stochastic_graph_from_json(j.at("graph"));
    if (j.contains("graph_file")) {
      if (c.graph) throw ConfigError("give either 'graph' or 'graph_file'");
      c.graph = load_stochastic_graph(detail::resolve(base_dir, j.at("graph_file").get<std::string>()));
    }
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("graph: ") + e.what());
  }
  if (j.contains("losses")) c.losses = detail::parse_loss_model(j.at("losses"));
  if (j.contains("hard_instance")) {
    const auto& h = j.at("hard_instance");
    HardInstanceConfig hc;
    hc.kind = parse_hard_instance_kind(detail::get_or<std::string>(h, "kind", "c2"));
    hc.eps = detail::get_or<double>(h, "eps", 0.1);
    hc.num_actions = detail::get_or<std::size_t>(h, "K", 2);
    if (h.contains("base_graph_file")) {
      hc.base_graph = load_graph(detail::resolve(base_dir, h.at("base_graph_file").get<std::string>()));
    }
    c.hard = hc;
  }
  if (j.contains("instance_file")) {
    if (c.graph || c.hard) throw ConfigError("'instance_file' replaces 'graph' and 'hard_instance'");
    const auto dump = nlohmann::json::parse(read_file(detail::resolve(base_dir, j.at("instance_file").get<std::string>())));
    PreparedInstance inst = load_instance(dump);
    c.graph = inst.graph;
    c.fixed_losses = inst.losses;
    if (!j.contains("T")) c.horizon = inst.losses->horizon();
  }
  const std::string phi_check = detail::get_or<std::string>(j, "phi_check", "every");
  if (phi_check == "pow2") {
    c.phi_schedule = PhiSchedule::kPowersOfTwo;
  } else if (phi_check != "every") {
    throw ConfigError("phi_check must be 'every' or 'pow2'");
  }
  if (j.contains("phi_constants")) {
    const auto& pc = j.at("phi_constants");
    c.phi_constants.c_strong = detail::get_or<double>(pc, "c_strong", c.phi_constants.c_strong);
    c.phi_constants.c_weak = detail::get_or<double>(pc, "c_weak", c.phi_constants.c_weak);
  }
  if (j.contains("otcg")) {
    const auto& o = j.at("otcg");
    const std::string gl = detail::get_or<std::string>(o, "gamma_log", "kt");
    if (gl != "kt" && gl != "confidence") throw ConfigError("otcg.gamma_log must be 'kt' or 'confidence'");
    c.otcg.gamma_log_kt = gl == "kt";
    const std::string lc = detail::get_or<std::string>(o, "lambda_check", "every");
    if (lc != "every" && lc != "pow2") throw ConfigError("otcg.lambda_check must be 'every' or 'pow2'");
    c.otcg.lambda_pow2 = lc == "pow2";
    c.otcg.lambda_constant = detail::get_or<double>(o, "lambda_constant", c.otcg.lambda_constant);
    if (!(c.otcg.lambda_constant > 0.0)) throw ConfigError("otcg.lambda_constant must be positive");
    c.otcg.exact_domination_limit = detail::get_or<std::size_t>(o, "exact_domination_limit", c.otcg.exact_domination_limit);
  }
  c.out_dir = detail::get_or<std::string>(j, "out", "");
  return c;
}

}  // namespace sfg
