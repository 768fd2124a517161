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

// sfg: command-line front end.
//
//   sfg simulate      --config FILE [--seed S] [--T T] [--out DIR] [--threads N] [--phi-check pow2]
//   sfg params        --graph FILE [--T T]
//   sfg hard-instance --kind c1|c2|c3|c4 --eps E --T T [--K K] [--graph FILE] [--seed S]
//                     [--full-table] [--out FILE]
//
// Exit status: 0 success, 2 configuration or usage error, 1 runtime failure.
// SFG_OUT_DIR sets the default output directory for `simulate`.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sfg/sfg.hpp"

namespace fs = std::filesystem;
using namespace sfg;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Edge lists without a probability column describe deterministic graphs.
StochasticFeedbackGraph load_any_graph(const std::string& path) {
  const std::string text = read_file(path);
  if (detail::looks_like_json(text)) return parse_stochastic_graph(text);
  const EdgeList list = parse_edge_list(text);
  const bool any_prob = std::any_of(list.entries.begin(), list.entries.end(), [](const auto& e) { return e.prob; });
  if (any_prob) return to_stochastic_graph(list);
  return StochasticFeedbackGraph::uniform_on(to_directed_graph(list), 1.0);
}

nlohmann::json maybe_set(const std::optional<VertexSet>& s) {
  if (!s) return nullptr;
  return {{"value", s->value}, {"set", s->vertices}, {"exact", s->exact}};
}

nlohmann::json weights_json(const PartialWeights& w) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : w) a.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
  return a;
}

nlohmann::json choice_json(const std::optional<ThresholdChoice>& c) {
  if (!c) return nullptr;
  return {{"eps", c->eps}, {"parameter", c->parameter}, {"ratio", json_number(c->ratio)}};
}

int cmd_params(const std::string& graph_path, std::optional<std::size_t> horizon) {
  const StochasticFeedbackGraph gs = load_any_graph(graph_path);
  const DirectedGraph g = support(gs);
  const Observability obs = classify(g);
  const DerivedWeights d = derive_weights(gs);
  nlohmann::json j;
  j["K"] = gs.num_vertices();
  j["class"] = to_string(obs.graph_class);
  j["alpha"] = maybe_set(independence_number(g, kAutoSolve));
  j["delta"] = obs.is_observable() ? maybe_set(weak_domination(g, kAutoSolve)) : nlohmann::json(nullptr);
  j["w_minus"] = weights_json(d.w_minus);
  j["w_plus"] = weights_json(d.w_plus);
  j["sigma"] = d.sigma;
  j["alpha_w_minus"] = maybe_set(weighted_independence_number(g, d.w_minus, kAutoSolve));
  j["alpha_w_plus"] = maybe_set(weighted_independence_number(g, d.w_plus, kAutoSolve));
  j["delta_w"] = obs.is_observable() ? maybe_set(weighted_weak_domination(g, d.w_plus, kAutoSolve))
                                     : nlohmann::json(nullptr);
  j["candidate_thresholds"] = candidate_thresholds(gs);
  j["optimal_strong"] = choice_json(optimal_threshold_strong(gs));
  j["optimal_weak"] = choice_json(optimal_threshold_weak(gs));
  if (horizon) {
    j["T"] = *horizon;
    if (const auto ds = optimal_threshold_delta_sigma(gs, *horizon)) {
      j["optimal_delta_sigma"] = {{"eps", ds->eps}, {"delta_w", ds->delta_w}, {"sigma", ds->sigma}};
    } else {
      j["optimal_delta_sigma"] = nullptr;
    }
    if (gs.num_vertices() >= 2) {
      const PhiValue v = phi(gs, *horizon);
      j["phi"] = {{"value", json_number(v.value)},
                  {"strong_branch", json_number(v.strong_branch)},
                  {"weak_branch", json_number(v.weak_branch)}};
    }
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> horizon,
                 std::string out_dir, std::optional<std::size_t> threads, const std::string& phi_check) {
  const fs::path cfg_path(config_path);
  ExperimentConfig c =
      parse_experiment_config(nlohmann::json::parse(read_file(config_path)), cfg_path.parent_path().empty()
                                                                                 ? fs::path(".")
                                                                                 : cfg_path.parent_path());
  if (seed) c.seeds = {*seed};
  if (horizon) c.horizon = *horizon;
  if (threads) c.threads = *threads;
  if (phi_check == "pow2") c.phi_schedule = PhiSchedule::kPowersOfTwo;
  if (out_dir.empty()) out_dir = c.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("SFG_OUT_DIR");
    out_dir = env ? env : "sfg_out";
  }
  const std::vector<RegretTrace> traces = run(c);
  nlohmann::json summary;
  summary["algorithm"] = to_string(c.algorithm);
  summary["T"] = c.horizon;
  summary["runs"] = nlohmann::json::array();
  for (const auto& tr : traces) {
    const std::string stem = tr.algorithm + "_seed" + std::to_string(tr.seed);
    write_file(fs::path(out_dir) / (stem + ".csv"), trace_csv(tr));
    write_file(fs::path(out_dir) / (stem + ".json"), tr.sidecar.dump(2) + "\n");
    summary["runs"].push_back({{"seed", tr.seed}, {"final_regret", tr.final_regret()}, {"trace", stem + ".csv"}});
  }
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_hard_instance(const std::string& kind_name, double eps, std::size_t horizon, std::size_t k,
                      const std::string& graph_path, std::uint64_t seed, bool full_table, const std::string& out) {
  ExperimentConfig c;
  HardInstanceConfig h;
  h.kind = parse_hard_instance_kind(kind_name);
  h.eps = eps;
  h.num_actions = k;
  if (!graph_path.empty()) h.base_graph = load_graph(graph_path);
  c.hard = h;
  c.horizon = horizon;
  const std::string text = dump_instance(prepare_instance(c, seed), seed, full_table).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with stochastic feedback graphs"};
  app.require_subcommand(1);

  std::string config_path, out, phi_check = "every", graph_path, kind = "c2";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon, threads;
  double eps = 0.1;
  std::size_t k = 2;
  bool full_table = false;

  auto* sim = app.add_subcommand("simulate", "run an experiment config and write traces");
  sim->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "run a single seed instead of the configured list");
  sim->add_option("--T", horizon, "override the horizon");
  sim->add_option("--out", out, "output directory");
  sim->add_option("--threads", threads, "worker threads");
  sim->add_option("--phi-check", phi_check, "stopping-function schedule")->check(CLI::IsMember({"every", "pow2"}));

  auto* par = app.add_subcommand("params", "report graph parameters");
  par->add_option("--graph", graph_path, "graph file (edge list or JSON)")->required()->check(CLI::ExistingFile);
  par->add_option("--T", horizon, "horizon for horizon-dependent quantities");

  std::uint64_t inst_seed = 1;
  auto* hard = app.add_subcommand("hard-instance", "generate and dump a lower-bound instance");
  hard->add_option("--kind", kind, "c1, c2, c3 or c4")->check(CLI::IsMember({"c1", "c2", "c3", "c4"}));
  hard->add_option("--eps", eps, "edge probability");
  hard->add_option("--T", horizon, "horizon")->required();
  hard->add_option("--K", k, "number of actions (c2)");
  hard->add_option("--graph", graph_path, "base graph (c1, c3)")->check(CLI::ExistingFile);
  hard->add_option("--seed", inst_seed, "seed");
  hard->add_flag("--full-table", full_table, "include the full loss table");
  hard->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(config_path, seed, horizon, out, threads, phi_check);
    if (*par) return cmd_params(graph_path, horizon);
    if (*hard) return cmd_hard_instance(kind, eps, *horizon, k, graph_path, inst_seed, full_table, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
