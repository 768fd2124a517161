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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/graph_params.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

enum class HardInstanceKind { kStrongC1, kStrongC2, kWeakC3, kWeakC4 };

inline const char* to_string(HardInstanceKind k) {
  switch (k) {
    case HardInstanceKind::kStrongC1:
      return "c1";
    case HardInstanceKind::kStrongC2:
      return "c2";
    case HardInstanceKind::kWeakC3:
      return "c3";
    case HardInstanceKind::kWeakC4:
      return "c4";
  }
  return "unknown";
}

inline HardInstanceKind parse_hard_instance_kind(const std::string& s) {
  if (s == "c1") return HardInstanceKind::kStrongC1;
  if (s == "c2") return HardInstanceKind::kStrongC2;
  if (s == "c3") return HardInstanceKind::kWeakC3;
  if (s == "c4") return HardInstanceKind::kWeakC4;
  throw ConfigError("unknown hard instance kind '" + s + "' (expected c1, c2, c3 or c4)");
}

// Gap formulas of the four constructions, before clamping.
inline double beta_c1(double alpha, double eps, double horizon) {
  return (1.0 / 33.0) * std::sqrt(alpha / (2.0 * std::log(4.0 / 3.0) * eps * horizon));
}
inline double beta_c2(double eps, double horizon) { return 0.25 / std::sqrt(2.0 * eps * horizon); }
inline double beta_c3(double m, double eps, double horizon, double k) {
  return std::cbrt(m) / std::cbrt(32.0 * eps * horizon * std::log(k));
}
inline double beta_c4(double eps, double horizon) {
  return 1.0 / (2.0 * std::numbers::sqrt2) / std::cbrt(eps * horizon);
}

struct HardInstanceSpec {
  HardInstanceKind kind = HardInstanceKind::kStrongC2;
  DirectedGraph base_graph{1};
  double eps = 0.0;
  std::size_t horizon = 0;
  double beta = 0.0;      // after clamping to [0, 1/4]
  double beta_raw = 0.0;  // closed form
  bool beta_clamped = false;
  // Hidden index: a vertex for c1/c3, a sign in {-1,+1} for c2/c4.
  long long z = 0;
  std::vector<std::size_t> good_set;  // independent set (c1) or U (c3)
  std::size_t m = 0;                  // |U| for c3
  double m_target = 0.0;              // δ/(50 ln K) for c3
  std::uint64_t seed = 0;
  std::vector<double> arm_means;  // declared Bernoulli means, 1 for constant arms
  std::vector<std::string> warnings;
};

struct HardInstance {
  StochasticFeedbackGraph graph{1};
  std::shared_ptr<const LossTable> losses;
  HardInstanceSpec spec;
};

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("eps must lie in (0,1]");
}

inline void set_beta(HardInstanceSpec& spec, double raw) {
  spec.beta_raw = raw;
  spec.beta = std::clamp(raw, 0.0, 0.25);
  spec.beta_clamped = spec.beta != raw;
  if (spec.beta_clamped) spec.warnings.push_back("beta clamped into [0, 1/4]");
}

inline HardInstance finish_instance(StochasticFeedbackGraph graph, HardInstanceSpec spec) {
  Rng loss_rng = make_stream(spec.seed, Stream::kLoss);
  auto table = std::make_shared<const LossTable>(bernoulli_losses(spec.horizon, spec.arm_means, loss_rng));
  return HardInstance{std::move(graph), std::move(table), std::move(spec)};
}

}  // namespace detail

// Strongly observable construction on an arbitrary base graph: self-loops are
// added, every edge fires with probability eps, a hidden arm of a maximum
// independent set is better by beta and every other arm loses 1.
inline HardInstance gen_hard_strong_c1(const DirectedGraph& g, double eps, std::size_t horizon, std::uint64_t seed) {
  detail::check_eps(eps);
  if (horizon == 0) throw ArgumentError("horizon must be positive");
  const std::size_t k = g.num_vertices();
  const VertexSet mis = independence_number(g, kAutoSolve);
  const double alpha = static_cast<double>(mis.size());
  if (mis.size() < 2) throw ArgumentError("construction needs independence number > 1");

  HardInstanceSpec spec;
  spec.kind = HardInstanceKind::kStrongC1;
  spec.base_graph = g;
  spec.eps = eps;
  spec.horizon = horizon;
  spec.seed = seed;
  spec.good_set = mis.vertices;
  if (static_cast<double>(horizon) < 0.0064 * alpha * alpha * alpha / eps) {
    spec.warnings.push_back("T below 0.0064 alpha^3 / eps; the regret floor is not guaranteed");
  }
  detail::set_beta(spec, beta_c1(alpha, eps, static_cast<double>(horizon)));

  Rng inst = make_stream(seed, Stream::kInstance);
  const std::size_t zi = spec.good_set[uniform_index(inst, spec.good_set.size())];
  spec.z = static_cast<long long>(zi);
  spec.arm_means.assign(k, 1.0);
  for (std::size_t v : spec.good_set) spec.arm_means[v] = 0.5;
  spec.arm_means[zi] = 0.5 - spec.beta;

  DirectedGraph with_loops = g;
  for (std::size_t i = 0; i < k; ++i) with_loops.add_edge(i, i);
  return detail::finish_instance(StochasticFeedbackGraph::uniform_on(with_loops, eps), std::move(spec));
}

// Complete graph at probability eps; arm 0 is better or worse by beta.
inline HardInstance gen_hard_strong_c2(double eps, std::size_t horizon, std::size_t k, std::uint64_t seed) {
  detail::check_eps(eps);
  if (k < 2) throw ArgumentError("construction needs K >= 2");
  if (horizon == 0) throw ArgumentError("horizon must be positive");
  HardInstanceSpec spec;
  spec.kind = HardInstanceKind::kStrongC2;
  spec.base_graph = DirectedGraph::complete(k);
  spec.eps = eps;
  spec.horizon = horizon;
  spec.seed = seed;
  if (static_cast<double>(horizon) < 1.0 / (2.0 * eps)) spec.warnings.push_back("T below 1/(2 eps)");
  detail::set_beta(spec, beta_c2(eps, static_cast<double>(horizon)));
  Rng inst = make_stream(seed, Stream::kInstance);
  spec.z = bernoulli(inst, 0.5) ? 1 : -1;
  spec.arm_means.assign(k, 0.5);
  spec.arm_means[0] = 0.5 - spec.beta * static_cast<double>(spec.z);
  StochasticFeedbackGraph graph = StochasticFeedbackGraph::uniform_on(spec.base_graph, eps);
  return detail::finish_instance(std::move(graph), std::move(spec));
}

// Greedy independent subset U of the weakly observable vertices in which no
// vertex of the graph dominates more than max(1, floor(ln K)) members.
inline std::vector<std::size_t> spread_independent_set(const DirectedGraph& g) {
  const std::size_t k = g.num_vertices();
  const Observability obs = classify(g);
  const std::size_t cap = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log(static_cast<double>(k)))));
  std::vector<bool> candidate(k, false);
  for (std::size_t i = 0; i < k; ++i) candidate[i] = obs.weakly_observable(i);
  std::vector<std::size_t> dominated(k, 0);
  std::vector<std::size_t> u;
  for (std::size_t v = 0; v < k; ++v) {
    if (!candidate[v]) continue;
    u.push_back(v);
    candidate[v] = false;
    for (std::size_t x = 0; x < k; ++x)
      if (g.edge(v, x) || g.edge(x, v)) candidate[x] = false;
    for (std::size_t x = 0; x < k; ++x) {
      if (!g.edge(x, v)) continue;
      if (++dominated[x] < cap) continue;
      for (std::size_t y = 0; y < k; ++y)
        if (g.edge(x, y)) candidate[y] = false;
    }
  }
  return u;
}

// Weakly observable construction: good arms form U, the hidden one is better
// by beta, all other arms lose 1. Every edge fires with probability eps.
inline HardInstance gen_hard_weak_c3(const DirectedGraph& g, double eps, std::size_t horizon, std::uint64_t seed) {
  detail::check_eps(eps);
  if (horizon == 0) throw ArgumentError("horizon must be positive");
  const Observability obs = classify(g);
  if (obs.graph_class != ObservabilityClass::kWeaklyObservable) {
    throw DomainError("construction needs a weakly observable graph");
  }
  const std::size_t k = g.num_vertices();
  const double lnk = std::log(static_cast<double>(k));
  HardInstanceSpec spec;
  spec.kind = HardInstanceKind::kWeakC3;
  spec.base_graph = g;
  spec.eps = eps;
  spec.horizon = horizon;
  spec.seed = seed;
  const double delta = static_cast<double>(weak_domination(g, kAutoSolve).size());
  if (delta < 100.0 * lnk) spec.warnings.push_back("delta below 100 ln K; the regret floor is not guaranteed");
  if (static_cast<double>(horizon) < 2.0 * static_cast<double>(k) / (eps * lnk)) {
    spec.warnings.push_back("T below 2K/(eps ln K)");
  }
  spec.good_set = spread_independent_set(g);
  spec.m = spec.good_set.size();
  spec.m_target = delta / (50.0 * lnk);
  if (static_cast<double>(spec.m) < spec.m_target) {
    spec.warnings.push_back("greedy U smaller than delta/(50 ln K); beta uses the achieved size");
  }
  detail::set_beta(spec, beta_c3(static_cast<double>(spec.m), eps, static_cast<double>(horizon), static_cast<double>(k)));
  Rng inst = make_stream(seed, Stream::kInstance);
  const std::size_t zi = spec.good_set[uniform_index(inst, spec.good_set.size())];
  spec.z = static_cast<long long>(zi);
  spec.arm_means.assign(k, 1.0);
  for (std::size_t v : spec.good_set) spec.arm_means[v] = 0.5;
  spec.arm_means[zi] = 0.5 - spec.beta;
  return detail::finish_instance(StochasticFeedbackGraph::uniform_on(g, eps), std::move(spec));
}

// Three-vertex weakly observable graph {(1,1), (2,2), (2,0)} at probability
// eps. Vertex 0 has no self-loop and no edge from vertex 1.
inline DirectedGraph canonical_weak_graph() { return DirectedGraph(3, {{1, 1}, {2, 2}, {2, 0}}); }

inline HardInstance gen_hard_weak_c4(double eps, std::size_t horizon, std::uint64_t seed) {
  detail::check_eps(eps);
  if (horizon == 0) throw ArgumentError("horizon must be positive");
  HardInstanceSpec spec;
  spec.kind = HardInstanceKind::kWeakC4;
  spec.base_graph = canonical_weak_graph();
  spec.eps = eps;
  spec.horizon = horizon;
  spec.seed = seed;
  if (static_cast<double>(horizon) < 2.0 * std::numbers::sqrt2 / eps) spec.warnings.push_back("T below 2 sqrt(2)/eps");
  detail::set_beta(spec, beta_c4(eps, static_cast<double>(horizon)));
  Rng inst = make_stream(seed, Stream::kInstance);
  spec.z = bernoulli(inst, 0.5) ? 1 : -1;
  spec.arm_means = {0.5 - spec.beta * static_cast<double>(spec.z), 0.5, 1.0};
  StochasticFeedbackGraph graph = StochasticFeedbackGraph::uniform_on(spec.base_graph, eps);
  return detail::finish_instance(std::move(graph), std::move(spec));
}

}  // namespace sfg
