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

// Brute-force reference implementations. Written directly from the
// definitions with plain loops over subsets; they share no code with the
// library solvers they are compared against.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sfg/graph.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace oracle {

using sfg::DirectedGraph;

inline bool adjacent(const DirectedGraph& g, std::size_t i, std::size_t j) {
  return i != j && (g.has_edge(i, j) || g.has_edge(j, i));
}

inline bool independent(const DirectedGraph& g, std::uint32_t mask) {
  const std::size_t k = g.num_vertices();
  for (std::size_t i = 0; i < k; ++i) {
    if (!(mask >> i & 1u)) continue;
    for (std::size_t j = i + 1; j < k; ++j)
      if ((mask >> j & 1u) && adjacent(g, i, j)) return false;
  }
  return true;
}

inline double max_weight_independent(const DirectedGraph& g, const std::vector<double>& w) {
  const std::size_t k = g.num_vertices();
  double best = 0.0;
  for (std::uint32_t m = 0; m < (1u << k); ++m) {
    if (!independent(g, m)) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (m >> i & 1u) s += w[i];
    best = std::max(best, s);
  }
  return best;
}

inline std::size_t alpha(const DirectedGraph& g) {
  return static_cast<std::size_t>(std::lround(max_weight_independent(g, std::vector<double>(g.num_vertices(), 1.0))));
}

inline bool observable_vertex(const DirectedGraph& g, std::size_t i) {
  for (std::size_t j = 0; j < g.num_vertices(); ++j)
    if (g.has_edge(j, i)) return true;
  return false;
}

inline bool strongly_observable_vertex(const DirectedGraph& g, std::size_t i) {
  if (g.has_edge(i, i)) return true;
  for (std::size_t j = 0; j < g.num_vertices(); ++j)
    if (j != i && !g.has_edge(j, i)) return false;
  return observable_vertex(g, i);
}

enum class Cls { kStrong, kWeak, kNone };

inline Cls classify(const DirectedGraph& g) {
  bool all_obs = true, all_strong = true;
  for (std::size_t i = 0; i < g.num_vertices(); ++i) {
    all_obs = all_obs && observable_vertex(g, i);
    all_strong = all_strong && strongly_observable_vertex(g, i);
  }
  if (!all_obs) return Cls::kNone;
  return all_strong ? Cls::kStrong : Cls::kWeak;
}

// Minimum total weight of a set S such that every weakly observable vertex
// outside S has an in-neighbor in S. Weights may be absent (vertex not
// selectable). Empty optional when no set works.
inline std::optional<double> min_weak_dominating(const DirectedGraph& g, const std::vector<std::optional<double>>& w) {
  const std::size_t k = g.num_vertices();
  std::optional<double> best;
  for (std::uint32_t m = 0; m < (1u << k); ++m) {
    double cost = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (!(m >> i & 1u)) continue;
      if (!w[i]) ok = false;
      else cost += *w[i];
    }
    if (!ok) continue;
    for (std::size_t v = 0; v < k && ok; ++v) {
      if (!observable_vertex(g, v) || strongly_observable_vertex(g, v) || (m >> v & 1u)) continue;
      bool dominated = false;
      for (std::size_t u = 0; u < k; ++u)
        if ((m >> u & 1u) && g.has_edge(u, v)) dominated = true;
      ok = dominated;
    }
    if (ok && (!best || cost < *best)) best = cost;
  }
  return best;
}

inline std::optional<double> delta(const DirectedGraph& g) {
  return min_weak_dominating(g, std::vector<std::optional<double>>(g.num_vertices(), 1.0));
}

// Random directed graph: each ordered pair (self-loops included) present
// with probability `density`.
inline DirectedGraph random_graph(sfg::Rng& rng, std::size_t k, double density, double loop_density) {
  DirectedGraph g(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (sfg::bernoulli(rng, i == j ? loop_density : density)) g.add_edge(i, j);
  return g;
}

inline DirectedGraph random_undirected(sfg::Rng& rng, std::size_t k, double density) {
  DirectedGraph g(k);
  for (std::size_t i = 0; i < k; ++i) {
    g.add_edge(i, i);
    for (std::size_t j = i + 1; j < k; ++j)
      if (sfg::bernoulli(rng, density)) {
        g.add_edge(i, j);
        g.add_edge(j, i);
      }
  }
  return g;
}

// Random stochastic graph on a support, probabilities uniform in [lo, 1].
inline sfg::StochasticFeedbackGraph random_probabilities(sfg::Rng& rng, const DirectedGraph& g, double lo) {
  const std::size_t k = g.num_vertices();
  sfg::StochasticFeedbackGraph gs(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (g.has_edge(i, j)) gs.set(i, j, lo + (1.0 - lo) * sfg::uniform01(rng));
  return gs;
}

}  // namespace oracle
