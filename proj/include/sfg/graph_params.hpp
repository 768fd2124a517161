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
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sfg/errors.hpp"
#include "sfg/graph.hpp"

namespace sfg {

using VertexWeights = std::vector<double>;
// Weights with explicit "undefined" entries (empty neighborhoods).
using PartialWeights = std::vector<std::optional<double>>;

enum class SolveMode { kExact, kGreedy };

struct SolveOptions {
  SolveMode mode = SolveMode::kExact;
  // 0 selects the solver default (32 for independence, 24 for weighted
  // independence, 20 for domination).
  std::size_t exact_limit = 0;
  // Above the exact limit, use the greedy solver instead of throwing.
  bool fallback_to_greedy = false;
};

struct VertexSet {
  std::vector<std::size_t> vertices;
  double value = 0.0;
  // False for greedy results: a lower bound for independence, an upper bound
  // for domination.
  bool exact = true;

  std::size_t size() const { return vertices.size(); }
};

// Exact up to the default limits, greedy beyond them.
inline constexpr SolveOptions kAutoSolve{SolveMode::kExact, 0, true};

inline constexpr std::size_t kIndependenceExactLimit = 32;
inline constexpr std::size_t kWeightedIndependenceExactLimit = 24;
inline constexpr std::size_t kDominationExactLimit = 20;

namespace detail {

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }

inline std::vector<std::size_t> mask_to_vertices(Mask m) {
  std::vector<std::size_t> out;
  while (m) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

inline void check_weights(const VertexWeights& w, std::size_t k) {
  if (w.size() != k) throw ArgumentError("weight vector has wrong length");
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError("vertex weights must be positive and finite");
  }
}

// True when the exact solver should run; throws when it may not.
inline bool use_exact(const SolveOptions& opts, std::size_t k, std::size_t default_limit, const char* what) {
  if (opts.mode == SolveMode::kGreedy) return false;
  const std::size_t limit = std::min<std::size_t>(opts.exact_limit ? opts.exact_limit : default_limit, 64);
  if (k <= limit) return true;
  if (opts.fallback_to_greedy) return false;
  throw CapabilityError(std::string(what) + ": K=" + std::to_string(k) + " exceeds exact limit " +
                        std::to_string(limit));
}

// Orientation-blind adjacency without self-loops.
inline std::vector<std::vector<bool>> undirected_closure(const DirectedGraph& g) {
  const std::size_t k = g.num_vertices();
  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && (g.edge(i, j) || g.edge(j, i))) adj[i][j] = true;
  return adj;
}

// Maximum-weight independent set by branch and bound. The bound partitions
// the candidates into cliques greedily; an independent set takes at most one
// vertex per clique.
class MwisSolver {
 public:
  MwisSolver(const DirectedGraph& g, const VertexWeights& w) : k_(g.num_vertices()), w_(w), nb_(k_, 0) {
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (i != j && (g.edge(i, j) || g.edge(j, i))) nb_[i] |= bit(j);
  }

  VertexSet solve(double initial_best, Mask initial_set) {
    best_ = initial_best;
    best_set_ = initial_set;
    const Mask all = k_ == 64 ? ~Mask{0} : (bit(k_) - 1);
    expand(all, 0, 0.0);
    VertexSet out;
    out.vertices = mask_to_vertices(best_set_);
    out.value = best_;
    out.exact = true;
    return out;
  }

 private:
  double clique_bound(Mask cand) const {
    double bound = 0.0;
    while (cand) {
      const std::size_t v = static_cast<std::size_t>(std::countr_zero(cand));
      cand &= ~bit(v);
      double heaviest = w_[v];
      Mask grow = cand & nb_[v];
      while (grow) {
        const std::size_t u = static_cast<std::size_t>(std::countr_zero(grow));
        grow &= nb_[u];
        cand &= ~bit(u);
        heaviest = std::max(heaviest, w_[u]);
      }
      bound += heaviest;
    }
    return bound;
  }

  void expand(Mask cand, Mask current, double weight) {
    // Candidates without neighbours among the candidates are always taken.
    Mask isolated = 0;
    for (Mask m = cand; m; m &= m - 1) {
      const std::size_t v = static_cast<std::size_t>(std::countr_zero(m));
      if ((nb_[v] & cand) == 0) isolated |= bit(v);
    }
    for (Mask m = isolated; m; m &= m - 1) weight += w_[static_cast<std::size_t>(std::countr_zero(m))];
    current |= isolated;
    cand &= ~isolated;
    if (cand == 0) {
      if (weight > best_) {
        best_ = weight;
        best_set_ = current;
      }
      return;
    }
    if (weight + clique_bound(cand) <= best_) return;
    // Branch on the candidate with most neighbours among the candidates.
    std::size_t pick = 0;
    int most = -1;
    for (Mask m = cand; m; m &= m - 1) {
      const std::size_t v = static_cast<std::size_t>(std::countr_zero(m));
      const int d = std::popcount(nb_[v] & cand);
      if (d > most) {
        most = d;
        pick = v;
      }
    }
    expand(cand & ~nb_[pick] & ~bit(pick), current | bit(pick), weight + w_[pick]);
    expand(cand & ~bit(pick), current, weight);
  }

  std::size_t k_;
  const VertexWeights& w_;
  std::vector<Mask> nb_;
  double best_ = 0.0;
  Mask best_set_ = 0;
};

// Greedy independent set: repeatedly take the vertex maximizing
// w / (remaining degree + 1), lowest index on ties.
inline VertexSet greedy_independent_set(const DirectedGraph& g, const VertexWeights& w) {
  const std::size_t k = g.num_vertices();
  const auto adj = undirected_closure(g);
  std::vector<bool> alive(k, true);
  VertexSet out;
  out.exact = false;
  while (true) {
    std::size_t pick = k;
    double best_score = -1.0;
    for (std::size_t v = 0; v < k; ++v) {
      if (!alive[v]) continue;
      std::size_t deg = 0;
      for (std::size_t u = 0; u < k; ++u)
        if (alive[u] && adj[v][u]) ++deg;
      const double score = w[v] / static_cast<double>(deg + 1);
      if (score > best_score) {
        best_score = score;
        pick = v;
      }
    }
    if (pick == k) break;
    out.vertices.push_back(pick);
    out.value += w[pick];
    alive[pick] = false;
    for (std::size_t u = 0; u < k; ++u)
      if (adj[pick][u]) alive[u] = false;
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

// Weighted set cover over the weakly observable vertices. Choosing vertex j
// covers its weakly observable out-neighbours and j itself. Vertices with
// selectable[j] == false may not be chosen.
struct CoverProblem {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> covers;  // covers[j] = elements covered by j
  std::vector<bool> is_element;
  std::vector<bool> selectable;
  std::vector<double> cost;
};

inline CoverProblem make_cover_problem(const DirectedGraph& g, const std::vector<double>& cost,
                                       const std::vector<bool>& selectable) {
  const Observability obs = classify(g);
  if (!obs.is_observable()) throw DomainError("weak domination undefined for non-observable graph");
  CoverProblem p;
  p.k = g.num_vertices();
  p.covers.resize(p.k);
  p.is_element.assign(p.k, false);
  for (std::size_t i = 0; i < p.k; ++i) p.is_element[i] = obs.weakly_observable(i);
  for (std::size_t j = 0; j < p.k; ++j) {
    for (std::size_t i = 0; i < p.k; ++i)
      if (p.is_element[i] && (i == j || g.edge(j, i))) p.covers[j].push_back(i);
  }
  p.selectable = selectable;
  p.cost = cost;
  return p;
}

inline VertexSet greedy_cover(const CoverProblem& p) {
  std::vector<bool> uncovered = p.is_element;
  std::size_t remaining = static_cast<std::size_t>(std::count(uncovered.begin(), uncovered.end(), true));
  VertexSet out;
  out.exact = false;
  std::vector<bool> chosen(p.k, false);
  while (remaining > 0) {
    std::size_t pick = p.k;
    double pick_cost = 0.0;
    std::size_t pick_gain = 0;
    for (std::size_t j = 0; j < p.k; ++j) {
      if (!p.selectable[j] || chosen[j]) continue;
      std::size_t gain = 0;
      for (std::size_t i : p.covers[j]) gain += uncovered[i] ? 1 : 0;
      if (gain == 0) continue;
      // cost/gain < pick_cost/pick_gain, compared without division.
      if (pick == p.k || p.cost[j] * static_cast<double>(pick_gain) < pick_cost * static_cast<double>(gain)) {
        pick = j;
        pick_cost = p.cost[j];
        pick_gain = gain;
      }
    }
    if (pick == p.k) throw DomainError("weakly observable vertices cannot be dominated by selectable vertices");
    chosen[pick] = true;
    out.vertices.push_back(pick);
    out.value += p.cost[pick];
    for (std::size_t i : p.covers[pick]) {
      if (uncovered[i]) {
        uncovered[i] = false;
        --remaining;
      }
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

class CoverSolver {
 public:
  explicit CoverSolver(const CoverProblem& p) : p_(p), cover_mask_(p.k, 0) {
    for (std::size_t j = 0; j < p.k; ++j)
      for (std::size_t i : p.covers[j]) cover_mask_[j] |= bit(i);
    for (std::size_t i = 0; i < p.k; ++i)
      if (p.is_element[i]) elements_ |= bit(i);
  }

  VertexSet solve(const VertexSet& upper) {
    best_ = upper.value;
    best_set_ = 0;
    for (std::size_t v : upper.vertices) best_set_ |= bit(v);
    search(elements_, 0, 0.0);
    VertexSet out;
    out.vertices = mask_to_vertices(best_set_);
    out.value = 0.0;
    for (std::size_t v : out.vertices) out.value += p_.cost[v];
    out.exact = true;
    return out;
  }

 private:
  void search(Mask uncovered, Mask chosen, double cost) {
    if (uncovered == 0) {
      if (cost < best_) {
        best_ = cost;
        best_set_ = chosen;
      }
      return;
    }
    // Fractional bound: every uncovered element costs at least the best
    // cost-per-new-element ratio.
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p_.k; ++j) {
      if (!p_.selectable[j] || (chosen & bit(j))) continue;
      const int gain = std::popcount(cover_mask_[j] & uncovered);
      if (gain > 0) min_ratio = std::min(min_ratio, p_.cost[j] / gain);
    }
    if (!std::isfinite(min_ratio)) return;
    if (cost + min_ratio * std::popcount(uncovered) >= best_) return;

    // Branch on the uncovered element with the fewest covering options.
    std::size_t element = 0;
    int fewest = std::numeric_limits<int>::max();
    for (Mask m = uncovered; m; m &= m - 1) {
      const std::size_t e = static_cast<std::size_t>(std::countr_zero(m));
      int options = 0;
      for (std::size_t j = 0; j < p_.k; ++j)
        if (p_.selectable[j] && !(chosen & bit(j)) && (cover_mask_[j] & bit(e))) ++options;
      if (options < fewest) {
        fewest = options;
        element = e;
      }
    }
    if (fewest == 0) return;
    std::vector<std::pair<double, std::size_t>> options;
    for (std::size_t j = 0; j < p_.k; ++j) {
      if (p_.selectable[j] && !(chosen & bit(j)) && (cover_mask_[j] & bit(element))) {
        options.emplace_back(p_.cost[j] / std::popcount(cover_mask_[j] & uncovered), j);
      }
    }
    std::sort(options.begin(), options.end());
    for (const auto& [ratio, j] : options) {
      search(uncovered & ~cover_mask_[j], chosen | bit(j), cost + p_.cost[j]);
    }
  }

  const CoverProblem& p_;
  std::vector<Mask> cover_mask_;
  Mask elements_ = 0;
  double best_ = 0.0;
  Mask best_set_ = 0;
};

inline VertexSet solve_cover(const DirectedGraph& g, const std::vector<double>& cost,
                             const std::vector<bool>& selectable, const SolveOptions& opts) {
  const CoverProblem p = make_cover_problem(g, cost, selectable);
  const bool exact = use_exact(opts, g.num_vertices(), kDominationExactLimit, "weak domination");
  VertexSet greedy = greedy_cover(p);
  if (!exact) return greedy;
  return CoverSolver(p).solve(greedy);
}

}  // namespace detail

// Independence number, ignoring edge orientation and self-loops.
inline VertexSet independence_number(const DirectedGraph& g, const SolveOptions& opts = {}) {
  const std::size_t k = g.num_vertices();
  const VertexWeights unit(k, 1.0);
  if (!detail::use_exact(opts, k, kIndependenceExactLimit, "independence number")) {
    return detail::greedy_independent_set(g, unit);
  }
  const VertexSet start = detail::greedy_independent_set(g, unit);
  detail::Mask start_mask = 0;
  for (std::size_t v : start.vertices) start_mask |= detail::bit(v);
  return detail::MwisSolver(g, unit).solve(start.value, start_mask);
}

inline VertexSet weighted_independence_number(const DirectedGraph& g, const VertexWeights& w,
                                              const SolveOptions& opts = {}) {
  const std::size_t k = g.num_vertices();
  detail::check_weights(w, k);
  if (!detail::use_exact(opts, k, kWeightedIndependenceExactLimit, "weighted independence number")) {
    return detail::greedy_independent_set(g, w);
  }
  const VertexSet start = detail::greedy_independent_set(g, w);
  detail::Mask start_mask = 0;
  for (std::size_t v : start.vertices) start_mask |= detail::bit(v);
  return detail::MwisSolver(g, w).solve(start.value, start_mask);
}

// α_w over the vertices with defined weight; undefined vertices are removed
// together with their incident edges.
inline VertexSet weighted_independence_number(const DirectedGraph& g, const PartialWeights& w,
                                              const SolveOptions& opts = {}) {
  const std::size_t k = g.num_vertices();
  if (w.size() != k) throw ArgumentError("weight vector has wrong length");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < k; ++i)
    if (w[i].has_value()) keep.push_back(i);
  if (keep.empty()) return VertexSet{};
  DirectedGraph sub(keep.size());
  VertexWeights sw(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    sw[a] = *w[keep[a]];
    for (std::size_t b = 0; b < keep.size(); ++b)
      if (g.edge(keep[a], keep[b])) sub.add_edge(a, b);
  }
  VertexSet r = weighted_independence_number(sub, sw, opts);
  for (auto& v : r.vertices) v = keep[v];
  return r;
}

// Weak domination number δ: smallest set dominating every weakly observable
// vertex outside it.
inline VertexSet weak_domination(const DirectedGraph& g, const SolveOptions& opts = {}) {
  const std::size_t k = g.num_vertices();
  return detail::solve_cover(g, std::vector<double>(k, 1.0), std::vector<bool>(k, true), opts);
}

inline VertexSet weighted_weak_domination(const DirectedGraph& g, const VertexWeights& w,
                                          const SolveOptions& opts = {}) {
  detail::check_weights(w, g.num_vertices());
  return detail::solve_cover(g, w, std::vector<bool>(g.num_vertices(), true), opts);
}

// Undefined vertices cannot join the dominating set.
inline VertexSet weighted_weak_domination(const DirectedGraph& g, const PartialWeights& w,
                                          const SolveOptions& opts = {}) {
  const std::size_t k = g.num_vertices();
  if (w.size() != k) throw ArgumentError("weight vector has wrong length");
  std::vector<double> cost(k, 1.0);
  std::vector<bool> selectable(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    if (!w[i].has_value()) continue;
    if (!(*w[i] > 0.0) || !std::isfinite(*w[i])) throw ArgumentError("vertex weights must be positive and finite");
    cost[i] = *w[i];
    selectable[i] = true;
  }
  return detail::solve_cover(g, cost, selectable, opts);
}

}  // namespace sfg
