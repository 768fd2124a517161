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
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfg/errors.hpp"

namespace sfg {

using Edge = std::pair<std::size_t, std::size_t>;

// Directed graph on vertices 0..K-1 with optional self-loops, stored as a
// dense K x K adjacency matrix.
class DirectedGraph {
 public:
  explicit DirectedGraph(std::size_t num_vertices) : k_(num_vertices), adj_(num_vertices * num_vertices, 0) {
    if (num_vertices == 0) throw ArgumentError("graph needs at least one vertex");
  }

  DirectedGraph(std::size_t num_vertices, const std::vector<Edge>& edges) : DirectedGraph(num_vertices) {
    for (const auto& [i, j] : edges) {
      check_vertex(i);
      check_vertex(j);
      if (adj_[i * k_ + j]) {
        throw ArgumentError("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      adj_[i * k_ + j] = 1;
    }
  }

  // Every ordered pair, optionally including self-loops.
  static DirectedGraph complete(std::size_t k, bool self_loops = true) {
    DirectedGraph g(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (self_loops || i != j) g.adj_[i * k + j] = 1;
    return g;
  }

  static DirectedGraph self_loops(std::size_t k) {
    DirectedGraph g(k);
    for (std::size_t i = 0; i < k; ++i) g.adj_[i * k + i] = 1;
    return g;
  }

  std::size_t num_vertices() const { return k_; }

  bool has_edge(std::size_t i, std::size_t j) const {
    check_vertex(i);
    check_vertex(j);
    return adj_[i * k_ + j] != 0;
  }

  // Unchecked access for inner loops.
  bool edge(std::size_t i, std::size_t j) const { return adj_[i * k_ + j] != 0; }

  void add_edge(std::size_t i, std::size_t j) {
    check_vertex(i);
    check_vertex(j);
    adj_[i * k_ + j] = 1;
  }

  void remove_edge(std::size_t i, std::size_t j) {
    check_vertex(i);
    check_vertex(j);
    adj_[i * k_ + j] = 0;
  }

  void clear() { std::fill(adj_.begin(), adj_.end(), 0); }

  bool has_self_loop(std::size_t i) const { return has_edge(i, i); }

  std::size_t num_edges() const {
    std::size_t n = 0;
    for (auto a : adj_) n += a;
    return n;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (adj_[i * k_ + j]) out.emplace_back(i, j);
    return out;
  }

  std::vector<std::size_t> in_neighbors(std::size_t i) const {
    check_vertex(i);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < k_; ++j)
      if (adj_[j * k_ + i]) out.push_back(j);
    return out;
  }

  std::vector<std::size_t> out_neighbors(std::size_t i) const {
    check_vertex(i);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < k_; ++j)
      if (adj_[i * k_ + j]) out.push_back(j);
    return out;
  }

  // Row-major 0/1 matrix; usable as a hash key.
  const std::vector<std::uint8_t>& adjacency() const { return adj_; }

  bool operator==(const DirectedGraph& other) const = default;

 private:
  void check_vertex(std::size_t i) const {
    if (i >= k_) {
      throw ArgumentError("vertex " + std::to_string(i) + " out of range for K=" + std::to_string(k_));
    }
  }

  std::size_t k_;
  std::vector<std::uint8_t> adj_;
};

struct Neighborhoods {
  std::vector<std::size_t> in;
  std::vector<std::size_t> out;
};

inline Neighborhoods neighborhoods(const DirectedGraph& g, std::size_t i) {
  return {g.in_neighbors(i), g.out_neighbors(i)};
}

enum class ObservabilityClass { kNonObservable, kWeaklyObservable, kStronglyObservable };

inline const char* to_string(ObservabilityClass c) {
  switch (c) {
    case ObservabilityClass::kNonObservable:
      return "non_observable";
    case ObservabilityClass::kWeaklyObservable:
      return "weakly_observable";
    case ObservabilityClass::kStronglyObservable:
      return "strongly_observable";
  }
  return "unknown";
}

struct Observability {
  ObservabilityClass graph_class = ObservabilityClass::kNonObservable;
  std::vector<bool> observable;
  std::vector<bool> strongly_observable;

  bool is_observable() const { return graph_class != ObservabilityClass::kNonObservable; }
  bool is_strongly_observable() const { return graph_class == ObservabilityClass::kStronglyObservable; }
  bool weakly_observable(std::size_t i) const { return observable[i] && !strongly_observable[i]; }

  std::vector<std::size_t> weakly_observable_vertices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < observable.size(); ++i)
      if (weakly_observable(i)) out.push_back(i);
    return out;
  }
};

// A vertex is strongly observable when it is observable and either has a
// self-loop or is seen from every other vertex. The observability requirement
// only matters for K = 1 without a self-loop.
inline Observability classify(const DirectedGraph& g) {
  const std::size_t k = g.num_vertices();
  Observability obs;
  obs.observable.assign(k, false);
  obs.strongly_observable.assign(k, false);
  bool all_observable = true;
  bool all_strong = true;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t in_degree_others = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (j != i && g.edge(j, i)) ++in_degree_others;
    const bool loop = g.edge(i, i);
    obs.observable[i] = loop || in_degree_others > 0;
    obs.strongly_observable[i] = obs.observable[i] && (loop || in_degree_others == k - 1);
    all_observable = all_observable && obs.observable[i];
    all_strong = all_strong && obs.strongly_observable[i];
  }
  if (all_strong) {
    obs.graph_class = ObservabilityClass::kStronglyObservable;
  } else if (all_observable) {
    obs.graph_class = ObservabilityClass::kWeaklyObservable;
  } else {
    obs.graph_class = ObservabilityClass::kNonObservable;
  }
  return obs;
}

}  // namespace sfg
