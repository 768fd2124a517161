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

#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

// Edge-list text format:
//
//   K
//   i j [p]
//   ...
//
// '#' starts a comment running to the end of the line. Blank lines are ignored.
struct EdgeListEntry {
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<double> prob;
};

struct EdgeList {
  std::size_t num_vertices = 0;
  std::vector<EdgeListEntry> entries;
};

inline EdgeList parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  EdgeList out;
  bool have_k = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    auto fail = [&](const std::string& why) {
      throw ArgumentError("edge list line " + std::to_string(line_no) + ": " + why);
    };
    if (!have_k) {
      long long k = 0;
      if (!(ls >> k) || k <= 0) fail("expected positive vertex count");
      out.num_vertices = static_cast<std::size_t>(k);
      have_k = true;
      continue;
    }
    long long i = -1, j = -1;
    if (!(ls >> i >> j)) fail("expected 'i j [p]'");
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= out.num_vertices ||
        static_cast<std::size_t>(j) >= out.num_vertices) {
      fail("vertex out of range");
    }
    EdgeListEntry e{static_cast<std::size_t>(i), static_cast<std::size_t>(j), std::nullopt};
    double p = 0.0;
    if (ls >> p) e.prob = p;
    std::string rest;
    if (ls >> rest) fail("trailing tokens");
    out.entries.push_back(e);
  }
  if (!have_k) throw ArgumentError("edge list is empty");
  return out;
}

inline DirectedGraph to_directed_graph(const EdgeList& list) {
  std::vector<Edge> edges;
  for (const auto& e : list.entries)
    if (!e.prob || *e.prob > 0.0) edges.emplace_back(e.from, e.to);
  return DirectedGraph(list.num_vertices, edges);
}

inline StochasticFeedbackGraph to_stochastic_graph(const EdgeList& list) {
  StochasticFeedbackGraph gs(list.num_vertices);
  std::vector<bool> seen(list.num_vertices * list.num_vertices, false);
  for (const auto& e : list.entries) {
    if (!e.prob) throw ArgumentError("stochastic edge list needs a probability on every line");
    auto idx = e.from * list.num_vertices + e.to;
    if (seen[idx]) throw ArgumentError("duplicate edge in edge list");
    seen[idx] = true;
    gs.set(e.from, e.to, *e.prob);
  }
  return gs;
}

inline nlohmann::json to_json(const StochasticFeedbackGraph& gs) {
  const std::size_t k = gs.num_vertices();
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> r(k);
    for (std::size_t j = 0; j < k; ++j) r[j] = gs(i, j);
    rows.push_back(r);
  }
  return {{"K", k}, {"p", rows}};
}

inline StochasticFeedbackGraph stochastic_graph_from_json(const nlohmann::json& j) {
  if (!j.contains("K") || !j.contains("p")) throw ArgumentError("dense graph JSON needs 'K' and 'p'");
  const auto k = j.at("K").get<std::size_t>();
  const auto rows = j.at("p").get<std::vector<std::vector<double>>>();
  if (rows.size() != k) throw ArgumentError("dense graph JSON: 'p' must have K rows");
  return StochasticFeedbackGraph::from_rows(rows);
}

inline std::string to_edge_list(const StochasticFeedbackGraph& gs) {
  std::ostringstream out;
  out.precision(17);
  const std::size_t k = gs.num_vertices();
  out << k << "\n";
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (gs(i, j) > 0.0) out << i << " " << j << " " << gs(i, j) << "\n";
  return out.str();
}

inline std::string to_edge_list(const DirectedGraph& g) {
  std::ostringstream out;
  out << g.num_vertices() << "\n";
  for (const auto& [i, j] : g.edges()) out << i << " " << j << "\n";
  return out.str();
}

namespace detail {

inline bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

}  // namespace detail

// Accepts either the edge-list format (probability column required) or the
// dense JSON form {"K": n, "p": [[...]]}.
inline StochasticFeedbackGraph parse_stochastic_graph(const std::string& text) {
  if (detail::looks_like_json(text)) return stochastic_graph_from_json(nlohmann::json::parse(text));
  return to_stochastic_graph(parse_edge_list(text));
}

// Deterministic graph: probabilities, when present, only decide membership.
inline DirectedGraph parse_graph(const std::string& text) {
  if (detail::looks_like_json(text)) return support(stochastic_graph_from_json(nlohmann::json::parse(text)));
  return to_directed_graph(parse_edge_list(text));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline StochasticFeedbackGraph load_stochastic_graph(const std::string& path) {
  return parse_stochastic_graph(read_file(path));
}

inline DirectedGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

}  // namespace sfg
