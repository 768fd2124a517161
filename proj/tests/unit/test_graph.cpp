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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/rng.hpp"

namespace sfg {
namespace {

using Set = std::vector<std::size_t>;

TEST(Neighborhoods, LoopAndOneEdge) {
  DirectedGraph g(2, {{0, 0}, {0, 1}});
  auto n = neighborhoods(g, 1);
  EXPECT_EQ(n.in, Set{0});
  EXPECT_TRUE(n.out.empty());
}

TEST(Neighborhoods, SingleSelfLoop) {
  DirectedGraph g(1, {{0, 0}});
  auto n = neighborhoods(g, 0);
  EXPECT_EQ(n.in, Set{0});
  EXPECT_EQ(n.out, Set{0});
}

TEST(Neighborhoods, ThreeCycle) {
  DirectedGraph g(3, {{0, 1}, {1, 2}, {2, 0}});
  auto n = neighborhoods(g, 1);
  EXPECT_EQ(n.in, Set{0});
  EXPECT_EQ(n.out, Set{2});
}

TEST(Neighborhoods, OutOfRange) {
  DirectedGraph g(2);
  EXPECT_THROW(neighborhoods(g, 2), ArgumentError);
}

TEST(Graph, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(DirectedGraph(2, {{0, 1}, {0, 1}}), ArgumentError);
  EXPECT_THROW(DirectedGraph(0), ArgumentError);
  EXPECT_THROW(DirectedGraph(2, {{0, 2}}), ArgumentError);
}

TEST(Classify, BanditIsStrong) {
  EXPECT_EQ(classify(DirectedGraph::self_loops(5)).graph_class, ObservabilityClass::kStronglyObservable);
}

TEST(Classify, RevealingIsWeak) {
  DirectedGraph g(5);
  for (std::size_t j = 0; j < 5; ++j) g.add_edge(0, j);
  const auto obs = classify(g);
  EXPECT_EQ(obs.graph_class, ObservabilityClass::kWeaklyObservable);
  EXPECT_TRUE(obs.strongly_observable[0]);
  EXPECT_EQ(obs.weakly_observable_vertices(), (Set{1, 2, 3, 4}));
}

TEST(Classify, EmptyIsNonObservable) {
  EXPECT_EQ(classify(DirectedGraph(2)).graph_class, ObservabilityClass::kNonObservable);
}

TEST(Classify, LooplessCompleteIsStrong) {
  // Every vertex sees all others, none sees itself.
  EXPECT_TRUE(classify(DirectedGraph::complete(4, false)).is_strongly_observable());
}

TEST(ClassifyProperty, AgreesWithBruteForce) {
  Rng rng = make_stream(11, Stream::kInstance);
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t k = 1 + uniform_index(rng, 7);
    const auto g = oracle::random_graph(rng, k, uniform01(rng), uniform01(rng));
    const auto obs = classify(g);
    const auto want = oracle::classify(g);
    const auto got = obs.graph_class == ObservabilityClass::kStronglyObservable ? oracle::Cls::kStrong
                     : obs.graph_class == ObservabilityClass::kWeaklyObservable ? oracle::Cls::kWeak
                                                                                 : oracle::Cls::kNone;
    ASSERT_EQ(got, want) << "rep " << rep;
    for (std::size_t i = 0; i < k; ++i) {
      ASSERT_EQ(obs.observable[i], oracle::observable_vertex(g, i));
      if (obs.observable[i]) ASSERT_EQ(obs.strongly_observable[i], oracle::strongly_observable_vertex(g, i));
    }
  }
}

TEST(GraphProperty, NeighborhoodsMatchEdges) {
  Rng rng = make_stream(12, Stream::kInstance);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 1 + uniform_index(rng, 8);
    const auto g = oracle::random_graph(rng, k, 0.4, 0.5);
    std::size_t total_in = 0, total_out = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto n = neighborhoods(g, i);
      for (auto j : n.in) ASSERT_TRUE(g.has_edge(j, i));
      for (auto j : n.out) ASSERT_TRUE(g.has_edge(i, j));
      total_in += n.in.size();
      total_out += n.out.size();
    }
    ASSERT_EQ(total_in, g.num_edges());
    ASSERT_EQ(total_out, g.num_edges());
  }
}

}  // namespace
}  // namespace sfg
