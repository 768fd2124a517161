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

#include <cmath>

#include "sfg/errors.hpp"
#include "sfg/hard_instances.hpp"

namespace sfg {
namespace {

double band(double mean, std::size_t n) { return 4.0 * std::sqrt(std::max(mean * (1 - mean), 1e-12) / n); }

void check_columns(const HardInstance& inst) {
  const std::size_t n = inst.losses->horizon();
  for (std::size_t k = 0; k < inst.losses->num_actions(); ++k) {
    const double m = inst.spec.arm_means[k];
    EXPECT_NEAR(inst.losses->column_mean(k), m, band(m, n)) << "arm " << k;
  }
  EXPECT_GE(inst.spec.beta, 0.0);
  EXPECT_LE(inst.spec.beta, 0.25);
}

TEST(Beta, ClosedForms) {
  EXPECT_NEAR(beta_c1(2, 0.1, 1e5), 0.0005649755593161786, 1e-15);
  EXPECT_NEAR(beta_c2(0.1, 1e5), 0.0017677669529663688, 1e-15);
  EXPECT_NEAR(beta_c3(4, 0.1, 1e5, 16), 0.01651992939627922, 1e-14);
  EXPECT_NEAR(beta_c4(0.1, 1e5), 0.016410494698636768, 1e-14);
}

TEST(C1, Construction) {
  const DirectedGraph g(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}});  // alpha = 2
  const auto inst = gen_hard_strong_c1(g, 0.1, 20000, 7);
  EXPECT_EQ(inst.spec.good_set.size(), 2u);
  EXPECT_NEAR(inst.spec.beta, beta_c1(2, 0.1, 20000), 1e-15);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(inst.graph(i, i), 0.1);
    const bool good = std::count(inst.spec.good_set.begin(), inst.spec.good_set.end(), i) > 0;
    if (!good) {
      for (std::size_t t = 0; t < 20000; ++t) ASSERT_EQ((*inst.losses)(t, i), 1.0);
    }
  }
  EXPECT_DOUBLE_EQ(inst.spec.arm_means[static_cast<std::size_t>(inst.spec.z)], 0.5 - inst.spec.beta);
  check_columns(inst);
  EXPECT_THROW(gen_hard_strong_c1(DirectedGraph::complete(3), 0.1, 100, 1), ArgumentError);
  EXPECT_THROW(gen_hard_strong_c1(g, 0.0, 100, 1), ArgumentError);
}

TEST(C2, Construction) {
  const auto inst = gen_hard_strong_c2(0.1, 100000, 3, 11);
  EXPECT_NEAR(inst.spec.beta, 0.0017677669529663688, 1e-15);
  EXPECT_TRUE(inst.spec.z == 1 || inst.spec.z == -1);
  EXPECT_DOUBLE_EQ(inst.spec.arm_means[0], 0.5 - inst.spec.beta * static_cast<double>(inst.spec.z));
  EXPECT_DOUBLE_EQ(inst.graph(1, 2), 0.1);
  check_columns(inst);
  EXPECT_THROW(gen_hard_strong_c2(0.1, 100, 1, 1), ArgumentError);
  EXPECT_THROW(gen_hard_strong_c2(1.5, 100, 2, 1), ArgumentError);
}

TEST(C2, BothSignsAppearAcrossSeeds) {
  int plus = 0;
  for (std::uint64_t s = 1; s <= 40; ++s) plus += gen_hard_strong_c2(0.5, 10, 2, s).spec.z > 0 ? 1 : 0;
  EXPECT_GT(plus, 5);
  EXPECT_LT(plus, 35);
}

TEST(C3, Construction) {
  // Four revealing stars without loops on the centers' leaves.
  DirectedGraph g(16);
  for (std::size_t c = 0; c < 16; c += 4) {
    g.add_edge(c, c);
    for (std::size_t j = c + 1; j < c + 4; ++j) g.add_edge(c, j);
  }
  const auto inst = gen_hard_weak_c3(g, 0.1, 20000, 5);
  const auto& u = inst.spec.good_set;
  EXPECT_EQ(inst.spec.m, u.size());
  for (auto a : u) {
    EXPECT_TRUE(classify(g).weakly_observable(a));
    for (auto b : u) EXPECT_TRUE(a == b || (!g.has_edge(a, b) && !g.has_edge(b, a)));
  }
  EXPECT_NEAR(inst.spec.beta, std::min(0.25, beta_c3(static_cast<double>(u.size()), 0.1, 20000, 16)), 1e-15);
  for (std::size_t i = 0; i < 16; ++i)
    if (std::count(u.begin(), u.end(), i) == 0) EXPECT_DOUBLE_EQ(inst.spec.arm_means[i], 1.0);
  check_columns(inst);
  EXPECT_FALSE(inst.spec.warnings.empty());  // delta is far below 100 ln K
  EXPECT_THROW(gen_hard_weak_c3(DirectedGraph::self_loops(4), 0.1, 100, 1), DomainError);
}

TEST(C4, Construction) {
  const auto inst = gen_hard_weak_c4(0.1, 100000, 3);
  EXPECT_NEAR(inst.spec.beta, 0.016410494698636768, 1e-14);
  EXPECT_EQ(classify(inst.spec.base_graph).graph_class, ObservabilityClass::kWeaklyObservable);
  EXPECT_FALSE(inst.spec.base_graph.has_edge(0, 0));
  EXPECT_FALSE(inst.spec.base_graph.has_edge(1, 0));
  for (std::size_t t = 0; t < 100000; ++t) ASSERT_EQ((*inst.losses)(t, 2), 1.0);
  check_columns(inst);
}

TEST(HardInstances, BetaClampedForTinyHorizon) {
  const auto inst = gen_hard_weak_c4(0.01, 1, 1);
  EXPECT_TRUE(inst.spec.beta_clamped);
  EXPECT_DOUBLE_EQ(inst.spec.beta, 0.25);
  EXPECT_FALSE(inst.spec.warnings.empty());
}

TEST(HardInstances, Reproducible) {
  const auto a = gen_hard_strong_c2(0.2, 5000, 4, 99), b = gen_hard_strong_c2(0.2, 5000, 4, 99);
  EXPECT_EQ(a.losses->digest(), b.losses->digest());
  EXPECT_EQ(a.spec.z, b.spec.z);
  EXPECT_NE(a.losses->digest(), gen_hard_strong_c2(0.2, 5000, 4, 100).losses->digest());
}

}  // namespace
}  // namespace sfg
