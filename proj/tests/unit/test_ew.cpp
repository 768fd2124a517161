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
#include <numeric>

#include "properties.hpp"
#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/ew.hpp"

namespace sfg {
namespace {

DirectedGraph revealing(std::size_t k) {
  DirectedGraph g(k);
  for (std::size_t j = 0; j < k; ++j) g.add_edge(0, j);
  return g;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(EwDistribution, Examples) {
  const std::vector<double> eq{3, 3, 3, 3};
  for (double q : ew_distribution(eq, 0.7)) EXPECT_DOUBLE_EQ(q, 0.25);
  const std::vector<double> far{0, 1e6};
  EXPECT_NEAR(ew_distribution(far, 1.0)[0], 1.0, 1e-9);
  const std::vector<double> two{0, std::log(2.0)};
  const auto q = ew_distribution(two, 1.0);
  EXPECT_NEAR(q[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 1.0 / 3.0, 1e-15);
}

TEST(EwDistribution, Errors) {
  const std::vector<double> bad{0, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(ew_distribution(bad, 1.0), StateError);
  const std::vector<double> ok{0, 1};
  EXPECT_THROW(ew_distribution(ok, 0.0), ArgumentError);
}

TEST(EwDistribution, ShiftInvariantAndNormalized) {
  Rng rng = make_stream(51, Stream::kLearner);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> c(1 + uniform_index(rng, 8));
    for (auto& x : c) x = 100.0 * uniform01(rng);
    const double eta = 0.01 + 3.0 * uniform01(rng);
    const auto q = ew_distribution(c, eta);
    ASSERT_NEAR(sum(q), 1.0, 1e-12);
    auto shifted = c;
    for (auto& x : shifted) x += 17.5;
    const auto q2 = ew_distribution(shifted, eta);
    for (std::size_t i = 0; i < q.size(); ++i) ASSERT_NEAR(q[i], q2[i], 1e-12);
  }
}

TEST(EwState, JsonRoundTrip) {
  EwState s{{0.5, 1.25}, 0.3, 7};
  const auto back = ew_state_from_json(to_json(s));
  EXPECT_EQ(back.cumulative, s.cumulative);
  EXPECT_EQ(back.eta, s.eta);
  EXPECT_EQ(back.round, 7u);
}

TEST(RegretBoundCheck, ZeroLosses) {
  EwTrace tr;
  for (int t = 0; t < 10; ++t) {
    tr.q.push_back({0.5, 0.5});
    tr.losses.push_back({0.0, 0.0});
    tr.eta.push_back(0.5);
    tr.second_order.push_back({true, false});
  }
  tr.eta_final = 0.5;
  const auto r = regret_bound_check(tr);
  EXPECT_DOUBLE_EQ(r.lhs, 0.0);
  EXPECT_GE(r.residual, 0.0);
  EXPECT_DOUBLE_EQ(r.residual, r.rhs);
}

TEST(RegretBoundCheck, SingleAction) {
  EwTrace tr;
  for (int t = 0; t < 5; ++t) {
    tr.q.push_back({1.0});
    tr.losses.push_back({0.7});
    tr.eta.push_back(1.0);
    tr.second_order.push_back({false});
  }
  tr.eta_final = 1.0;
  EXPECT_NEAR(regret_bound_check(tr).lhs, 0.0, 1e-12);
}

TEST(RegretBoundCheck, RandomTracesNonnegative) {
  Rng rng = make_stream(52, Stream::kLearner);
  for (int rep = 0; rep < 300; ++rep) {
    const auto tr = props::random_ew_trace(rng, 3, 50);
    const auto r = regret_bound_check(tr);
    ASSERT_TRUE(r.precondition);
    ASSERT_GE(r.residual, -1e-9) << "rep " << rep;
  }
}

TEST(PolicyConfig, WeakRevealing) {
  const auto c = make_policy_config(revealing(5), Regime::kWeak, 1000);
  EXPECT_EQ(c.dominating_set, std::vector<std::size_t>{0});
  EXPECT_DOUBLE_EQ(c.sigma_count, 1.0);
  EXPECT_NEAR(c.gamma, 0.26271802860729043, 1e-12);
  EXPECT_NEAR(c.eta, 0.012939391807735604, 1e-12);
}

TEST(PolicyConfig, RegimeMismatch) {
  EXPECT_THROW(make_policy_config(revealing(3), Regime::kStrong, 10), ConfigError);
  EXPECT_THROW(make_policy_config(DirectedGraph(3), Regime::kWeak, 10), ConfigError);
}

TEST(Exp3G, FullInformationEstimateIsLoss) {
  Exp3G p(DirectedGraph::complete(3), Regime::kStrong, 100);
  const std::vector<double> row{0.2, 0.5, 0.9};
  const auto ev = make_feedback(DirectedGraph::complete(3), 0, 1, row, FeedbackMode::kLocal);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p.observe_prob(i), 1.0, 1e-12);
  const auto s = exp3g_step(p, ev);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.loss_estimate[i], row[i], 1e-12);
  EXPECT_NEAR(sum(s.next_distribution), 1.0, 1e-12);
}

TEST(Exp3G, BanditImportanceWeighting) {
  const auto g = DirectedGraph::self_loops(3);
  Exp3G p(g, Regime::kStrong, 100);
  const auto pi = p.distribution();
  const std::vector<double> row{0.2, 0.5, 0.9};
  const auto s = exp3g_step(p, make_feedback(g, 0, 2, row, FeedbackMode::kLocal));
  EXPECT_NEAR(s.loss_estimate[2], 0.9 / pi[2], 1e-12);
  EXPECT_DOUBLE_EQ(s.loss_estimate[0], 0.0);
}

TEST(Exp3G, RevealingUsesCenterProbability) {
  const auto g = revealing(4);
  Exp3G p(g, Regime::kWeak, 200);
  const auto pi = p.distribution();
  EXPECT_GE(pi[0], p.gamma());
  const std::vector<double> row{0.1, 0.4, 0.6, 0.8};
  const auto s = exp3g_step(p, make_feedback(g, 0, 0, row, FeedbackMode::kLocal));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(s.loss_estimate[i], row[i] / pi[0], 1e-12);
}

TEST(Exp3G, RejectsForeignObservation) {
  Exp3G p(DirectedGraph::self_loops(3), Regime::kStrong, 10);
  const std::vector<Observation> obs{{1, 0.5}};
  EXPECT_THROW(p.update(0, obs), ProtocolError);
}

TEST(Exp3G, MissingObservationsCountAsZero) {
  Exp3G p(DirectedGraph::complete(2), Regime::kStrong, 10);
  const std::vector<Observation> obs{{0, 0.5}};
  const auto est = p.update(0, obs);
  EXPECT_DOUBLE_EQ(est[1], 0.0);
  EXPECT_EQ(p.missing_observations(), 1u);
}

TEST(Exp3G, DistributionInvariantsOverRun) {
  Rng rng = make_stream(53, Stream::kLearner);
  Rng loss = make_stream(53, Stream::kLoss);
  for (Regime r : {Regime::kStrong, Regime::kWeak}) {
    const auto g = r == Regime::kStrong ? DirectedGraph::self_loops(4) : revealing(4);
    Exp3G p(g, r, 500);
    for (int t = 0; t < 500; ++t) {
      const auto& pi = p.distribution();
      ASSERT_NEAR(sum(pi), 1.0, 1e-12);
      for (std::size_t i = 0; i < 4; ++i) ASSERT_GE(pi[i], p.gamma() * p.exploration()[i] - 1e-15);
      std::vector<double> row(4);
      for (auto& x : row) x = uniform01(loss);
      const std::size_t a = p.draw(rng);
      p.update(a, make_feedback(g, t, a, row, FeedbackMode::kLocal).observations);
    }
    EXPECT_EQ(p.zero_probability_events(), 0u);
  }
}

TEST(Exp3G, ConditionallyUnbiased) {
  const auto g = DirectedGraph(3, {{0, 0}, {0, 1}, {1, 1}, {2, 2}, {2, 0}});
  Exp3G base(g, Regime::kStrong, 100);
  Rng rng = make_stream(54, Stream::kLearner);
  const std::vector<double> row{0.2, 0.5, 0.9};
  const int n = 60000;
  std::vector<double> mean(3, 0.0);
  for (int s = 0; s < n; ++s) {
    Exp3G p = base;
    const std::size_t a = p.draw(rng);
    const auto est = p.update(a, make_feedback(g, 0, a, row, FeedbackMode::kLocal).observations);
    for (std::size_t i = 0; i < 3; ++i) mean[i] += est[i] / n;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double p_obs = base.observe_prob(i);
    const double se = row[i] * std::sqrt((1.0 / p_obs - 1.0) / n);
    EXPECT_NEAR(mean[i], row[i], 4.0 * se + 1e-12) << i;
  }
}

TEST(Exp3G, RecordedTraceSatisfiesBound) {
  const auto g = DirectedGraph(3, {{0, 0}, {0, 1}, {1, 1}, {2, 2}, {2, 0}, {1, 2}});
  Exp3G p(g, Regime::kStrong, 300);
  p.enable_recording();
  Rng rng = make_stream(55, Stream::kLearner);
  Rng loss = make_stream(55, Stream::kLoss);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> row(3);
    for (auto& x : row) x = uniform01(loss);
    const std::size_t a = p.draw(rng);
    p.update(a, make_feedback(g, t, a, row, FeedbackMode::kLocal).observations);
  }
  const auto r = regret_bound_check(p.recorded());
  EXPECT_GE(r.residual, 0.0);
}

}  // namespace
}  // namespace sfg
