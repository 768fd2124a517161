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
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sfg/sfg.hpp"

namespace sfg {
namespace {

const std::filesystem::path kData = SFG_DATA_DIR;

ExperimentConfig small_config(Algorithm alg, std::size_t horizon = 2000) {
  ExperimentConfig c;
  StochasticFeedbackGraph g(3);
  for (std::size_t i = 0; i < 3; ++i) g.set(i, i, 0.6);
  g.set(0, 1, 0.5);
  c.graph = g;
  c.losses = LossModel{LossModel::Kind::kBernoulli, {0.3, 0.5, 0.6}};
  c.algorithm = alg;
  c.mode = alg == Algorithm::kOtcg ? FeedbackMode::kFullGraph : FeedbackMode::kLocal;
  c.horizon = horizon;
  c.seeds = {1, 2, 3};
  return c;
}

TEST(RegretTrace, Accounting) {
  RegretTrace tr;
  tr.num_actions = 2;
  tr.table = std::make_shared<const LossTable>(3, 2, std::vector<double>{1, 0, 0, 1, 1, 0});
  tr.actions = {0, 0, 1};
  tr.losses = {1, 0, 0};
  tr.phases = {Phase::kPlay, Phase::kPlay, Phase::kPlay};
  EXPECT_EQ(tr.cumulative_learner(), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(tr.cumulative_actions(3), (std::vector<double>{2, 1}));
  EXPECT_DOUBLE_EQ(tr.regret_at(1), 1.0);
  EXPECT_DOUBLE_EQ(tr.regret_at(2), 0.0);
  EXPECT_DOUBLE_EQ(tr.final_regret(), 0.0);
  const auto curve = tr.regret_curve();
  for (std::size_t t = 1; t <= 3; ++t) EXPECT_DOUBLE_EQ(curve[t - 1], tr.regret_at(t));
}

TEST(LossModels, ConstantAndAlternating) {
  Rng rng = make_stream(1, Stream::kLoss);
  const auto c = make_losses(LossModel{LossModel::Kind::kConstant, {0.2, 0.7}}, 5, 2, rng);
  EXPECT_DOUBLE_EQ(c(4, 1), 0.7);
  const auto a = make_losses(LossModel{LossModel::Kind::kAlternating, {}}, 6, 3, rng);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(a(t, k), t % 3 == k ? 1.0 : 0.0);
  EXPECT_THROW(make_losses(LossModel{LossModel::Kind::kBernoulli, {0.5}}, 5, 2, rng), ConfigError);
}

TEST(Run, EveryAlgorithmConsumesHorizon) {
  for (Algorithm a : {Algorithm::kEdgeCatcher, Algorithm::kOtcg, Algorithm::kExp3gStrong,
                      Algorithm::kUniformBaseline}) {
    const auto traces = run(small_config(a, 600));
    ASSERT_EQ(traces.size(), 3u);
    for (const auto& tr : traces) {
      EXPECT_EQ(tr.horizon(), 600u) << to_string(a);
      const auto cum = tr.cumulative_learner();
      for (std::size_t t = 1; t < cum.size(); ++t) ASSERT_GE(cum[t], cum[t - 1]);
    }
  }
}

TEST(Run, WeakExp3OnRevealingGraph) {
  auto c = small_config(Algorithm::kExp3gWeak, 500);
  StochasticFeedbackGraph g(3);
  for (std::size_t j = 0; j < 3; ++j) g.set(0, j, 1.0);
  c.graph = g;
  const auto tr = run_one(c, 4);
  EXPECT_EQ(tr.sidecar.at("dominating_set"), nlohmann::json::array({0}));
}

TEST(Run, DeterministicAcrossThreadCounts) {
  auto c = small_config(Algorithm::kOtcg, 800);
  c.seeds = {5, 6, 7, 8};
  const auto a = run(c);
  c.threads = 3;
  const auto b = run(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].actions, b[i].actions);
    EXPECT_EQ(trace_csv(a[i]), trace_csv(b[i]));
  }
  EXPECT_NE(a[0].actions, a[1].actions);
}

TEST(Run, SingleActionHasZeroRegret) {
  ExperimentConfig c;
  c.graph = StochasticFeedbackGraph::from_rows({{1.0}});
  c.losses = LossModel{LossModel::Kind::kBernoulli, {0.5}};
  c.horizon = 100;
  c.seeds = {1};
  EXPECT_DOUBLE_EQ(run(c)[0].final_regret(), 0.0);
}

TEST(Validate, Errors) {
  ExperimentConfig c;
  EXPECT_THROW(validate(c), ConfigError);  // no instance
  auto o = small_config(Algorithm::kOtcg);
  o.mode = FeedbackMode::kLocal;
  EXPECT_THROW(validate(o), ConfigError);
  auto s = small_config(Algorithm::kEdgeCatcher);
  s.seeds.clear();
  EXPECT_THROW(validate(s), ConfigError);
  s = small_config(Algorithm::kEdgeCatcher);
  s.hard = HardInstanceConfig{};
  EXPECT_THROW(validate(s), ConfigError);
}

TEST(Config, ParsesShippedConfigs) {
  for (const auto& entry : std::filesystem::directory_iterator(kData / "configs")) {
    const auto j = nlohmann::json::parse(read_file(entry.path().string()));
    const auto c = parse_experiment_config(j, entry.path().parent_path());
    EXPECT_NO_THROW(validate(c)) << entry.path();
  }
}

TEST(Config, KeysAndErrors) {
  const auto base = nlohmann::json::parse(R"({
    "algorithm": "otcg", "mode": "full_graph", "T": 50, "num_seeds": 3, "first_seed": 10,
    "graph": {"K": 2, "p": [[1, 0], [0, 0.5]]},
    "losses": {"kind": "constant", "values": [0.1, 0.9]},
    "otcg": {"gamma_log": "confidence", "lambda_check": "pow2", "lambda_constant": 2.5}
  })");
  const auto c = parse_experiment_config(base);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
  EXPECT_FALSE(c.otcg.gamma_log_kt);
  EXPECT_TRUE(c.otcg.lambda_pow2);
  EXPECT_DOUBLE_EQ(c.otcg.lambda_constant, 2.5);
  EXPECT_EQ(c.losses.kind, LossModel::Kind::kConstant);

  auto bad = base;
  bad["colour"] = 1;
  EXPECT_THROW(parse_experiment_config(bad), ConfigError);
  bad = base;
  bad["otcg"]["gamma_log"] = "e";
  EXPECT_THROW(parse_experiment_config(bad), ConfigError);
  bad = base;
  bad["algorithm"] = "hedge";
  EXPECT_THROW(parse_experiment_config(bad), ConfigError);
  bad = base;
  bad["phi_check"] = "sometimes";
  EXPECT_THROW(parse_experiment_config(bad), ConfigError);
  bad = base;
  bad["graph"]["p"][0][0] = 2.0;
  EXPECT_THROW(parse_experiment_config(bad), ConfigError);
  EXPECT_THROW(parse_experiment_config(nlohmann::json::array()), ConfigError);
}

TEST(InstanceDump, RoundTripReplays) {
  ExperimentConfig c;
  c.hard = HardInstanceConfig{HardInstanceKind::kWeakC4, 0.3, 3, std::nullopt};
  c.horizon = 300;
  c.algorithm = Algorithm::kOtcg;
  c.mode = FeedbackMode::kFullGraph;
  c.seeds = {9};
  const auto original = run_one(c, 9);

  const auto dump = dump_instance(prepare_instance(c, 9), 9, true);
  EXPECT_EQ(dump.at("format"), kInstanceFormat);
  EXPECT_TRUE(dump.contains("hard_instance"));
  ExperimentConfig r;
  const auto inst = load_instance(dump);
  r.graph = inst.graph;
  r.fixed_losses = inst.losses;
  r.horizon = 300;
  r.algorithm = Algorithm::kOtcg;
  r.mode = FeedbackMode::kFullGraph;
  r.seeds = {9};
  const auto replay = run_one(r, 9);
  EXPECT_EQ(original.actions, replay.actions);
  EXPECT_EQ(original.losses, replay.losses);

  auto no_table = dump_instance(prepare_instance(c, 9), 9, false);
  EXPECT_THROW(load_instance(no_table), ConfigError);
  auto tampered = dump;
  tampered["losses"][0][0] = 1.0 - tampered["losses"][0][0].get<double>();
  EXPECT_THROW(load_instance(tampered), ConfigError);
}

TEST(TraceCsv, HeaderAndColumns) {
  const auto tr = run_one(small_config(Algorithm::kOtcg, 50), 1);
  std::istringstream in(trace_csv(tr));
  std::string first, header, row;
  std::getline(in, first);
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(first.rfind(std::string("# ") + kTraceFormat, 0), 0u);
  EXPECT_EQ(header, "t,action,loss,cum_loss,phase,psi,lambda,theta,gamma,eta,eps_theta");
  EXPECT_EQ(row.rfind("1,", 0), 0u);
  EXPECT_TRUE(tr.sidecar.contains("t_star"));
}

TEST(JsonNumber, NonFinite) {
  EXPECT_EQ(json_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(json_number(std::nan("")).is_null());
  EXPECT_EQ(format_double(std::nan("")), "");
  EXPECT_EQ(format_double(0.5), "0.5");
}

std::vector<HorizonSample> synthetic(double exponent, double noise, std::uint64_t seed) {
  Rng rng = make_stream(seed, Stream::kBootstrap);
  std::vector<HorizonSample> out;
  for (std::size_t h : {1000u, 4000u, 16000u, 64000u}) {
    HorizonSample s{h, {}};
    for (int i = 0; i < 20; ++i)
      s.regrets.push_back(3.0 * std::pow(static_cast<double>(h), exponent) * (1.0 + noise * (uniform01(rng) - 0.5)));
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Slope, RecoversExponents) {
  const auto half = fit_slope(synthetic(0.5, 0.0, 1), 200);
  EXPECT_NEAR(half.slope, 0.5, 1e-12);
  EXPECT_NEAR(fit_slope(synthetic(1.0, 0.0, 1), 200).slope, 1.0, 1e-12);
  const auto two_thirds = fit_slope(synthetic(2.0 / 3.0, 0.2, 2), 500);
  EXPECT_NEAR(two_thirds.slope, 2.0 / 3.0, 0.02);
  EXPECT_LE(two_thirds.ci_low, two_thirds.slope);
  EXPECT_GE(two_thirds.ci_high, two_thirds.slope);
  EXPECT_FALSE(two_thirds.degenerate);
}

TEST(Slope, DegenerateAndErrors) {
  auto s = synthetic(0.5, 0.0, 1);
  std::fill(s[1].regrets.begin(), s[1].regrets.end(), 0.0);
  const auto f = fit_slope(s, 100);
  EXPECT_TRUE(f.degenerate);
  EXPECT_TRUE(std::isnan(f.slope));
  auto two = synthetic(0.5, 0.0, 1);
  two.pop_back();
  two.pop_back();
  EXPECT_THROW(fit_slope(two, 100), ArgumentError);
  auto few = synthetic(0.5, 0.0, 1);
  few[0].regrets.resize(5);
  EXPECT_THROW(fit_slope(few, 100), ArgumentError);
}

}  // namespace
}  // namespace sfg
