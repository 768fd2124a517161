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
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/ew.hpp"
#include "sfg/graph.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

struct PhiConstants {
  double c_strong = 12.0 + 2.0 * std::numbers::sqrt2;
  double c_weak = 8.0;
};

struct PhiValue {
  double value = std::numeric_limits<double>::infinity();
  double strong_branch = std::numeric_limits<double>::infinity();
  double weak_branch = std::numeric_limits<double>::infinity();
  std::optional<ThresholdChoice> strong;
  std::optional<ThresholdChoice> weak;
};

// Stopping function: the better of the two regret-bound branches evaluated on
// an estimated graph, +inf for an unavailable branch.
inline PhiValue phi(const StochasticFeedbackGraph& estimate, std::size_t horizon, const PhiConstants& c = {},
                    ParamCache* cache = nullptr) {
  const std::size_t k = estimate.num_vertices();
  if (horizon < 2 || k < 2) throw ConfigError("stopping function needs K >= 2 and T >= 2");
  const double td = static_cast<double>(horizon);
  const double lkt = std::log(static_cast<double>(k) * td);
  PhiValue v;
  v.strong = optimal_threshold_strong(estimate, cache);
  v.weak = optimal_threshold_weak(estimate, cache);
  if (v.strong) v.strong_branch = 4.0 * c.c_strong * std::sqrt(v.strong->ratio * td) * std::pow(lkt, 1.5);
  if (v.weak) v.weak_branch = 4.0 * c.c_weak * std::cbrt(v.weak->ratio * lkt * lkt) * std::pow(td, 2.0 / 3.0);
  v.value = std::min(v.strong_branch, v.weak_branch);
  return v;
}

enum class StopReason { kPhiTriggered, kBudgetExhausted };

inline const char* to_string(StopReason r) {
  return r == StopReason::kPhiTriggered ? "phi_triggered" : "budget_exhausted";
}

enum class PhiSchedule { kEverySweep, kPowersOfTwo };

using StoppingFunction = std::function<double(const StochasticFeedbackGraph&, std::size_t)>;

struct RoundRobinOptions {
  PhiSchedule schedule = PhiSchedule::kEverySweep;
  PhiConstants constants;
  // Replaces the default stopping function when set.
  StoppingFunction stopping;
  // Called after every sweep with the current estimate and stopping value
  // (+inf when the schedule skipped the evaluation).
  std::function<void(const GraphEstimate&, double)> on_sweep;
};

struct RoundRobinOutput {
  GraphEstimate estimate{1};
  double eps_hat = 0.0;
  std::size_t tau_hat = 0;
  std::size_t rounds_consumed = 0;
  StopReason stop_reason = StopReason::kBudgetExhausted;
  double phi_at_stop = std::numeric_limits<double>::infinity();
};

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

// Plays 0..K-1 repeatedly, counting realized out-edges, until the stopping
// value of the thresholded estimate drops to the number of rounds used.
inline RoundRobinOutput round_robin(Environment& env, std::size_t horizon, const RoundRobinOptions& opts = {}) {
  const std::size_t k = env.num_actions();
  if (k > horizon) throw ArgumentError("round robin needs T >= K");
  if (env.remaining() < (horizon / k) * k) throw StateError("environment has fewer rounds left than requested");
  const double lkt = std::log(static_cast<double>(k) * static_cast<double>(horizon));
  ParamCache cache;
  StoppingFunction stop = opts.stopping;
  if (!stop) {
    stop = [&cache, &opts](const StochasticFeedbackGraph& g, std::size_t h) {
      return phi(g, h, opts.constants, &cache).value;
    };
  }
  RoundRobinOutput out;
  out.estimate = GraphEstimate(k);
  const std::size_t sweeps = horizon / k;
  for (std::size_t tau = 1; tau <= sweeps; ++tau) {
    for (std::size_t i = 0; i < k; ++i) {
      const FeedbackEvent& ev = env.play(i, Phase::kEstimation);
      for (const auto& o : ev.observations) out.estimate.record(i, o.action);
    }
    const double eps_tau = 60.0 * lkt / static_cast<double>(tau);
    out.estimate.finish_sweep(eps_tau);
    out.tau_hat = tau;
    out.eps_hat = eps_tau;
    double value = std::numeric_limits<double>::infinity();
    const bool check = opts.schedule == PhiSchedule::kEverySweep || is_power_of_two(tau);
    if (check) value = stop(out.estimate.thresholded(), horizon);
    if (opts.on_sweep) opts.on_sweep(out.estimate, value);
    if (check && value <= static_cast<double>(tau * k)) {
      out.stop_reason = StopReason::kPhiTriggered;
      out.phi_at_stop = value;
      break;
    }
  }
  out.rounds_consumed = out.tau_hat * k;
  return out;
}

struct BlockPlan {
  std::size_t block_length = 0;  // Δ
  std::size_t num_blocks = 0;    // N
  std::size_t horizon = 0;
  double eps = 0.0;

  std::size_t block_begin(std::size_t tau) const { return tau * block_length; }
  std::size_t block_end(std::size_t tau) const { return (tau + 1) * block_length; }
  std::size_t leftover() const { return horizon - block_length * num_blocks; }
};

inline BlockPlan make_block_plan(std::size_t horizon, double eps, std::size_t k) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("block reduction needs eps in (0,1]");
  if (horizon == 0) throw ArgumentError("block reduction needs a positive horizon");
  BlockPlan p;
  p.horizon = horizon;
  p.eps = eps;
  const double lkt = std::log(static_cast<double>(k) * static_cast<double>(horizon));
  p.block_length = static_cast<std::size_t>(std::max(1.0, std::ceil((2.0 / eps) * lkt)));
  p.num_blocks = horizon / p.block_length;
  return p;
}

// Per-block sums of observed losses and observation counts for every a'.
class BlockAccumulator {
 public:
  explicit BlockAccumulator(std::size_t k) : sum_(k, 0.0), count_(k, 0) {}

  void reset() {
    std::fill(sum_.begin(), sum_.end(), 0.0);
    std::fill(count_.begin(), count_.end(), 0);
    action_.reset();
    rounds_ = 0;
  }

  void add(const FeedbackEvent& ev) {
    if (action_ && *action_ != ev.action) throw ProtocolError("block mixes different played actions");
    action_ = ev.action;
    ++rounds_;
    for (const auto& o : ev.observations) {
      sum_[o.action] += o.loss;
      ++count_[o.action];
    }
  }

  std::size_t rounds() const { return rounds_; }
  std::size_t count(std::size_t a_prime) const { return count_[a_prime]; }

  // Average loss of a' over the rounds where it was observed; nullopt when
  // the edge never realized in the block.
  std::optional<double> estimate(std::size_t a_prime) const {
    if (count_[a_prime] == 0) return std::nullopt;
    return std::clamp(sum_[a_prime] / static_cast<double>(count_[a_prime]), 0.0, 1.0);
  }

 private:
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
  std::optional<std::size_t> action_;
  std::size_t rounds_ = 0;
};

inline std::optional<double> block_estimator(std::span<const FeedbackEvent> block, std::size_t a,
                                             std::size_t a_prime) {
  if (block.empty()) throw ArgumentError("empty block");
  std::size_t k = 0;
  for (const auto& ev : block) {
    if (ev.action != a) throw ProtocolError("block is not homogeneous in the played action");
    for (const auto& o : ev.observations) k = std::max(k, o.action + 1);
  }
  if (a_prime >= k) return std::nullopt;
  BlockAccumulator acc(k);
  for (const auto& ev : block) acc.add(ev);
  return acc.estimate(a_prime);
}

struct BlockReductionResult {
  BlockPlan plan;
  std::size_t unobserved = 0;  // estimates fed as 0 because the edge never fired
  std::size_t arbitrary_rounds = 0;
};

// Runs `base` on N blocks of length Δ, replaying its action within each block
// and feeding it one block-level estimate per out-neighbour in the estimated
// support. Base must provide draw(Rng&), update(action, span<Observation>) and
// graph().
template <typename Base>
BlockReductionResult block_reduction(Environment& env, std::size_t horizon, double eps,
                                     const StochasticFeedbackGraph& estimate, Base& base, Rng& rng) {
  const std::size_t k = env.num_actions();
  if (estimate.num_vertices() != k || base.graph().num_vertices() != k) {
    throw ConfigError("block reduction: graph sizes disagree");
  }
  if (env.remaining() < horizon) throw StateError("environment has fewer rounds left than requested");
  const DirectedGraph supp = support(estimate);
  if (!(base.graph() == supp)) throw ConfigError("base algorithm was built on a different graph");
  BlockReductionResult r;
  r.plan = make_block_plan(horizon, eps, k);
  BlockAccumulator acc(k);
  std::vector<Observation> fed;
  std::size_t last = 0;
  for (std::size_t tau = 0; tau < r.plan.num_blocks; ++tau) {
    const std::size_t a = base.draw(rng);
    last = a;
    acc.reset();
    for (std::size_t s = 0; s < r.plan.block_length; ++s) acc.add(env.play(a, Phase::kCommitted));
    fed.clear();
    for (std::size_t j = 0; j < k; ++j) {
      if (!supp.edge(a, j)) continue;
      const auto c = acc.estimate(j);
      if (!c) ++r.unobserved;
      fed.push_back({j, c.value_or(0.0)});
    }
    base.update(a, fed);
  }
  for (std::size_t s = 0; s < r.plan.leftover(); ++s) {
    env.play(last, Phase::kArbitrary);
    ++r.arbitrary_rounds;
  }
  return r;
}

struct EdgeCatcherOptions {
  PhiSchedule schedule = PhiSchedule::kEverySweep;
  PhiConstants constants;
};

struct EdgeCatcherReport {
  RoundRobinOutput round_robin;
  PhiValue phi_at_commit;
  std::optional<Regime> regime;
  double eps_star = 0.0;
  bool uniform_fallback = false;
  bool zero_domination_commit = false;
  std::optional<BlockReductionResult> block;
  std::vector<std::string> warnings;
};

// Estimate the graph by round robin, then commit to the regime with the
// smaller bound and run the block reduction of the matching policy on the
// thresholded estimate.
inline EdgeCatcherReport edge_catcher(Environment& env, Rng& rng, const EdgeCatcherOptions& opts = {}) {
  const std::size_t k = env.num_actions();
  const std::size_t horizon = env.horizon();
  EdgeCatcherReport rep;
  if (k == 1) {
    while (env.remaining() > 0) env.play(0, Phase::kPlay);
    return rep;
  }
  if (horizon < 2) throw ConfigError("horizon must be at least 2");
  RoundRobinOptions rro;
  rro.schedule = opts.schedule;
  rro.constants = opts.constants;
  rep.round_robin = round_robin(env, horizon, rro);
  const StochasticFeedbackGraph g_hat = rep.round_robin.estimate.thresholded();
  rep.phi_at_commit = phi(g_hat, horizon, opts.constants);
  const std::size_t rest = env.remaining();
  if (rest == 0) return rep;

  const PhiValue& pv = rep.phi_at_commit;
  if (!pv.strong && !pv.weak) {
    rep.uniform_fallback = true;
    rep.warnings.push_back("no observable threshold at commit time; playing uniformly");
    while (env.remaining() > 0) env.play(uniform_index(rng, k), Phase::kUniform);
    return rep;
  }
  // Ties go to the strong branch.
  const Regime regime = pv.strong_branch <= pv.weak_branch ? Regime::kStrong : Regime::kWeak;
  rep.regime = regime;
  rep.eps_star = regime == Regime::kStrong ? pv.strong->eps : pv.weak->eps;
  if (regime == Regime::kWeak && pv.weak->parameter == 0.0) {
    rep.zero_domination_commit = true;
    rep.warnings.push_back("weak regime chosen with zero weak domination number; no forced exploration");
  }
  const StochasticFeedbackGraph g_star = threshold(g_hat, rep.eps_star);
  const double eps_block = rep.eps_star / 2.0;
  const BlockPlan plan = make_block_plan(rest, eps_block, k);
  Exp3G base(support(g_star), regime, std::max<std::size_t>(plan.num_blocks, 1));
  rep.block = block_reduction(env, rest, eps_block, g_star, base, rng);
  return rep;
}

}  // namespace sfg
