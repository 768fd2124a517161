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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/graph_params.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

struct EwState {
  std::vector<double> cumulative;  // L(i)
  double eta = 1.0;
  std::size_t round = 0;
};

// q(i) ∝ exp(-eta * L(i)), shifted by min L before exponentiating.
inline std::vector<double> ew_distribution(std::span<const double> cumulative, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ArgumentError("learning rate must be positive and finite");
  if (cumulative.empty()) throw ArgumentError("no actions");
  double lo = std::numeric_limits<double>::infinity();
  for (double x : cumulative) {
    if (!std::isfinite(x)) throw StateError("non-finite cumulative loss");
    lo = std::min(lo, x);
  }
  std::vector<double> q(cumulative.size());
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::exp(-eta * (cumulative[i] - lo));
    z += q[i];
  }
  for (double& x : q) x /= z;
  return q;
}

inline std::vector<double> ew_distribution(const EwState& s) { return ew_distribution(s.cumulative, s.eta); }

inline nlohmann::json to_json(const EwState& s) {
  return {{"cumulative", s.cumulative}, {"eta", s.eta}, {"round", s.round}};
}

inline EwState ew_state_from_json(const nlohmann::json& j) {
  EwState s;
  s.cumulative = j.at("cumulative").get<std::vector<double>>();
  s.eta = j.at("eta").get<double>();
  s.round = j.at("round").get<std::size_t>();
  return s;
}

// History of an exponential-weights run: q_t, the rate eta_{t-1} that produced
// it, the loss vector fed at round t, and the vertices on which the
// second-order q(1-q) refinement applies.
struct EwTrace {
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> losses;
  std::vector<double> eta;  // eta[t] produced q[t]
  double eta_final = 0.0;   // rate after the last round
  std::vector<std::vector<bool>> second_order;
};

struct EwBoundCheck {
  double lhs = 0.0;  // sum_t <q_t, l_t> - min_k sum_t l_t(k)
  double rhs = 0.0;
  double residual = 0.0;  // rhs - lhs
  bool precondition = true;  // eta_{t-1} l_t(i) <= 1 on the refined set, rates nonincreasing
};

// Evaluates the exponential-weights regret inequality
//   sum_t <q_t - u, l_t> <= ln K / eta_T
//       + sum_t eta_{t-1} (sum_{i in S_t} q(1-q) l^2 + sum_{i notin S_t} q l^2)
// against the best single action u.
inline EwBoundCheck regret_bound_check(const EwTrace& trace) {
  EwBoundCheck r;
  const std::size_t horizon = trace.q.size();
  if (trace.losses.size() != horizon || trace.eta.size() != horizon || trace.second_order.size() != horizon) {
    throw ArgumentError("trace components have different lengths");
  }
  if (horizon == 0) return r;
  const std::size_t k = trace.q.front().size();
  std::vector<double> total(k, 0.0);
  double learner = 0.0;
  double second = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& q = trace.q[t];
    const auto& l = trace.losses[t];
    double step = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      learner += q[i] * l[i];
      total[i] += l[i];
      if (trace.second_order[t][i]) {
        step += q[i] * (1.0 - q[i]) * l[i] * l[i];
        if (trace.eta[t] * l[i] > 1.0) r.precondition = false;
      } else {
        step += q[i] * l[i] * l[i];
      }
    }
    second += trace.eta[t] * step;
    if (t > 0 && trace.eta[t] > trace.eta[t - 1]) r.precondition = false;
  }
  if (trace.eta_final > trace.eta.back()) r.precondition = false;
  r.lhs = learner - *std::min_element(total.begin(), total.end());
  r.rhs = std::log(static_cast<double>(k)) / trace.eta_final + second;
  r.residual = r.rhs - r.lhs;
  return r;
}

enum class Regime { kStrong, kWeak };

inline const char* to_string(Regime r) { return r == Regime::kStrong ? "strong" : "weak"; }

struct GraphPolicyConfig {
  Regime regime = Regime::kStrong;
  std::size_t horizon = 1;
  // Weak regime only.
  std::vector<std::size_t> dominating_set;
  double delta = 0.0;
  double sigma_count = 0.0;  // number of self-loop vertices
  double gamma = 0.0;
  double eta = 0.0;
};

// Both regimes instantiate the optimistic and committed parameter forms of the
// stochastic-graph algorithm with every edge probability equal to one.
inline GraphPolicyConfig make_policy_config(const DirectedGraph& g, Regime regime, std::size_t horizon) {
  if (horizon == 0) throw ArgumentError("policy horizon must be positive");
  const Observability obs = classify(g);
  if (regime == Regime::kStrong && !obs.is_strongly_observable()) {
    throw ConfigError("strong-regime policy needs a strongly observable graph");
  }
  if (regime == Regime::kWeak && !obs.is_observable()) {
    throw ConfigError("weak-regime policy needs an observable graph");
  }
  GraphPolicyConfig c;
  c.regime = regime;
  c.horizon = horizon;
  if (regime == Regime::kStrong) return c;

  const std::size_t k = g.num_vertices();
  const double n = static_cast<double>(horizon);
  const VertexSet d = weak_domination(g, SolveOptions{SolveMode::kGreedy});
  c.dominating_set = d.vertices;
  c.delta = static_cast<double>(d.size());
  for (std::size_t i = 0; i < k; ++i) c.sigma_count += g.edge(i, i) ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  c.gamma = std::min(std::cbrt(c.delta * std::log(3.0 * kd * kd * n * n)) / std::cbrt(n), 0.5);
  double bracket = (c.delta > 0.0 ? c.delta / c.gamma : 0.0) + c.sigma_count;
  if (bracket <= 0.0) bracket = 1.0;
  c.eta = k > 1 ? std::sqrt(std::log(kd) / (2.0 * n * bracket)) : 1.0;
  return c;
}

// Exponential weights with graph-based importance weighting on a fixed
// deterministic feedback graph.
class Exp3G {
 public:
  Exp3G(DirectedGraph graph, Regime regime, std::size_t horizon)
      : graph_(std::move(graph)), config_(make_policy_config(graph_, regime, horizon)) {
    const std::size_t k = graph_.num_vertices();
    cumulative_.assign(k, 0.0);
    psi_.assign(k, 0.0);
    if (regime == Regime::kStrong) {
      std::fill(psi_.begin(), psi_.end(), 1.0 / static_cast<double>(k));
    } else {
      for (std::size_t i : config_.dominating_set) psi_[i] = 1.0 / static_cast<double>(config_.dominating_set.size());
    }
    in_.resize(k);
    for (std::size_t i = 0; i < k; ++i) in_[i] = graph_.in_neighbors(i);
    prepare_round();
  }

  const DirectedGraph& graph() const { return graph_; }
  const GraphPolicyConfig& config() const { return config_; }
  Regime regime() const { return config_.regime; }
  std::size_t num_actions() const { return graph_.num_vertices(); }
  // 1-based index of the upcoming round.
  std::size_t round() const { return t_; }
  const std::vector<double>& distribution() const { return pi_; }
  const std::vector<double>& weights() const { return q_; }
  const std::vector<double>& exploration() const { return psi_; }
  double gamma() const { return gamma_; }
  double eta() const { return eta_; }
  std::size_t zero_probability_events() const { return zero_prob_; }
  std::size_t missing_observations() const { return missing_; }

  void enable_recording() { recording_ = true; }
  const EwTrace& recorded() const { return trace_; }

  std::size_t draw(Rng& rng) const { return sample_discrete(rng, pi_); }

  // Feeds the observations made after playing `played` and returns the loss
  // estimates of this round. Out-neighbours of `played` without an
  // observation are estimated as zero and counted.
  const std::vector<double>& update(std::size_t played, std::span<const Observation> observations) {
    const std::size_t k = num_actions();
    if (played >= k) throw ArgumentError("played action out of range");
    estimate_.assign(k, 0.0);
    observed_.assign(k, 0);
    for (const auto& o : observations) {
      if (o.action >= k || !graph_.edge(played, o.action)) {
        throw ProtocolError("observation of action " + std::to_string(o.action) +
                            " outside the out-neighbourhood of the played action");
      }
      observed_[o.action] = 1;
      const double p = observe_prob(o.action);
      if (p <= 0.0) {
        ++zero_prob_;
        continue;
      }
      estimate_[o.action] = o.loss / p;
    }
    for (std::size_t i = 0; i < k; ++i)
      if (graph_.edge(played, i) && !observed_[i]) ++missing_;

    if (recording_) {
      trace_.q.push_back(q_);
      trace_.losses.push_back(estimate_);
      trace_.eta.push_back(eta_);
      std::vector<bool> s(k);
      for (std::size_t i = 0; i < k; ++i) s[i] = !graph_.edge(i, i);
      trace_.second_order.push_back(std::move(s));
    }

    if (config_.regime == Regime::kStrong) theta_sum_ += theta_now();
    for (std::size_t i = 0; i < k; ++i) cumulative_[i] += estimate_[i];
    ++t_;
    prepare_round();
    if (recording_) trace_.eta_final = eta_;
    return estimate_;
  }

  // Probability that the loss of i is observed under the current π.
  double observe_prob(std::size_t i) const {
    double p = 0.0;
    for (std::size_t j : in_[i]) p += pi_[j];
    return p;
  }

 private:
  // 2 + sum over self-loop vertices of 2π(i)/P(i).
  double theta_now() const {
    double th = 2.0;
    for (std::size_t i = 0; i < num_actions(); ++i) {
      if (!graph_.edge(i, i)) continue;
      th += 2.0 * pi_[i] / observe_prob(i);
    }
    return th;
  }

  void prepare_round() {
    const double t = static_cast<double>(t_);
    if (config_.regime == Regime::kStrong) {
      gamma_ = std::min(1.0 / std::sqrt(t), 0.5);
      eta_ = 1.0 / std::sqrt(16.0 + 4.0 * t + theta_sum_);
    } else {
      gamma_ = config_.gamma;
      eta_ = config_.eta;
    }
    q_ = ew_distribution(cumulative_, eta_);
    pi_.resize(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i) pi_[i] = (1.0 - gamma_) * q_[i] + gamma_ * psi_[i];
  }

  DirectedGraph graph_;
  GraphPolicyConfig config_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<double> cumulative_;
  std::vector<double> psi_;
  std::vector<double> q_;
  std::vector<double> pi_;
  std::vector<double> estimate_;
  std::vector<char> observed_;
  std::size_t t_ = 1;
  double gamma_ = 0.0;
  double eta_ = 0.0;
  double theta_sum_ = 0.0;
  std::size_t zero_prob_ = 0;
  std::size_t missing_ = 0;
  bool recording_ = false;
  EwTrace trace_;
};

struct Exp3GStep {
  std::vector<double> next_distribution;
  std::vector<double> loss_estimate;
};

inline Exp3GStep exp3g_step(Exp3G& policy, const FeedbackEvent& feedback) {
  Exp3GStep s;
  s.loss_estimate = policy.update(feedback.action, feedback.observations);
  s.next_distribution = policy.distribution();
  return s;
}

}  // namespace sfg
