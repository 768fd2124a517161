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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/ew.hpp"
#include "sfg/graph.hpp"
#include "sfg/graph_params.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

// Realization counts of every ordered pair over the rounds seen so far.
class EdgeCounter {
 public:
  explicit EdgeCounter(std::size_t k) : k_(k), counts_(k * k, 0) {}

  void add(const DirectedGraph& g) {
    if (g.num_vertices() != k_) throw ArgumentError("realized graph has wrong K");
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (g.edge(i, j)) ++counts_[i * k_ + j];
    ++rounds_;
  }

  std::size_t num_vertices() const { return k_; }
  std::size_t rounds() const { return rounds_; }
  std::uint64_t count(std::size_t i, std::size_t j) const { return counts_[i * k_ + j]; }

  // Empirical frequencies over the rounds seen so far.
  StochasticFeedbackGraph frequencies() const {
    std::vector<double> p(k_ * k_, 0.0);
    if (rounds_ > 0)
      for (std::size_t e = 0; e < p.size(); ++e) p[e] = static_cast<double>(counts_[e]) / static_cast<double>(rounds_);
    return StochasticFeedbackGraph(k_, std::move(p));
  }

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
  std::size_t rounds_ = 0;
};

// Empirical-Bernstein upper confidence values for round t, built from the
// t-1 realizations observed before it.
struct UcbEstimate {
  std::size_t t = 0;
  std::size_t horizon = 0;
  std::size_t k = 0;
  std::vector<double> p_tilde;
  std::vector<double> p_hat;  // clamped to 1
  std::size_t clamped = 0;

  double tilde(std::size_t i, std::size_t j) const { return p_tilde[i * k + j]; }
  double hat(std::size_t i, std::size_t j) const { return p_hat[i * k + j]; }

  // Confidence radius around p̃.
  double radius(std::size_t i, std::size_t j) const {
    const double n = static_cast<double>(t - 1);
    const double l = log_confidence(k, horizon);
    return std::sqrt(2.0 * tilde(i, j) * l / n) + 3.0 * l / n;
  }

  StochasticFeedbackGraph graph() const { return StochasticFeedbackGraph(k, p_hat); }
};

inline UcbEstimate ucb_estimate(const EdgeCounter& counter, std::size_t horizon) {
  if (counter.rounds() == 0) throw StateError("upper confidence values need at least one observed round (t >= 2)");
  UcbEstimate u;
  u.k = counter.num_vertices();
  u.t = counter.rounds() + 1;
  u.horizon = horizon;
  const double n = static_cast<double>(counter.rounds());
  const double l = log_confidence(u.k, horizon);
  u.p_tilde.resize(u.k * u.k);
  u.p_hat.resize(u.k * u.k);
  for (std::size_t i = 0; i < u.k; ++i) {
    for (std::size_t j = 0; j < u.k; ++j) {
      const double pt = static_cast<double>(counter.count(i, j)) / n;
      const double ph = pt + std::sqrt(2.0 * pt * l / n) + 3.0 * l / n;
      u.p_tilde[i * u.k + j] = pt;
      if (ph >= 1.0) {
        u.p_hat[i * u.k + j] = 1.0;
        ++u.clamped;
      } else {
        u.p_hat[i * u.k + j] = ph;
      }
    }
  }
  return u;
}

// Records G_t and returns the estimate for round t + 1.
inline UcbEstimate ucb_update(EdgeCounter& counter, const DirectedGraph& realized, std::size_t horizon) {
  counter.add(realized);
  return ucb_estimate(counter, horizon);
}

// P(i) = sum over in-neighbours j in the support of π(j) p(j,i).
inline std::vector<double> observation_probabilities(const StochasticFeedbackGraph& g, const std::vector<double>& pi) {
  const std::size_t k = g.num_vertices();
  std::vector<double> p(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (pi[j] == 0.0) continue;
    for (std::size_t i = 0; i < k; ++i) p[i] += pi[j] * g(j, i);
  }
  return p;
}

namespace detail {

// θ of g thresholded at eps, without materializing the thresholded graph.
inline double theta_at(const StochasticFeedbackGraph& g, double eps, const std::vector<double>& pi) {
  const std::size_t k = g.num_vertices();
  double min_entry = std::numeric_limits<double>::infinity();
  for (double x : g.data())
    if (x >= eps && x > 0.0) min_entry = std::min(min_entry, x);
  if (!std::isfinite(min_entry)) return std::numeric_limits<double>::infinity();
  double th = 2.0 / min_entry;
  for (std::size_t i = 0; i < k; ++i) {
    double p = 0.0;
    bool has_in = false;
    for (std::size_t j = 0; j < k; ++j) {
      const double x = g(j, i);
      if (x >= eps && x > 0.0) {
        has_in = true;
        p += pi[j] * x;
      }
    }
    if (!has_in) return std::numeric_limits<double>::infinity();
    const double loop = g(i, i);
    if (loop >= eps && loop > 0.0) {
      if (p <= 0.0) return std::numeric_limits<double>::infinity();
      th += 2.0 * pi[i] / p;
    }
  }
  return th;
}

}  // namespace detail

// θ(𝒢, π) = 2 / (smallest edge weight) + sum over self-loop vertices of
// 2π(i)/P(i). +inf when some vertex has no in-neighbour.
inline double theta(const StochasticFeedbackGraph& g, const std::vector<double>& pi) {
  if (pi.size() != g.num_vertices()) throw ArgumentError("distribution has wrong length");
  return detail::theta_at(g, std::numeric_limits<double>::min(), pi);
}

struct EpsThetaChoice {
  double eps = 0.0;
  StochasticFeedbackGraph graph{1};
  double theta = 0.0;
};

// Threshold of the UCB graph minimizing θ among thresholds with a strongly
// observable support; ties go to the largest threshold.
inline EpsThetaChoice select_eps_theta(const StochasticFeedbackGraph& ucb, const std::vector<double>& pi_ref) {
  if (pi_ref.size() != ucb.num_vertices()) throw ArgumentError("distribution has wrong length");
  const std::vector<double> cands = candidate_thresholds(ucb);
  // Adding edges keeps a graph strongly observable, so the qualifying
  // thresholds form a prefix of the ascending candidate list.
  std::size_t qualifying = 0;
  for (std::size_t c = cands.size(); c-- > 0;) {
    if (classify(support(threshold(ucb, cands[c]))).is_strongly_observable()) {
      qualifying = c + 1;
      break;
    }
  }
  if (qualifying == 0) throw DomainError("no threshold of the UCB graph is strongly observable");
  std::size_t best = 0;
  double best_theta = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < qualifying; ++c) {
    const double th = detail::theta_at(ucb, cands[c], pi_ref);
    if (th <= best_theta) {
      best_theta = th;
      best = c;
    }
  }
  return EpsThetaChoice{cands[best], threshold(ucb, cands[best]), best_theta};
}

// ℓ̃(i) = ℓ(i)/P̂(i) when i was observed in G_t and I_t -> i is an edge of
// Ĝ_t; zero otherwise.
inline std::vector<double> iw_loss(const FeedbackEvent& feedback, const DirectedGraph& g_hat,
                                   const std::vector<double>& p_hat_obs) {
  const std::size_t k = g_hat.num_vertices();
  if (p_hat_obs.size() != k) throw ArgumentError("observation probability vector has wrong length");
  std::vector<double> est(k, 0.0);
  for (const auto& o : feedback.observations) {
    if (!g_hat.edge(feedback.action, o.action)) continue;
    const double p = p_hat_obs[o.action];
    if (!(p > 0.0)) throw InvariantError("observed loss with zero estimated observation probability");
    est[o.action] = o.loss / p;
  }
  return est;
}

inline double psi_upper(double theta_max, std::size_t t, std::size_t k, std::size_t horizon) {
  const double td = static_cast<double>(t);
  if (!std::isfinite(theta_max)) return td;
  const double l = log_confidence(k, horizon);
  const double bound = 2.0 + 11.0 * l * l * theta_max +
                       (12.0 * std::log(static_cast<double>(k)) + 4.0 * std::sqrt(2.0 * l)) * std::sqrt(td * theta_max);
  return std::min(td, bound);
}

struct LambdaValue {
  double value = std::numeric_limits<double>::infinity();
  std::optional<double> eps;
  double delta_w = 0.0;
  double sigma = 0.0;
};

// Λ_t: the committed-phase bound over thresholds of the frequency estimate
// (already thresholded at 60 ln(KT)/t) with observable support.
inline LambdaValue lambda_bound(const StochasticFeedbackGraph& p_tilde, std::size_t t, std::size_t horizon,
                                double constant = 41.0) {
  if (t < 1) throw ArgumentError("round index must be positive");
  const std::size_t k = p_tilde.num_vertices();
  const double td = static_cast<double>(horizon);
  const double l = log_confidence(k, horizon);
  const double eps_t = 60.0 * std::log(static_cast<double>(k) * td) / static_cast<double>(t);
  const StochasticFeedbackGraph g_t = threshold(p_tilde, eps_t);
  LambdaValue best;
  for (double eps : candidate_thresholds(g_t)) {
    const StochasticFeedbackGraph ge = threshold(g_t, eps);
    const DirectedGraph g = support(ge);
    const Observability obs = classify(g);
    if (!obs.is_observable()) continue;
    const DerivedWeights d = derive_weights(ge);
    const double dw = obs.is_strongly_observable() ? 0.0 : weighted_weak_domination(g, d.w_plus, kAutoSolve).value;
    const double v = constant * (std::pow(td, 2.0 / 3.0) * std::cbrt(l * dw) + std::sqrt(l * d.sigma * td));
    if (v <= best.value) best = LambdaValue{v, eps, dw, d.sigma};
  }
  return best;
}

struct CommitSet {
  std::vector<std::size_t> members;
  std::vector<double> psi;  // length K, zero off the set
  double weight = 0.0;
  bool exact = true;
};

// Minimum-weight weakly dominating set of Ĝ* with weights
// 1/min_{j in N^out(i)} p̂(i,j), and the exploration distribution ∝ those
// weights on the set.
inline CommitSet commit_dominating_set(const DirectedGraph& g_star, const UcbEstimate& ucb,
                                       std::size_t exact_limit = kDominationExactLimit) {
  const std::size_t k = g_star.num_vertices();
  if (ucb.k != k) throw ArgumentError("UCB estimate has wrong K");
  PartialWeights w(k);
  for (std::size_t i = 0; i < k; ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j)
      if (g_star.edge(i, j)) m = std::min(m, ucb.hat(i, j));
    if (std::isfinite(m)) w[i] = 1.0 / m;
  }
  const VertexSet d = weighted_weak_domination(g_star, w, SolveOptions{SolveMode::kExact, exact_limit, true});
  CommitSet cs;
  cs.members = d.vertices;
  cs.weight = d.value;
  cs.exact = d.exact;
  cs.psi.assign(k, 0.0);
  for (std::size_t i : cs.members) cs.psi[i] = *w[i] / d.value;
  return cs;
}

enum class OtcgPhase { kOptimistic, kCommitted };

inline const char* to_string(OtcgPhase p) { return p == OtcgPhase::kOptimistic ? "optimistic" : "committed"; }

struct OtcgOptions {
  // Committed-phase exploration rate uses ln(KT); false switches to ln(3K²T²).
  bool gamma_log_kt = true;
  // Evaluate the switch test only at rounds that are powers of two.
  bool lambda_pow2 = false;
  // Leading constant of the switch threshold.
  double lambda_constant = 41.0;
  std::size_t exact_domination_limit = kDominationExactLimit;
};

struct OtcgCommitParams {
  std::size_t t_star = 0;
  double eps_t_star = 0.0;
  double eps_delta_sigma = 0.0;
  double delta_w = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  StochasticFeedbackGraph g_star{1};
  std::vector<std::string> notes;
};

// Per-round internals, overwritten every round.
struct OtcgRoundInfo {
  std::size_t t = 0;  // 1-based
  OtcgPhase phase = OtcgPhase::kOptimistic;
  double psi = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();
  double gamma = 0.0;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double eps_theta = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pi;
  std::vector<double> p_obs;  // P̂_t
  std::vector<double> loss_estimate;
  DirectedGraph g_hat{1};  // support used by the estimator
  std::optional<UcbEstimate> ucb;
};

// Optimistic-then-commit learner for stochastic feedback graphs with
// observed realizations. Call act() then observe() once per round.
class Otcg {
 public:
  Otcg(std::size_t k, std::size_t horizon, OtcgOptions opts = {})
      : k_(k), horizon_(horizon), opts_(opts), counter_(k), cum_opt_(k, 0.0), cum_commit_(k, 0.0) {
    if (k == 0) throw ArgumentError("need at least one action");
    if (horizon < 2) throw ConfigError("horizon must be at least 2");
    pi_.assign(k, 1.0 / static_cast<double>(k));
    prev_pi_ = pi_;
  }

  std::size_t num_actions() const { return k_; }
  OtcgPhase phase() const { return phase_; }
  const std::optional<OtcgCommitParams>& commit_params() const { return commit_; }
  const OtcgRoundInfo& last_round() const { return info_; }
  const std::vector<double>& distribution() const { return pi_; }
  const EdgeCounter& counter() const { return counter_; }
  double theta_max() const { return theta_max_; }

  std::size_t act(Rng& rng) {
    begin_round();
    played_ = sample_discrete(rng, pi_);
    return played_;
  }

  void observe(const FeedbackEvent& fb) {
    if (!fb.realized_graph) throw ConfigError("this learner needs full-graph feedback");
    if (fb.action != played_) throw ProtocolError("feedback is for a different action than the one drawn");
    if (t_ >= 2) {
      info_.loss_estimate = iw_loss(fb, info_.g_hat, info_.p_obs);
      auto& cum = phase_ == OtcgPhase::kOptimistic ? cum_opt_ : cum_commit_;
      for (std::size_t i = 0; i < k_; ++i) cum[i] += info_.loss_estimate[i];
      if (phase_ == OtcgPhase::kOptimistic) theta_sum_ += info_.theta;
    }
    counter_.add(*fb.realized_graph);
    if (phase_ == OtcgPhase::kOptimistic && t_ >= 2) {
      info_.psi = psi_upper(theta_max_, t_, k_, horizon_);
      if (!opts_.lambda_pow2 || (t_ & (t_ - 1)) == 0) {
        const LambdaValue lv = lambda_bound(counter_.frequencies(), t_, horizon_, opts_.lambda_constant);
        info_.lambda = lv.value;
        switch_pending_ = info_.psi >= lv.value;
      }
    }
    prev_pi_ = pi_;
  }

  nlohmann::json state_dump() const {
    nlohmann::json j;
    j["t"] = t_;
    j["phase"] = to_string(phase_);
    j["pi"] = pi_;
    j["cum_optimistic"] = cum_opt_;
    j["cum_committed"] = cum_commit_;
    j["theta_sum"] = theta_sum_;
    j["theta_max"] = theta_max_;
    j["running_min_p"] = running_min_;
    return j;
  }

 private:
  void begin_round() {
    t_ = counter_.rounds() + 1;
    if (t_ > horizon_) throw StateError("horizon exhausted");
    info_ = OtcgRoundInfo{};
    info_.t = t_;
    if (t_ == 1) {
      pi_.assign(k_, 1.0 / static_cast<double>(k_));
      info_.pi = pi_;
      return;
    }
    if (phase_ == OtcgPhase::kOptimistic && switch_pending_) commit(t_ - 1);
    info_.phase = phase_;
    if (phase_ == OtcgPhase::kOptimistic) {
      optimistic_round();
    } else {
      committed_round();
    }
    for (double x : pi_) {
      if (!std::isfinite(x) || x < 0.0) throw InvariantError("invalid action distribution; state: " + state_dump().dump());
    }
    info_.pi = pi_;
  }

  void optimistic_round() {
    UcbEstimate ucb = ucb_estimate(counter_, horizon_);
    const StochasticFeedbackGraph ucb_graph = ucb.graph();
    const EpsThetaChoice choice = select_eps_theta(ucb_graph, prev_pi_);
    const double t = static_cast<double>(t_);
    running_min_ = std::min(running_min_, min_positive_entry(choice.graph));
    const double gamma = std::min(1.0 / std::sqrt(t * running_min_), 0.5);
    const double eta =
        1.0 / std::sqrt(16.0 / (running_min_ * running_min_) + 4.0 * t / running_min_ + theta_sum_);
    const std::vector<double> q = ew_distribution(cum_opt_, eta);
    for (std::size_t i = 0; i < k_; ++i) pi_[i] = (1.0 - gamma) * q[i] + gamma / static_cast<double>(k_);
    info_.theta = theta(choice.graph, pi_);
    theta_max_ = std::max(theta_max_, info_.theta);
    info_.gamma = gamma;
    info_.eta = eta;
    info_.eps_theta = choice.eps;
    info_.p_obs = observation_probabilities(choice.graph, pi_);
    info_.g_hat = support(choice.graph);
    info_.ucb = std::move(ucb);
  }

  void commit(std::size_t t_star) {
    OtcgCommitParams c;
    c.t_star = t_star;
    const double td = static_cast<double>(horizon_);
    const double kd = static_cast<double>(k_);
    c.eps_t_star = 60.0 * std::log(kd * td) / static_cast<double>(t_star);
    const StochasticFeedbackGraph g_tilde = threshold(counter_.frequencies(), c.eps_t_star);
    const auto ds = optimal_threshold_delta_sigma(g_tilde, horizon_);
    if (!ds) throw InvariantError("switch fired without an observable threshold; state: " + state_dump().dump());
    c.eps_delta_sigma = ds->eps;
    c.delta_w = ds->delta_w;
    c.sigma = ds->sigma;
    c.g_star = threshold(g_tilde, ds->eps);
    const double lg = opts_.gamma_log_kt ? std::log(kd * td) : log_confidence(k_, horizon_);
    c.gamma = c.delta_w > 0.0 ? std::min(std::cbrt(c.delta_w * lg) / std::cbrt(td), 0.5) : 0.0;
    double bracket = (c.delta_w > 0.0 ? c.delta_w / c.gamma : 0.0) + c.sigma;
    if (bracket <= 0.0) {
      bracket = 1.0;
      c.notes.push_back("zero domination weight and no self-loops; learning-rate bracket set to 1");
    }
    c.eta = k_ > 1 ? std::sqrt(std::log(kd) / (2.0 * td * bracket)) : 1.0;
    if (c.delta_w == 0.0) c.notes.push_back("strongly observable committed graph; no forced exploration");
    g_star_support_ = support(c.g_star);
    commit_ = std::move(c);
    phase_ = OtcgPhase::kCommitted;
  }

  void committed_round() {
    UcbEstimate ucb = ucb_estimate(counter_, horizon_);
    const CommitSet cs = commit_dominating_set(g_star_support_, ucb, opts_.exact_domination_limit);
    const double gamma = cs.members.empty() ? 0.0 : commit_->gamma;
    const std::vector<double> q = ew_distribution(cum_commit_, commit_->eta);
    for (std::size_t i = 0; i < k_; ++i) pi_[i] = (1.0 - gamma) * q[i] + gamma * cs.psi[i];
    info_.gamma = gamma;
    info_.eta = commit_->eta;
    info_.p_obs = observation_probabilities(ucb.graph(), pi_);
    info_.g_hat = DirectedGraph::complete(k_);
    info_.ucb = std::move(ucb);
  }

  std::size_t k_;
  std::size_t horizon_;
  OtcgOptions opts_;
  EdgeCounter counter_;
  std::vector<double> cum_opt_;
  std::vector<double> cum_commit_;
  std::vector<double> pi_;
  std::vector<double> prev_pi_;
  std::size_t t_ = 0;
  std::size_t played_ = 0;
  OtcgPhase phase_ = OtcgPhase::kOptimistic;
  bool switch_pending_ = false;
  double running_min_ = std::numeric_limits<double>::infinity();
  double theta_sum_ = 0.0;
  double theta_max_ = 0.0;
  std::optional<OtcgCommitParams> commit_;
  DirectedGraph g_star_support_{1};
  OtcgRoundInfo info_;
};

}  // namespace sfg
