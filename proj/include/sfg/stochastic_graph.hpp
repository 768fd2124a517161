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
#include <unordered_map>
#include <vector>

#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/graph_params.hpp"

namespace sfg {

// K x K matrix of independent per-round edge probabilities.
class StochasticFeedbackGraph {
 public:
  explicit StochasticFeedbackGraph(std::size_t num_vertices) : k_(num_vertices), p_(num_vertices * num_vertices, 0.0) {
    if (num_vertices == 0) throw ArgumentError("graph needs at least one vertex");
  }

  StochasticFeedbackGraph(std::size_t num_vertices, std::vector<double> row_major)
      : k_(num_vertices), p_(std::move(row_major)) {
    if (num_vertices == 0) throw ArgumentError("graph needs at least one vertex");
    if (p_.size() != k_ * k_) throw ArgumentError("probability matrix must be K x K");
    for (double x : p_) check_probability(x);
  }

  static StochasticFeedbackGraph from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t k = rows.size();
    std::vector<double> flat;
    flat.reserve(k * k);
    for (const auto& r : rows) {
      if (r.size() != k) throw ArgumentError("probability matrix must be square");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return StochasticFeedbackGraph(k, std::move(flat));
  }

  // Every edge of g with probability p.
  static StochasticFeedbackGraph uniform_on(const DirectedGraph& g, double p) {
    StochasticFeedbackGraph s(g.num_vertices());
    for (const auto& [i, j] : g.edges()) s.set(i, j, p);
    return s;
  }

  std::size_t num_vertices() const { return k_; }

  double operator()(std::size_t i, std::size_t j) const { return p_[i * k_ + j]; }

  double prob(std::size_t i, std::size_t j) const {
    check_vertex(i);
    check_vertex(j);
    return p_[i * k_ + j];
  }

  void set(std::size_t i, std::size_t j, double p) {
    check_vertex(i);
    check_vertex(j);
    check_probability(p);
    p_[i * k_ + j] = p;
  }

  const std::vector<double>& data() const { return p_; }

  bool operator==(const StochasticFeedbackGraph& other) const = default;

 private:
  static void check_probability(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("edge probability outside [0,1]");
  }
  void check_vertex(std::size_t i) const {
    if (i >= k_) throw ArgumentError("vertex " + std::to_string(i) + " out of range");
  }

  std::size_t k_;
  std::vector<double> p_;
};

inline DirectedGraph support(const StochasticFeedbackGraph& gs) {
  const std::size_t k = gs.num_vertices();
  DirectedGraph g(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (gs(i, j) > 0.0) g.add_edge(i, j);
  return g;
}

// Zeroes entries below eps. Thresholds above 1 are allowed and clear every
// entry except exact ones (none, if eps > 1).
inline StochasticFeedbackGraph threshold(const StochasticFeedbackGraph& gs, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("threshold must be positive");
  std::vector<double> p = gs.data();
  for (double& x : p)
    if (x < eps) x = 0.0;
  return StochasticFeedbackGraph(gs.num_vertices(), std::move(p));
}

inline std::vector<double> candidate_thresholds(const StochasticFeedbackGraph& gs) {
  std::vector<double> c;
  for (double x : gs.data())
    if (x > 0.0) c.push_back(x);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

inline double min_positive_entry(const StochasticFeedbackGraph& gs) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : gs.data())
    if (x > 0.0) m = std::min(m, x);
  return m;
}

struct DerivedWeights {
  PartialWeights w_minus;  // 1 / min incoming probability
  PartialWeights w_plus;   // 1 / min outgoing probability
  double sigma = 0.0;      // sum of 1/p(i,i) over self-loop vertices
};

inline DerivedWeights derive_weights(const StochasticFeedbackGraph& gs) {
  const std::size_t k = gs.num_vertices();
  DerivedWeights d;
  d.w_minus.assign(k, std::nullopt);
  d.w_plus.assign(k, std::nullopt);
  for (std::size_t i = 0; i < k; ++i) {
    double min_in = std::numeric_limits<double>::infinity();
    double min_out = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (gs(j, i) > 0.0) min_in = std::min(min_in, gs(j, i));
      if (gs(i, j) > 0.0) min_out = std::min(min_out, gs(i, j));
    }
    if (std::isfinite(min_in)) d.w_minus[i] = 1.0 / min_in;
    if (std::isfinite(min_out)) d.w_plus[i] = 1.0 / min_out;
    if (gs(i, i) > 0.0) d.sigma += 1.0 / gs(i, i);
  }
  return d;
}

inline double self_observability(const StochasticFeedbackGraph& gs) { return derive_weights(gs).sigma; }

// α_w(𝒢) = α_w(supp, w⁻) + α_w(supp, w⁺).
inline double weighted_alpha(const StochasticFeedbackGraph& gs, const SolveOptions& opts = {}) {
  const DerivedWeights d = derive_weights(gs);
  const DirectedGraph g = support(gs);
  return weighted_independence_number(g, d.w_minus, opts).value + weighted_independence_number(g, d.w_plus, opts).value;
}

// δ_w(𝒢) = δ_w(supp, w⁺).
inline VertexSet weighted_delta(const StochasticFeedbackGraph& gs, const SolveOptions& opts = {}) {
  return weighted_weak_domination(support(gs), derive_weights(gs).w_plus, opts);
}

// Memoizes α and δ by support pattern. Thresholded estimates change support
// rarely, so repeated stopping checks mostly hit the cache.
class ParamCache {
 public:
  std::size_t alpha(const DirectedGraph& g) {
    auto key = key_of(g);
    auto it = alpha_.find(key);
    if (it != alpha_.end()) return it->second;
    const std::size_t a = independence_number(g, kAutoSolve).size();
    alpha_.emplace(std::move(key), a);
    return a;
  }

  std::size_t delta(const DirectedGraph& g) {
    auto key = key_of(g);
    auto it = delta_.find(key);
    if (it != delta_.end()) return it->second;
    const std::size_t d = weak_domination(g, kAutoSolve).size();
    delta_.emplace(std::move(key), d);
    return d;
  }

 private:
  static std::string key_of(const DirectedGraph& g) {
    const auto& a = g.adjacency();
    return std::string(a.begin(), a.end());
  }

  std::unordered_map<std::string, std::size_t> alpha_;
  std::unordered_map<std::string, std::size_t> delta_;
};

struct ThresholdChoice {
  double eps = 0.0;
  double parameter = 0.0;  // α or δ of the thresholded support
  double ratio = 0.0;      // parameter / eps
};

// Candidate thresholds are scanned in increasing order with <=, so ties go to
// the largest threshold. std::nullopt means no threshold qualifies.
inline std::optional<ThresholdChoice> optimal_threshold_strong(const StochasticFeedbackGraph& gs,
                                                               ParamCache* cache = nullptr) {
  std::optional<ThresholdChoice> best;
  for (double eps : candidate_thresholds(gs)) {
    const DirectedGraph g = support(threshold(gs, eps));
    if (!classify(g).is_strongly_observable()) continue;
    const double a = static_cast<double>(cache ? cache->alpha(g) : independence_number(g, kAutoSolve).size());
    const double ratio = a / eps;
    if (!best || ratio <= best->ratio) best = ThresholdChoice{eps, a, ratio};
  }
  return best;
}

inline std::optional<ThresholdChoice> optimal_threshold_weak(const StochasticFeedbackGraph& gs,
                                                             ParamCache* cache = nullptr) {
  std::optional<ThresholdChoice> best;
  for (double eps : candidate_thresholds(gs)) {
    const DirectedGraph g = support(threshold(gs, eps));
    if (!classify(g).is_observable()) continue;
    const double d = static_cast<double>(cache ? cache->delta(g) : weak_domination(g, kAutoSolve).size());
    const double ratio = d / eps;
    if (!best || ratio <= best->ratio) best = ThresholdChoice{eps, d, ratio};
  }
  return best;
}

inline double log_confidence(std::size_t k, std::size_t horizon) {
  const double kd = static_cast<double>(k);
  const double td = static_cast<double>(horizon);
  return std::log(3.0 * kd * kd * td * td);
}

struct DeltaSigmaChoice {
  double eps = 0.0;
  double delta_w = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
};

// Minimizes (δ_w L)^{1/3} T^{2/3} + sqrt(σ T L), L = ln(3K²T²), over
// thresholds with observable support.
inline std::optional<DeltaSigmaChoice> optimal_threshold_delta_sigma(const StochasticFeedbackGraph& gs,
                                                                     std::size_t horizon) {
  if (horizon < 2) throw ArgumentError("horizon must be at least 2");
  const double td = static_cast<double>(horizon);
  const double log_term = log_confidence(gs.num_vertices(), horizon);
  std::optional<DeltaSigmaChoice> best;
  for (double eps : candidate_thresholds(gs)) {
    const StochasticFeedbackGraph ge = threshold(gs, eps);
    const DirectedGraph g = support(ge);
    if (!classify(g).is_observable()) continue;
    const DerivedWeights d = derive_weights(ge);
    const double dw = weighted_weak_domination(g, d.w_plus, kAutoSolve).value;
    const double obj = std::cbrt(dw * log_term) * std::pow(td, 2.0 / 3.0) + std::sqrt(d.sigma * td * log_term);
    if (!best || obj <= best->objective) best = DeltaSigmaChoice{eps, dw, d.sigma, obj};
  }
  return best;
}

struct EpsGoodReport {
  bool ok = true;
  std::vector<Edge> missing_heavy;       // p >= 2ε but absent from the estimate
  std::vector<Edge> inaccurate;          // in estimate, p >= ε/2, |p̂ - p| > p/2
  std::vector<Edge> spurious_light;      // p < ε/2 but present in the estimate
};

// Checks the three closeness conditions between a thresholded estimate and
// the truth. The estimate's support is its set of positive entries.
inline EpsGoodReport is_eps_good_approx(const StochasticFeedbackGraph& estimate, const StochasticFeedbackGraph& truth,
                                        double eps) {
  if (estimate.num_vertices() != truth.num_vertices()) throw ArgumentError("graphs have different K");
  const std::size_t k = truth.num_vertices();
  EpsGoodReport r;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = truth(i, j);
      const double ph = estimate(i, j);
      const bool in_est = ph > 0.0;
      if (p >= 2.0 * eps && !in_est) r.missing_heavy.emplace_back(i, j);
      if (in_est && p >= eps / 2.0 && std::abs(ph - p) > p / 2.0) r.inaccurate.emplace_back(i, j);
      if (p < eps / 2.0 && in_est) r.spurious_light.emplace_back(i, j);
    }
  }
  r.ok = r.missing_heavy.empty() && r.inaccurate.empty() && r.spurious_light.empty();
  return r;
}

// Edge counts after tau round-robin sweeps, thresholded at eps.
class GraphEstimate {
 public:
  explicit GraphEstimate(std::size_t k) : k_(k), counts_(k * k, 0) {}

  std::size_t num_vertices() const { return k_; }
  std::size_t rounds() const { return tau_; }
  double threshold_value() const { return eps_; }
  std::uint64_t count(std::size_t i, std::size_t j) const { return counts_[i * k_ + j]; }

  void record(std::size_t i, std::size_t j) { ++counts_[i * k_ + j]; }
  void finish_sweep(double eps) {
    ++tau_;
    eps_ = eps;
  }

  double p_hat(std::size_t i, std::size_t j) const {
    return tau_ == 0 ? 0.0 : static_cast<double>(counts_[i * k_ + j]) / static_cast<double>(tau_);
  }

  bool in_support(std::size_t i, std::size_t j) const { return tau_ > 0 && p_hat(i, j) >= eps_; }

  StochasticFeedbackGraph raw() const {
    std::vector<double> p(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) p[i * k_ + j] = p_hat(i, j);
    return StochasticFeedbackGraph(k_, std::move(p));
  }

  // Ĝ_τ: p̂ where p̂ >= ε_τ, zero elsewhere.
  StochasticFeedbackGraph thresholded() const {
    std::vector<double> p(k_ * k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        if (in_support(i, j)) p[i * k_ + j] = p_hat(i, j);
    return StochasticFeedbackGraph(k_, std::move(p));
  }

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
  std::size_t tau_ = 0;
  double eps_ = std::numeric_limits<double>::infinity();
};

}  // namespace sfg
