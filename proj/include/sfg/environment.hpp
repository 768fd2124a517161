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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfg/errors.hpp"
#include "sfg/graph.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

// T x K matrix of losses in [0,1], fixed before play.
class LossTable {
 public:
  // Refuse tables above 2^27 entries (1 GiB of doubles).
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 27;

  LossTable(std::size_t horizon, std::size_t num_actions) : t_(horizon), k_(num_actions) {
    check_shape();
    data_.assign(t_ * k_, 0.0);
  }

  LossTable(std::size_t horizon, std::size_t num_actions, std::vector<double> data)
      : t_(horizon), k_(num_actions), data_(std::move(data)) {
    check_shape();
    if (data_.size() != t_ * k_) throw ArgumentError("loss table data has wrong size");
    for (double x : data_) check_loss(x);
  }

  std::size_t horizon() const { return t_; }
  std::size_t num_actions() const { return k_; }

  double operator()(std::size_t t, std::size_t k) const { return data_[t * k_ + k]; }

  void set(std::size_t t, std::size_t k, double loss) {
    if (t >= t_ || k >= k_) throw ArgumentError("loss table index out of range");
    check_loss(loss);
    data_[t * k_ + k] = loss;
  }

  std::span<const double> row(std::size_t t) const { return {data_.data() + t * k_, k_}; }
  const std::vector<double>& data() const { return data_; }

  double column_mean(std::size_t k) const {
    double s = 0.0;
    for (std::size_t t = 0; t < t_; ++t) s += data_[t * k_ + k];
    return s / static_cast<double>(t_);
  }

  // FNV-1a over the IEEE-754 bit patterns, as 16 hex digits.
  std::string digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xff;
        h *= 0x100000001b3ULL;
      }
    };
    mix(t_);
    mix(k_);
    for (double x : data_) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &x, sizeof bits);
      mix(bits);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  void check_shape() const {
    if (t_ == 0 || k_ == 0) throw ArgumentError("loss table needs T >= 1 and K >= 1");
    if (t_ > kMaxEntries / k_) {
      throw CapabilityError("loss table of " + std::to_string(t_) + "x" + std::to_string(k_) +
                            " exceeds the materialization cap of " + std::to_string(kMaxEntries) + " entries");
    }
  }
  static void check_loss(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("loss outside [0,1]");
  }

  std::size_t t_;
  std::size_t k_;
  std::vector<double> data_;
};

// Independent Bernoulli columns; a mean of exactly 0 or 1 yields a constant
// column without consuming randomness.
inline LossTable bernoulli_losses(std::size_t horizon, const std::vector<double>& means, Rng& rng) {
  const std::size_t k = means.size();
  for (double m : means)
    if (!(m >= 0.0 && m <= 1.0)) throw ArgumentError("Bernoulli mean outside [0,1]");
  std::vector<double> data(horizon * k);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const double m = means[i];
      data[t * k + i] = (m <= 0.0) ? 0.0 : (m >= 1.0) ? 1.0 : (bernoulli(rng, m) ? 1.0 : 0.0);
    }
  }
  return LossTable(horizon, k, std::move(data));
}

struct Observation {
  std::size_t action = 0;
  double loss = 0.0;
};

enum class FeedbackMode { kLocal, kFullGraph };

inline const char* to_string(FeedbackMode m) { return m == FeedbackMode::kLocal ? "local" : "full_graph"; }

struct FeedbackEvent {
  std::size_t round = 0;  // 0-based
  std::size_t action = 0;
  std::vector<Observation> observations;
  std::optional<DirectedGraph> realized_graph;

  std::optional<double> observed_loss(std::size_t a) const {
    for (const auto& o : observations)
      if (o.action == a) return o.loss;
    return std::nullopt;
  }
};

// Overwrites g with one realization. Entries equal to 0 or 1 consume no
// randomness; the draw order is row-major.
inline void sample_realization_into(const StochasticFeedbackGraph& gs, Rng& rng, DirectedGraph& g) {
  const std::size_t k = gs.num_vertices();
  if (g.num_vertices() != k) throw ArgumentError("realization buffer has wrong K");
  g.clear();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = gs(i, j);
      if (p >= 1.0 || (p > 0.0 && uniform01(rng) < p)) g.add_edge(i, j);
    }
  }
}

inline DirectedGraph sample_realization(const StochasticFeedbackGraph& gs, Rng& rng) {
  DirectedGraph g(gs.num_vertices());
  sample_realization_into(gs, rng, g);
  return g;
}

inline void make_feedback_into(const DirectedGraph& g, std::size_t round, std::size_t action,
                               std::span<const double> losses, FeedbackMode mode, FeedbackEvent& ev) {
  const std::size_t k = g.num_vertices();
  if (action >= k) throw ArgumentError("played action out of range");
  if (losses.size() != k) throw ArgumentError("loss row has wrong length");
  ev.round = round;
  ev.action = action;
  ev.observations.clear();
  for (std::size_t j = 0; j < k; ++j)
    if (g.edge(action, j)) ev.observations.push_back({j, losses[j]});
  if (mode == FeedbackMode::kFullGraph) {
    ev.realized_graph = g;
  } else {
    ev.realized_graph.reset();
  }
}

inline FeedbackEvent make_feedback(const DirectedGraph& g, std::size_t round, std::size_t action,
                                   std::span<const double> losses, FeedbackMode mode) {
  FeedbackEvent ev;
  make_feedback_into(g, round, action, losses, mode, ev);
  return ev;
}

// Phase labels attached to every played round.
enum class Phase : std::uint8_t { kPlay, kEstimation, kCommitted, kArbitrary, kOptimistic, kUniform };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::kPlay:
      return "play";
    case Phase::kEstimation:
      return "estimation";
    case Phase::kCommitted:
      return "committed";
    case Phase::kArbitrary:
      return "arbitrary";
    case Phase::kOptimistic:
      return "optimistic";
    case Phase::kUniform:
      return "uniform";
  }
  return "unknown";
}

// Oblivious environment: a stochastic graph plus a pre-drawn loss table.
// Each call to play() draws a fresh realization G_t from the graph stream,
// charges the loss of the played action and returns the feedback.
class Environment {
 public:
  Environment(StochasticFeedbackGraph truth, std::shared_ptr<const LossTable> losses, FeedbackMode mode,
              Rng graph_rng)
      : truth_(std::move(truth)),
        losses_(std::move(losses)),
        mode_(mode),
        rng_(std::move(graph_rng)),
        realized_(truth_.num_vertices()) {
    if (!losses_) throw ArgumentError("environment needs a loss table");
    if (losses_->num_actions() != truth_.num_vertices()) {
      throw ArgumentError("loss table and graph disagree on K");
    }
    actions_.reserve(losses_->horizon());
    incurred_.reserve(losses_->horizon());
    phases_.reserve(losses_->horizon());
  }

  std::size_t num_actions() const { return truth_.num_vertices(); }
  std::size_t horizon() const { return losses_->horizon(); }
  std::size_t round() const { return actions_.size(); }
  std::size_t remaining() const { return horizon() - round(); }
  FeedbackMode mode() const { return mode_; }
  const StochasticFeedbackGraph& truth() const { return truth_; }
  const LossTable& losses() const { return *losses_; }
  std::shared_ptr<const LossTable> loss_table() const { return losses_; }

  // The returned reference stays valid until the next call.
  const FeedbackEvent& play(std::size_t action, Phase phase = Phase::kPlay) {
    const std::size_t t = round();
    if (t >= horizon()) throw StateError("environment horizon exhausted");
    if (action >= num_actions()) throw ArgumentError("played action out of range");
    sample_realization_into(truth_, rng_, realized_);
    make_feedback_into(realized_, t, action, losses_->row(t), mode_, event_);
    actions_.push_back(static_cast<std::uint32_t>(action));
    incurred_.push_back((*losses_)(t, action));
    phases_.push_back(phase);
    return event_;
  }

  const std::vector<std::uint32_t>& actions() const { return actions_; }
  const std::vector<double>& incurred() const { return incurred_; }
  const std::vector<Phase>& phases() const { return phases_; }

 private:
  StochasticFeedbackGraph truth_;
  std::shared_ptr<const LossTable> losses_;
  FeedbackMode mode_;
  Rng rng_;
  DirectedGraph realized_;
  FeedbackEvent event_;
  std::vector<std::uint32_t> actions_;
  std::vector<double> incurred_;
  std::vector<Phase> phases_;
};

}  // namespace sfg
