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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sfg/edge_catcher.hpp"
#include "sfg/environment.hpp"
#include "sfg/errors.hpp"
#include "sfg/ew.hpp"
#include "sfg/graph_io.hpp"
#include "sfg/hard_instances.hpp"
#include "sfg/otcg.hpp"
#include "sfg/rng.hpp"
#include "sfg/stochastic_graph.hpp"

namespace sfg {

inline constexpr const char* kTraceFormat = "sfg-trace v1";
inline constexpr const char* kInstanceFormat = "sfg-instance v1";

// JSON has no infinities; they are written as the strings "inf"/"-inf".
inline nlohmann::json json_number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string graph_digest(const StochasticFeedbackGraph& g) {
  const std::size_t n = g.data().size();
  return LossTable(1, n, g.data()).digest();
}

// One simulated run. Cumulative losses of fixed actions are derived from the
// shared loss table rather than stored.
struct RegretTrace {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string instance_digest;
  std::size_t num_actions = 0;
  std::vector<std::uint32_t> actions;
  std::vector<double> losses;
  std::vector<Phase> phases;
  std::shared_ptr<const LossTable> table;
  // Extra per-round columns in insertion order (name, values).
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  nlohmann::json sidecar = nlohmann::json::object();

  std::size_t horizon() const { return actions.size(); }

  std::vector<double> cumulative_learner() const {
    std::vector<double> c(losses.size());
    std::partial_sum(losses.begin(), losses.end(), c.begin());
    return c;
  }

  // Cumulative loss of every fixed action after the first t rounds.
  std::vector<double> cumulative_actions(std::size_t t) const {
    std::vector<double> c(num_actions, 0.0);
    for (std::size_t s = 0; s < t; ++s)
      for (std::size_t k = 0; k < num_actions; ++k) c[k] += (*table)(s, k);
    return c;
  }

  // Realized regret after t rounds against the best action over those rounds.
  double regret_at(std::size_t t) const {
    const auto c = cumulative_actions(t);
    double learner = 0.0;
    for (std::size_t s = 0; s < t; ++s) learner += losses[s];
    return learner - *std::min_element(c.begin(), c.end());
  }

  std::vector<double> regret_curve() const {
    std::vector<double> out(horizon());
    std::vector<double> c(num_actions, 0.0);
    double learner = 0.0;
    for (std::size_t s = 0; s < horizon(); ++s) {
      learner += losses[s];
      for (std::size_t k = 0; k < num_actions; ++k) c[k] += (*table)(s, k);
      out[s] = learner - *std::min_element(c.begin(), c.end());
    }
    return out;
  }

  double final_regret() const { return regret_at(horizon()); }
};

enum class Algorithm { kEdgeCatcher, kOtcg, kExp3gStrong, kExp3gWeak, kUniformBaseline };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kEdgeCatcher:
      return "edge_catcher";
    case Algorithm::kOtcg:
      return "otcg";
    case Algorithm::kExp3gStrong:
      return "exp3g_strong";
    case Algorithm::kExp3gWeak:
      return "exp3g_weak";
    case Algorithm::kUniformBaseline:
      return "uniform_baseline";
  }
  return "unknown";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "edge_catcher") return Algorithm::kEdgeCatcher;
  if (s == "otcg") return Algorithm::kOtcg;
  if (s == "exp3g_strong") return Algorithm::kExp3gStrong;
  if (s == "exp3g_weak") return Algorithm::kExp3gWeak;
  if (s == "uniform_baseline") return Algorithm::kUniformBaseline;
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline FeedbackMode parse_feedback_mode(const std::string& s) {
  if (s == "local") return FeedbackMode::kLocal;
  if (s == "full_graph") return FeedbackMode::kFullGraph;
  throw ConfigError("unknown feedback mode '" + s + "'");
}

struct LossModel {
  enum class Kind { kBernoulli, kConstant, kAlternating };
  Kind kind = Kind::kBernoulli;
  std::vector<double> values;  // means or constants; unused for alternating
};

inline LossTable make_losses(const LossModel& model, std::size_t horizon, std::size_t k, Rng& rng) {
  switch (model.kind) {
    case LossModel::Kind::kBernoulli:
      if (model.values.size() != k) throw ConfigError("need one Bernoulli mean per action");
      return bernoulli_losses(horizon, model.values, rng);
    case LossModel::Kind::kConstant: {
      if (model.values.size() != k) throw ConfigError("need one constant loss per action");
      LossTable t(horizon, k);
      for (std::size_t s = 0; s < horizon; ++s)
        for (std::size_t i = 0; i < k; ++i) t.set(s, i, model.values[i]);
      return t;
    }
    case LossModel::Kind::kAlternating: {
      // Action t mod K loses 1 in round t, everyone else 0.
      LossTable t(horizon, k);
      for (std::size_t s = 0; s < horizon; ++s) t.set(s, s % k, 1.0);
      return t;
    }
  }
  throw ConfigError("unknown loss model");
}

struct HardInstanceConfig {
  HardInstanceKind kind = HardInstanceKind::kStrongC2;
  double eps = 0.1;
  std::size_t num_actions = 2;                 // c2
  std::optional<DirectedGraph> base_graph;     // c1, c3
};

struct ExperimentConfig {
  // Exactly one of: graph (+ losses), hard instance, or a replayed instance
  // (graph + fixed loss table).
  std::optional<StochasticFeedbackGraph> graph;
  LossModel losses;
  std::optional<HardInstanceConfig> hard;
  std::shared_ptr<const LossTable> fixed_losses;

  Algorithm algorithm = Algorithm::kEdgeCatcher;
  FeedbackMode mode = FeedbackMode::kLocal;
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 1;
  PhiSchedule phi_schedule = PhiSchedule::kEverySweep;
  PhiConstants phi_constants;
  OtcgOptions otcg;
  std::string out_dir;
};

inline std::vector<std::uint64_t> default_seeds(std::size_t n = 20, std::uint64_t first = 1) {
  std::vector<std::uint64_t> s(n);
  std::iota(s.begin(), s.end(), first);
  return s;
}

inline void validate(const ExperimentConfig& c) {
  const int sources = (c.graph ? 1 : 0) + (c.hard ? 1 : 0);
  if (sources != 1) throw ConfigError("config needs exactly one of 'graph' or 'hard_instance'");
  if (c.fixed_losses && !c.graph) throw ConfigError("a fixed loss table needs an explicit graph");
  if (c.horizon < 1) throw ConfigError("T must be positive");
  if (c.fixed_losses && c.fixed_losses->horizon() != c.horizon) throw ConfigError("fixed loss table has a different T");
  if (c.seeds.empty()) throw ConfigError("no seeds");
  if (c.algorithm == Algorithm::kOtcg && c.mode != FeedbackMode::kFullGraph) {
    throw ConfigError("otcg needs full_graph feedback mode");
  }
  if (c.threads == 0) throw ConfigError("threads must be positive");
}

struct PreparedInstance {
  StochasticFeedbackGraph graph{1};
  std::shared_ptr<const LossTable> losses;
  std::optional<HardInstanceSpec> spec;
};

inline PreparedInstance prepare_instance(const ExperimentConfig& c, std::uint64_t seed) {
  PreparedInstance p;
  if (c.hard) {
    const auto& h = *c.hard;
    HardInstance inst = [&] {
      switch (h.kind) {
        case HardInstanceKind::kStrongC1:
          if (!h.base_graph) throw ConfigError("c1 needs a base graph");
          return gen_hard_strong_c1(*h.base_graph, h.eps, c.horizon, seed);
        case HardInstanceKind::kStrongC2:
          return gen_hard_strong_c2(h.eps, c.horizon, h.num_actions, seed);
        case HardInstanceKind::kWeakC3:
          if (!h.base_graph) throw ConfigError("c3 needs a base graph");
          return gen_hard_weak_c3(*h.base_graph, h.eps, c.horizon, seed);
        case HardInstanceKind::kWeakC4:
          return gen_hard_weak_c4(h.eps, c.horizon, seed);
      }
      throw ConfigError("unknown hard instance");
    }();
    p.graph = std::move(inst.graph);
    p.losses = std::move(inst.losses);
    p.spec = std::move(inst.spec);
    return p;
  }
  p.graph = *c.graph;
  if (c.fixed_losses) {
    if (c.fixed_losses->num_actions() != p.graph.num_vertices()) throw ConfigError("loss table and graph disagree on K");
    p.losses = c.fixed_losses;
  } else {
    Rng loss_rng = make_stream(seed, Stream::kLoss);
    p.losses = std::make_shared<const LossTable>(make_losses(c.losses, c.horizon, p.graph.num_vertices(), loss_rng));
  }
  return p;
}

inline nlohmann::json to_json(const HardInstanceSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["eps"] = s.eps;
  j["T"] = s.horizon;
  j["beta"] = s.beta;
  j["beta_raw"] = s.beta_raw;
  j["beta_clamped"] = s.beta_clamped;
  j["z"] = s.z;
  j["good_set"] = s.good_set;
  if (s.kind == HardInstanceKind::kWeakC3) {
    j["m"] = s.m;
    j["m_target"] = s.m_target;
  }
  j["seed"] = s.seed;
  j["arm_means"] = s.arm_means;
  j["warnings"] = s.warnings;
  std::vector<std::vector<std::size_t>> edges;
  for (const auto& [a, b] : s.base_graph.edges()) edges.push_back({a, b});
  j["base_graph"] = {{"K", s.base_graph.num_vertices()}, {"edges", edges}};
  return j;
}

namespace detail {

inline nlohmann::json phi_json(const PhiValue& v) {
  nlohmann::json j;
  j["value"] = json_number(v.value);
  j["strong_branch"] = json_number(v.strong_branch);
  j["weak_branch"] = json_number(v.weak_branch);
  if (v.strong) j["eps_star_s"] = v.strong->eps, j["alpha_star"] = v.strong->parameter;
  if (v.weak) j["eps_star_w"] = v.weak->eps, j["delta_star"] = v.weak->parameter;
  return j;
}

inline void run_edge_catcher(const ExperimentConfig& c, Environment& env, Rng& rng, RegretTrace& tr) {
  EdgeCatcherOptions o;
  o.schedule = c.phi_schedule;
  o.constants = c.phi_constants;
  const EdgeCatcherReport rep = edge_catcher(env, rng, o);
  auto& j = tr.sidecar;
  j["tau_hat"] = rep.round_robin.tau_hat;
  j["eps_hat"] = json_number(rep.round_robin.eps_hat);
  j["rounds_consumed"] = rep.round_robin.rounds_consumed;
  j["stop_reason"] = to_string(rep.round_robin.stop_reason);
  j["phi_at_stop"] = json_number(rep.round_robin.phi_at_stop);
  j["phi_at_commit"] = phi_json(rep.phi_at_commit);
  j["regime"] = rep.regime ? nlohmann::json(to_string(*rep.regime)) : nlohmann::json(nullptr);
  j["eps_star"] = rep.eps_star;
  j["uniform_fallback"] = rep.uniform_fallback;
  j["zero_domination_commit"] = rep.zero_domination_commit;
  if (rep.block) {
    j["block_length"] = rep.block->plan.block_length;
    j["num_blocks"] = rep.block->plan.num_blocks;
    j["unobserved_estimates"] = rep.block->unobserved;
    j["arbitrary_rounds"] = rep.block->arbitrary_rounds;
  }
  j["warnings"] = rep.warnings;
}

inline void run_otcg(const ExperimentConfig& c, Environment& env, Rng& rng, RegretTrace& tr) {
  Otcg learner(env.num_actions(), env.horizon(), c.otcg);
  const std::size_t horizon = env.horizon();
  std::vector<double> psi(horizon), lambda(horizon), theta(horizon), gamma(horizon), eta(horizon), eps(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t a = learner.act(rng);
    const Phase phase = learner.phase() == OtcgPhase::kOptimistic ? Phase::kOptimistic : Phase::kCommitted;
    learner.observe(env.play(a, phase));
    const OtcgRoundInfo& info = learner.last_round();
    psi[t] = info.psi;
    lambda[t] = info.lambda;
    theta[t] = info.theta;
    gamma[t] = info.gamma;
    eta[t] = info.eta;
    eps[t] = info.eps_theta;
  }
  tr.columns = {{"psi", std::move(psi)},     {"lambda", std::move(lambda)}, {"theta", std::move(theta)},
                {"gamma", std::move(gamma)}, {"eta", std::move(eta)},       {"eps_theta", std::move(eps)}};
  auto& j = tr.sidecar;
  j["final_phase"] = to_string(learner.phase());
  if (const auto& cp = learner.commit_params()) {
    j["t_star"] = cp->t_star;
    j["eps_t_star"] = cp->eps_t_star;
    j["eps_delta_sigma"] = cp->eps_delta_sigma;
    j["delta_w"] = cp->delta_w;
    j["sigma"] = cp->sigma;
    j["commit_gamma"] = cp->gamma;
    j["commit_eta"] = cp->eta;
    j["g_star"] = to_json(cp->g_star);
    j["notes"] = cp->notes;
  } else {
    j["t_star"] = nullptr;
  }
  j["theta_max"] = json_number(learner.theta_max());
}

inline void run_exp3g(Regime regime, Environment& env, Rng& rng, RegretTrace& tr) {
  Exp3G policy(support(env.truth()), regime, env.horizon());
  while (env.remaining() > 0) {
    const std::size_t a = policy.draw(rng);
    const FeedbackEvent& ev = env.play(a, Phase::kPlay);
    policy.update(a, ev.observations);
  }
  auto& j = tr.sidecar;
  j["regime"] = to_string(regime);
  j["final_gamma"] = policy.gamma();
  j["final_eta"] = policy.eta();
  j["missing_observations"] = policy.missing_observations();
  j["zero_probability_events"] = policy.zero_probability_events();
  if (regime == Regime::kWeak) j["dominating_set"] = policy.config().dominating_set;
}

}  // namespace detail

inline RegretTrace run_one(const ExperimentConfig& c, std::uint64_t seed) {
  PreparedInstance inst = prepare_instance(c, seed);
  if (inst.losses->horizon() != c.horizon) throw ConfigError("loss table horizon differs from T");
  Environment env(inst.graph, inst.losses, c.mode, make_stream(seed, Stream::kGraph));
  Rng learner_rng = make_stream(seed, Stream::kLearner);
  RegretTrace tr;
  tr.seed = seed;
  tr.algorithm = to_string(c.algorithm);
  tr.num_actions = inst.graph.num_vertices();
  tr.table = inst.losses;
  tr.instance_digest = graph_digest(inst.graph) + ":" + inst.losses->digest();
  tr.sidecar["algorithm"] = tr.algorithm;
  tr.sidecar["seed"] = seed;
  tr.sidecar["K"] = tr.num_actions;
  tr.sidecar["T"] = c.horizon;
  tr.sidecar["mode"] = to_string(c.mode);
  tr.sidecar["instance_digest"] = tr.instance_digest;
  if (inst.spec) tr.sidecar["hard_instance"] = to_json(*inst.spec);

  switch (c.algorithm) {
    case Algorithm::kEdgeCatcher:
      detail::run_edge_catcher(c, env, learner_rng, tr);
      break;
    case Algorithm::kOtcg:
      detail::run_otcg(c, env, learner_rng, tr);
      break;
    case Algorithm::kExp3gStrong:
      detail::run_exp3g(Regime::kStrong, env, learner_rng, tr);
      break;
    case Algorithm::kExp3gWeak:
      detail::run_exp3g(Regime::kWeak, env, learner_rng, tr);
      break;
    case Algorithm::kUniformBaseline:
      while (env.remaining() > 0) env.play(uniform_index(learner_rng, env.num_actions()), Phase::kUniform);
      break;
  }
  if (env.remaining() != 0) throw InvariantError("learner did not consume the full horizon");
  tr.actions = env.actions();
  tr.losses = env.incurred();
  tr.phases = env.phases();
  tr.sidecar["final_regret"] = tr.final_regret();
  return tr;
}

// One trace per seed, in seed order regardless of the thread count.
inline std::vector<RegretTrace> run(const ExperimentConfig& c) {
  validate(c);
  const std::size_t n = c.seeds.size();
  std::vector<std::optional<RegretTrace>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = run_one(c, c.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(c.threads, n);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<RegretTrace> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct HorizonSample {
  std::size_t horizon = 0;
  std::vector<double> regrets;
};

struct SlopeFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  std::vector<double> means;
};

namespace detail {

inline bool ls_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return false;
  slope = sxy / sxx;
  intercept = my - slope * mx;
  return true;
}

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

// Least-squares slope of log(mean regret) against log(T), with a percentile
// bootstrap interval from resampling seeds within each horizon.
inline SlopeFit fit_slope(const std::vector<HorizonSample>& samples, std::size_t bootstrap = 1000,
                          std::uint64_t seed = 0, double level = 0.95) {
  if (samples.size() < 3) throw ArgumentError("slope fit needs at least 3 horizons");
  for (const auto& s : samples) {
    if (s.regrets.size() < 10) throw ArgumentError("slope fit needs at least 10 seeds per horizon");
    if (s.horizon == 0) throw ArgumentError("horizon must be positive");
  }
  SlopeFit fit;
  std::vector<double> x, y;
  for (const auto& s : samples) {
    const double m = detail::mean_of(s.regrets);
    fit.means.push_back(m);
    if (!(m > 0.0)) fit.degenerate = true;
    x.push_back(std::log(static_cast<double>(s.horizon)));
    y.push_back(std::log(m));
  }
  if (fit.degenerate) return fit;
  if (!detail::ls_fit(x, y, fit.slope, fit.intercept)) throw ArgumentError("slope fit needs distinct horizons");

  Rng rng = make_stream(seed, Stream::kBootstrap);
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  std::vector<double> yb(samples.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    bool ok = true;
    for (std::size_t h = 0; h < samples.size(); ++h) {
      const auto& r = samples[h].regrets;
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r[uniform_index(rng, r.size())];
      const double m = s / static_cast<double>(r.size());
      if (!(m > 0.0)) {
        ok = false;
        break;
      }
      yb[h] = std::log(m);
    }
    double sl = 0.0, ic = 0.0;
    if (ok && detail::ls_fit(x, yb, sl, ic)) slopes.push_back(sl);
  }
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    const double alpha = (1.0 - level) / 2.0;
    auto at = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(slopes.size() - 1) + 0.5));
      return slopes[std::min(idx, slopes.size() - 1)];
    };
    fit.ci_low = at(alpha);
    fit.ci_high = at(1.0 - alpha);
  }
  return fit;
}

// Groups final regrets of traces by horizon.
inline SlopeFit slope(const std::vector<std::vector<RegretTrace>>& by_horizon, std::size_t bootstrap = 1000) {
  std::vector<HorizonSample> samples;
  for (const auto& traces : by_horizon) {
    if (traces.empty()) throw ArgumentError("empty horizon group");
    HorizonSample s;
    s.horizon = traces.front().horizon();
    for (const auto& tr : traces) s.regrets.push_back(tr.final_regret());
    samples.push_back(std::move(s));
  }
  return fit_slope(samples, bootstrap);
}

inline std::string trace_csv(const RegretTrace& tr) {
  std::string out;
  out += "# ";
  out += kTraceFormat;
  out += " algorithm=" + tr.algorithm + " seed=" + std::to_string(tr.seed) + " K=" + std::to_string(tr.num_actions) +
         " T=" + std::to_string(tr.horizon()) + " instance=" + tr.instance_digest + "\n";
  out += "t,action,loss,cum_loss,phase";
  for (const auto& [name, _] : tr.columns) out += "," + name;
  out += "\n";
  double cum = 0.0;
  for (std::size_t t = 0; t < tr.horizon(); ++t) {
    cum += tr.losses[t];
    out += std::to_string(t + 1) + "," + std::to_string(tr.actions[t]) + "," + format_double(tr.losses[t]) + "," +
           format_double(cum) + "," + to_string(tr.phases[t]);
    for (const auto& [_, values] : tr.columns) out += "," + format_double(values[t]);
    out += "\n";
  }
  return out;
}

inline nlohmann::json dump_instance(const PreparedInstance& inst, std::uint64_t seed, bool full_table) {
  nlohmann::json j;
  j["format"] = kInstanceFormat;
  j["seed"] = seed;
  j["graph"] = to_json(inst.graph);
  j["T"] = inst.losses->horizon();
  j["loss_digest"] = inst.losses->digest();
  if (inst.spec) j["hard_instance"] = to_json(*inst.spec);
  if (full_table) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < inst.losses->horizon(); ++t) {
      const auto r = inst.losses->row(t);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j["losses"] = std::move(rows);
  }
  return j;
}

// Reads back a dumped instance. The loss table must be present in full.
inline PreparedInstance load_instance(const nlohmann::json& j) {
  if (j.value("format", "") != kInstanceFormat) throw ConfigError("not an instance dump");
  if (!j.contains("losses")) throw ConfigError("instance dump lacks the full loss table (dump with --full-table)");
  PreparedInstance p;
  p.graph = stochastic_graph_from_json(j.at("graph"));
  const auto rows = j.at("losses").get<std::vector<std::vector<double>>>();
  const std::size_t k = p.graph.num_vertices();
  std::vector<double> flat;
  flat.reserve(rows.size() * k);
  for (const auto& r : rows) {
    if (r.size() != k) throw ConfigError("loss row has wrong length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  p.losses = std::make_shared<const LossTable>(rows.size(), k, std::move(flat));
  if (p.losses->digest() != j.value("loss_digest", p.losses->digest())) {
    throw ConfigError("loss table does not match its digest");
  }
  return p;
}

}  // namespace sfg
