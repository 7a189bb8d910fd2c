#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/random.hpp"

namespace svc {

/// Edges whose realization is known (domain) and their values.
struct Observation {
  EdgeMask domain;
  EdgeMask values;

  static Observation none(std::size_t edge_count) { return {EdgeMask(edge_count), EdgeMask(edge_count)}; }
};

/// One outcome of the correlated block: the set of correlated edges present.
struct Scenario {
  double probability = 1.0;
  std::optional<Rational> exact{};
  EdgeMask present;

  long double enumeration_probability() const {
    return exact ? exact->exact_value() : static_cast<long double>(probability);
  }
};

/// Sampler for a correlated block without an explicit scenario list. It may
/// look at the realized independent edges.
using CorrelatedSampler = std::function<EdgeMask(const EdgeMask& independent_present, std::uint64_t seed)>;

inline constexpr double kDefaultCorrelationBudget = 2.0;

/// Exact law of a set of target edges given an observation. Outcome i is the
/// pair (correlated group i / 2^k, independent pattern i % 2^k) where k is the
/// number of target independent edges with p < 1. Outcomes are generated on
/// demand so replaying an enumeration does not materialize the whole law.
class ConditionalLaw {
 public:
  std::size_t size() const noexcept { return groups_.size() << free_.size(); }

  EdgeMask outcome(std::size_t i) const {
    const std::size_t pattern = i & ((std::size_t{1} << free_.size()) - 1);
    EdgeMask out = fixed_;
    out |= groups_[i >> free_.size()].first;
    for (std::size_t j = 0; j < free_.size(); ++j) {
      if (pattern >> j & 1U) out.set(free_[j]);
    }
    return out;
  }

  long double weight(std::size_t i) const {
    const std::size_t pattern = i & ((std::size_t{1} << free_.size()) - 1);
    long double w = groups_[i >> free_.size()].second;
    for (std::size_t j = 0; j < free_.size(); ++j) w *= (pattern >> j & 1U) ? present_[j] : absent_[j];
    return w;
  }

 private:
  friend class StochasticModel;
  EdgeMask fixed_;
  std::vector<std::size_t> free_;
  std::vector<long double> present_;
  std::vector<long double> absent_;
  std::vector<std::pair<EdgeMask, long double>> groups_;
};

/// Random-graph law over a base graph: independent edges (E1) plus an
/// optional correlated block (E2). A model without correlated edges is the
/// fully independent model. Correlated edges carry base probability 1, their
/// existence given the scenario.
class StochasticModel {
 public:
  StochasticModel() = default;

  static StochasticModel independent(BaseGraph g) {
    StochasticModel m;
    m.correlated_ = EdgeMask(g.edge_count());
    m.graph_ = std::move(g);
    return m;
  }

  static StochasticModel correlated(BaseGraph g, EdgeMask correlated_edges, std::vector<Scenario> scenarios,
                                    double budget = kDefaultCorrelationBudget) {
    StochasticModel m = prepare(std::move(g), std::move(correlated_edges), budget);
    if (scenarios.empty()) fail(ErrorKind::ValidationError, "correlated block needs at least one scenario");
    long double total = 0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      auto& sc = scenarios[s];
      if (sc.exact) sc.probability = sc.exact->value();
      if (!(sc.probability > 0.0 && sc.probability <= 1.0)) {
        fail(ErrorKind::ValidationError, "scenario " + std::to_string(s) + " probability out of (0,1]");
      }
      if (sc.present.size() != m.graph_.edge_count() || !sc.present.is_subset_of(m.correlated_)) {
        fail(ErrorKind::ValidationError, "scenario " + std::to_string(s) + " realizes a non-correlated edge");
      }
      total += sc.enumeration_probability();
    }
    if (std::fabs(static_cast<double>(total - 1.0L)) > 1e-12) {
      fail(ErrorKind::ValidationError, "scenario probabilities sum to " + std::to_string(static_cast<double>(total)));
    }
    m.scenarios_ = std::move(scenarios);
    return m;
  }

  static StochasticModel correlated(BaseGraph g, EdgeMask correlated_edges, CorrelatedSampler sampler,
                                    double budget = kDefaultCorrelationBudget) {
    StochasticModel m = prepare(std::move(g), std::move(correlated_edges), budget);
    m.sampler_ = std::move(sampler);
    return m;
  }

  const BaseGraph& graph() const noexcept { return graph_; }
  std::size_t vertex_count() const noexcept { return graph_.vertex_count(); }
  std::size_t edge_count() const noexcept { return graph_.edge_count(); }
  const EdgeMask& correlated_edges() const noexcept { return correlated_; }
  bool is_independent() const noexcept { return correlated_.none(); }
  const std::vector<Scenario>& scenarios() const noexcept { return scenarios_; }
  double correlation_budget() const noexcept { return budget_; }

  /// True when the law is an explicit finite mixture, which is what exact
  /// enumeration and conditional completion need.
  bool has_scenario_space() const noexcept { return is_independent() || !scenarios_.empty(); }
  bool supports_conditional_completion() const noexcept { return has_scenario_space(); }

  /// Unconditional probability that edge e is present.
  double marginal(std::size_t e) const {
    if (!correlated_.test(e)) return graph_.probability(e);
    if (scenarios_.empty()) fail(ErrorKind::ScenarioSpaceUnavailable, "marginal of a sampler-defined edge");
    double total = 0;
    for (const auto& sc : scenarios_) {
      if (sc.present.test(e)) total += sc.probability;
    }
    return total;
  }

  /// Independent edges with p < 1; the exponent of the enumeration size.
  std::size_t uncertain_edge_count() const {
    std::size_t k = 0;
    for (std::size_t e = 0; e < edge_count(); ++e) {
      if (!correlated_.test(e) && graph_.probability(e) < 1.0) ++k;
    }
    return k;
  }

  /// Independent edges use the counter scheme of sample_realization; the
  /// correlated block draws from stream index m.
  Realization sample(std::uint64_t seed) const {
    Realization r{EdgeMask(edge_count())};
    for (std::size_t e = 0; e < edge_count(); ++e) {
      if (!correlated_.test(e) && unit_uniform(seed, e) < graph_.probability(e)) r.present.set(e);
    }
    if (is_independent()) return r;
    if (sampler_) {
      EdgeMask extra = sampler_(r.present, mix_seed(seed, edge_count())) & correlated_;
      r.present |= extra;
      return r;
    }
    const double u = unit_uniform(seed, edge_count());
    double acc = 0;
    std::size_t chosen = scenarios_.size() - 1;
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
      acc += scenarios_[s].probability;
      if (u < acc) {
        chosen = s;
        break;
      }
    }
    r.present |= scenarios_[chosen].present;
    r.scenario = chosen;
    return r;
  }

  /// Draws the target edges conditioned on an observation. Returns a mask
  /// over all edges with bits only inside `target`.
  EdgeMask complete(const Observation& obs, const EdgeMask& target, std::uint64_t seed) const {
    EdgeMask out(edge_count());
    if (obs.domain.none()) {
      if (!is_independent() && sampler_) return sample(seed).present & target;
    } else if (!supports_conditional_completion()) {
      fail(ErrorKind::ConditionalCompletionUnsupported, "model has no scenario space to condition on");
    }
    for (auto e = target.find_first(); e != EdgeMask::npos; e = target.find_next(e)) {
      if (!correlated_.test(e) && unit_uniform(seed, e) < graph_.probability(e)) out.set(e);
    }
    if (is_independent() || !target.intersects(correlated_)) return out;
    const auto posterior = consistent_scenarios(obs);
    long double total = 0;
    for (auto s : posterior) total += scenarios_[s].enumeration_probability();
    const long double u = static_cast<long double>(unit_uniform(seed, edge_count())) * total;
    long double acc = 0;
    std::size_t chosen = posterior.back();
    for (auto s : posterior) {
      acc += scenarios_[s].enumeration_probability();
      if (u < acc) {
        chosen = s;
        break;
      }
    }
    out |= scenarios_[chosen].present & target;
    return out;
  }

  /// Exact conditional law of the target edges given an observation.
  ConditionalLaw law(const Observation& obs, const EdgeMask& target) const {
    if (!has_scenario_space()) {
      fail(ErrorKind::ScenarioSpaceUnavailable, "exact law needs an explicit scenario list");
    }
    ConditionalLaw law;
    law.fixed_ = EdgeMask(edge_count());
    for (auto e = target.find_first(); e != EdgeMask::npos; e = target.find_next(e)) {
      if (correlated_.test(e)) continue;
      if (graph_.probability(e) >= 1.0) {
        law.fixed_.set(e);
      } else {
        law.free_.push_back(e);
        law.present_.push_back(graph_.enumeration_probability(e));
        law.absent_.push_back(graph_.enumeration_complement(e));
      }
    }
    if (law.free_.size() > 40) fail(ErrorKind::InstanceTooLarge, "too many free edges to enumerate");
    const EdgeMask correlated_target = target & correlated_;
    if (correlated_target.none()) {
      law.groups_.emplace_back(EdgeMask(edge_count()), 1.0L);
      return law;
    }
    const auto posterior = consistent_scenarios(obs);
    long double total = 0;
    for (auto s : posterior) total += scenarios_[s].enumeration_probability();
    for (auto s : posterior) {
      EdgeMask pattern = scenarios_[s].present & correlated_target;
      const long double w = scenarios_[s].enumeration_probability() / total;
      auto it = std::find_if(law.groups_.begin(), law.groups_.end(),
                             [&](const auto& g) { return g.first == pattern; });
      if (it == law.groups_.end()) {
        law.groups_.emplace_back(std::move(pattern), w);
      } else {
        it->second += w;
      }
    }
    return law;
  }

  /// Visits every realization with positive probability:
  /// visit(const EdgeMask& present, std::optional<std::size_t> scenario, long double weight).
  template <class Visit>
  void for_each_realization(Visit&& visit) const {
    if (!has_scenario_space()) {
      fail(ErrorKind::ScenarioSpaceUnavailable, "enumeration needs an explicit scenario list");
    }
    EdgeMask independent_part = ~correlated_;
    const ConditionalLaw base = law(Observation::none(edge_count()), independent_part);
    const auto visit_scenario = [&](const EdgeMask* extra, std::optional<std::size_t> s, long double prior) {
      for (std::size_t i = 0; i < base.size(); ++i) {
        EdgeMask present = base.outcome(i);
        if (extra) present |= *extra;
        visit(static_cast<const EdgeMask&>(present), s, prior * base.weight(i));
      }
    };
    if (is_independent()) {
      visit_scenario(nullptr, std::nullopt, 1.0L);
      return;
    }
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
      visit_scenario(&scenarios_[s].present, s, scenarios_[s].enumeration_probability());
    }
  }

 private:
  static StochasticModel prepare(BaseGraph g, EdgeMask correlated_edges, double budget) {
    if (correlated_edges.size() != g.edge_count()) {
      fail(ErrorKind::ValidationError, "correlated edge mask has the wrong length");
    }
    if (static_cast<double>(correlated_edges.count()) > budget * static_cast<double>(g.vertex_count())) {
      fail(ErrorKind::ValidationError, "correlated block of " + std::to_string(correlated_edges.count()) +
                                           " edges exceeds budget " + std::to_string(budget) + " * n");
    }
    for (auto e = correlated_edges.find_first(); e != EdgeMask::npos; e = correlated_edges.find_next(e)) {
      if (g.probability(e) != 1.0) {
        fail(ErrorKind::ValidationError, "correlated edge " + std::to_string(e) + " must carry probability 1");
      }
    }
    StochasticModel m;
    m.graph_ = std::move(g);
    m.correlated_ = std::move(correlated_edges);
    m.budget_ = budget;
    return m;
  }

  std::vector<std::size_t> consistent_scenarios(const Observation& obs) const {
    const EdgeMask seen = obs.domain & correlated_;
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < scenarios_.size(); ++s) {
      if (((scenarios_[s].present ^ obs.values) & seen).none()) out.push_back(s);
    }
    if (out.empty()) fail(ErrorKind::ParameterOutOfRange, "observation is impossible under the model");
    return out;
  }

  BaseGraph graph_;
  EdgeMask correlated_;
  std::vector<Scenario> scenarios_;
  CorrelatedSampler sampler_;
  double budget_ = kDefaultCorrelationBudget;
};

}  // namespace svc
