#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "svc/commit_query.hpp"
#include "svc/error.hpp"
#include "svc/marginals.hpp"
#include "svc/model.hpp"
#include "svc/mvc.hpp"
#include "svc/parallel.hpp"

namespace svc {

/// Exact law of one algorithm's output over every served realization and
/// every outcome of its internal hallucinations.
struct ExactRunStats {
  long double expected_size = 0;
  std::vector<long double> inclusion;  // Pr[v in S]
  long double expected_queries = 0;
  long double total_weight = 0;
  std::size_t leaves = 0;
  std::size_t uncovered_leaves = 0;
  std::size_t commit_outcomes = 0;  // distinct committed sets
  std::optional<double> tau{};
  double eps_effective = 0;
};

namespace detail {

using MaskKey = std::vector<std::uint64_t>;

template <class Bits>
MaskKey key_of(const Bits& bits) {
  MaskKey k;
  boost::to_block_range(bits, std::back_inserter(k));
  return k;
}

struct WeightedCommit {
  VertexSet committed;
  long double weight;
};

/// Law of P. threshold commits deterministically; hallucinate, main and analysis
/// commit a function of C = MVC(G1), so outcomes of G1 with the same P merge.
template <CoverProvider Oracle>
std::vector<WeightedCommit> commit_law(Algorithm alg, const StochasticModel& model, const std::vector<double>& c,
                                       double tau, double eps, const Oracle& oracle) {
  const auto& g = model.graph();
  if (alg == Algorithm::threshold) return {{threshold_commit(c, eps), 1.0L}};
  std::map<MaskKey, std::size_t> index;
  std::vector<WeightedCommit> out;
  std::vector<CompensatedSum> weight;
  const auto law = model.law(Observation::none(g.edge_count()), g.full_mask());
  for (std::size_t i = 0; i < law.size(); ++i) {
    const VertexSet cover = oracle.cover(g, law.outcome(i), 0).vertices;
    VertexSet p = alg == Algorithm::hallucinate ? cover : main_commit(c, tau, eps, cover);
    auto [it, fresh] = index.try_emplace(key_of(p.bits()), out.size());
    if (fresh) {
      out.push_back({std::move(p), 0});
      weight.emplace_back();
    }
    weight[it->second].add(law.weight(i));
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].weight = weight[k].value();
  return out;
}

/// Distribution of |S| for a run that committed P and observed `seen` on H,
/// over the conditional completion of G \ H. Counts uncovered leaves.
template <CoverProvider Oracle>
std::vector<long double> completion_size_law(const StochasticModel& model, const Oracle& oracle,
                                             const VertexSet& p, const EdgeMask& h, const EdgeMask& seen,
                                             std::size_t& leaves, std::size_t& uncovered) {
  const auto& g = model.graph();
  std::vector<long double> dist(g.vertex_count() + 1, 0.0L);
  const Observation obs{h, seen};
  const auto law = model.law(obs, ~h);
  for (std::size_t j = 0; j < law.size(); ++j) {
    const VertexSet s = p | oracle.cover(g, seen | law.outcome(j), 0).vertices;
    ++leaves;
    if (!is_vertex_cover(g, seen, s)) ++uncovered;
    dist[s.size()] += law.weight(j);
  }
  return dist;
}

inline bool commit_covers_rest(const BaseGraph& g, const VertexSet& p, const EdgeMask& h) {
  return is_vertex_cover(g, ~h, p);
}

inline void require_canonical(bool canonical) {
  if (!canonical) fail(ErrorKind::NonCanonicalOracle, "exact evaluation needs a canonical oracle");
}

}  // namespace detail

/// Exact evaluation of hallucinate, threshold, main or analysis. Every outcome of G1, the
/// served realization of H and the completion of G \ H is visited; outcomes
/// of G1 leading to the same committed set are merged before the later
/// stages, which depend on G1 only through P.
template <CoverProvider Oracle>
ExactRunStats exact_run(Algorithm alg, const StochasticModel& model, const MarginalProfile& profile, double eps,
                        const Oracle& oracle, std::size_t max_uncertain = kMaxEnumeratedEdges) {
  if (alg == Algorithm::best_of_two) fail(ErrorKind::ParameterOutOfRange, "use exact_best_of_two");
  detail::require_canonical(oracle.canonical());
  check_enumerable(model, max_uncertain);
  const auto& g = model.graph();
  ExactRunStats st;
  double eps_eff = eps;
  double tau = 0.5;
  if (alg != Algorithm::hallucinate) {
    check_profile(model, profile);
    check_eps(eps);
    if (alg == Algorithm::main || alg == Algorithm::analysis) {
      eps_eff = effective_eps(profile, eps);
      tau = select_tau(profile.vertex, eps_eff);
      st.tau = tau;
    }
  }
  if (alg != Algorithm::main) check_completion(model);
  st.eps_effective = eps_eff;

  const auto commits = detail::commit_law(alg, model, profile.vertex, tau, eps_eff, oracle);
  st.commit_outcomes = commits.size();
  std::vector<CompensatedSum> inclusion(g.vertex_count());
  CompensatedSum size, queries, total;
  for (const auto& [p, wp] : commits) {
    const EdgeMask h = uncovered_edges(g, p);
    queries.add(wp * static_cast<long double>(h.count()));
    const bool rest_ok = detail::commit_covers_rest(g, p, h);
    const auto served = model.law(Observation::none(g.edge_count()), h);
    for (std::size_t i = 0; i < served.size(); ++i) {
      const EdgeMask seen = served.outcome(i);
      const long double wi = wp * served.weight(i);
      auto leaf = [&](const VertexSet& s, long double w) {
        ++st.leaves;
        if (!rest_ok || !is_vertex_cover(g, seen, s)) ++st.uncovered_leaves;
        for (Vertex v : s.members()) inclusion[v].add(w);
        size.add(w * static_cast<long double>(s.size()));
        total.add(w);
      };
      if (alg == Algorithm::main) {
        leaf(p | oracle.cover(g, seen, 0).vertices, wi);
        continue;
      }
      const auto rest = model.law(Observation{h, seen}, ~h);
      for (std::size_t j = 0; j < rest.size(); ++j) {
        leaf(p | oracle.cover(g, seen | rest.outcome(j), 0).vertices, wi * rest.weight(j));
      }
    }
  }
  st.expected_size = size.value();
  st.expected_queries = queries.value();
  st.total_weight = total.value();
  for (auto& s : inclusion) st.inclusion.push_back(s.value());
  return st;
}

/// Exact E[min(|S1|, |S2|)] for best_of_two. Given the served realization
/// on H1 and H2 the two runs' completions are independent, so each side's
/// size law is computed once per observation and the two are combined.
template <CoverProvider Oracle>
ExactRunStats exact_best_of_two(const StochasticModel& model, const MarginalProfile& profile, double eps,
                                const Oracle& oracle, std::size_t max_uncertain = kMaxEnumeratedEdges) {
  detail::require_canonical(oracle.canonical());
  check_enumerable(model, max_uncertain);
  check_profile(model, profile);
  check_eps(eps);
  check_completion(model);
  const auto& g = model.graph();
  const std::size_t n = g.vertex_count();
  ExactRunStats st;
  st.eps_effective = eps;

  const VertexSet p2 = threshold_commit(profile.vertex, eps);
  const EdgeMask h2 = uncovered_edges(g, p2);
  std::map<detail::MaskKey, std::vector<long double>> law2;
  const auto commits = detail::commit_law(Algorithm::hallucinate, model, profile.vertex, 0.5, eps, oracle);
  st.commit_outcomes = commits.size();
  CompensatedSum size, queries, total;
  for (const auto& [p1, w1] : commits) {
    const EdgeMask h1 = uncovered_edges(g, p1);
    if (!detail::commit_covers_rest(g, p1, h1) || !detail::commit_covers_rest(g, p2, h2)) ++st.uncovered_leaves;
    const EdgeMask both = h1 | h2;
    queries.add(w1 * static_cast<long double>(both.count()));
    std::map<detail::MaskKey, std::vector<long double>> law1;
    const auto served = model.law(Observation::none(g.edge_count()), both);
    for (std::size_t i = 0; i < served.size(); ++i) {
      const EdgeMask y = served.outcome(i);
      const long double wy = w1 * served.weight(i);
      const EdgeMask y1 = y & h1;
      const EdgeMask y2 = y & h2;
      auto it1 = law1.find(detail::key_of(y1));
      if (it1 == law1.end()) {
        it1 = law1.emplace(detail::key_of(y1), detail::completion_size_law(model, oracle, p1, h1, y1, st.leaves,
                                                                           st.uncovered_leaves)).first;
      }
      auto it2 = law2.find(detail::key_of(y2));
      if (it2 == law2.end()) {
        it2 = law2.emplace(detail::key_of(y2), detail::completion_size_law(model, oracle, p2, h2, y2, st.leaves,
                                                                           st.uncovered_leaves)).first;
      }
      const auto& d1 = it1->second;
      const auto& d2 = it2->second;
      long double e_min = 0;
      for (std::size_t a = 0; a <= n; ++a) {
        if (d1[a] == 0) continue;
        for (std::size_t b = 0; b <= n; ++b) e_min += d1[a] * d2[b] * static_cast<long double>(std::min(a, b));
      }
      size.add(wy * e_min);
      total.add(wy);
    }
  }
  st.expected_size = size.value();
  st.expected_queries = queries.value();
  st.total_weight = total.value();
  return st;
}

template <CoverProvider Oracle>
ExactRunStats exact_algorithm(Algorithm alg, const StochasticModel& model, const MarginalProfile& profile,
                              double eps, const Oracle& oracle, std::size_t max_uncertain = kMaxEnumeratedEdges) {
  if (alg == Algorithm::best_of_two) return exact_best_of_two(model, profile, eps, oracle, max_uncertain);
  return exact_run(alg, model, profile, eps, oracle, max_uncertain);
}

}  // namespace svc
