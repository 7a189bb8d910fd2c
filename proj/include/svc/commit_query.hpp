#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/marginals.hpp"
#include "svc/model.hpp"
#include "svc/mvc.hpp"
#include "svc/random.hpp"

namespace svc {

enum class Algorithm { hallucinate, threshold, best_of_two, main, analysis };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms{Algorithm::hallucinate, Algorithm::threshold,
                                                         Algorithm::best_of_two, Algorithm::main,
                                                         Algorithm::analysis};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::hallucinate: return "hallucinate";
    case Algorithm::threshold: return "threshold";
    case Algorithm::best_of_two: return "best_of_two";
    case Algorithm::main: return "main";
    case Algorithm::analysis: return "analysis";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

/// Committed vertices P and the edges of H = G[V \ P], which are the only
/// edges a run may query.
struct CommitPlan {
  VertexSet committed;
  EdgeMask query_edges;
};

inline CommitPlan make_plan(const BaseGraph& g, VertexSet committed) {
  EdgeMask h = uncovered_edges(g, committed);
  return {std::move(committed), std::move(h)};
}

struct RunResult {
  Algorithm algorithm = Algorithm::main;
  VertexSet cover;
  VertexSet committed;
  EdgeMask queried;
  std::size_t queried_edges = 0;
  std::uint64_t realization_seed = 0;
  std::optional<double> tau{};
  double eps = 0;
  double eps_effective = 0;
  std::optional<VertexSet> hallucinated_cover{};      // C = MVC(G1)
  std::optional<std::array<std::size_t, 2>> sizes{};  // best_of_two: |S| of each component run
  std::vector<std::string> warnings;
};

inline constexpr double kEpsAdvisedMax = 0.1;

inline std::vector<std::string> check_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorKind::ParameterOutOfRange, "eps must lie in (0, 0.5)");
  std::vector<std::string> warnings;
  if (eps >= kEpsAdvisedMax) warnings.push_back("eps=" + std::to_string(eps) + " is outside the advised range (0, 0.1)");
  return warnings;
}

inline void check_profile(const StochasticModel& model, const MarginalProfile& profile) {
  if (profile.vertex.size() != model.vertex_count()) {
    fail(ErrorKind::ParameterOutOfRange, "marginal profile does not match the model's vertex count");
  }
}

inline void check_completion(const StochasticModel& model) {
  if (!model.supports_conditional_completion()) {
    fail(ErrorKind::ConditionalCompletionUnsupported, "algorithm hallucinates G \\ H conditioned on the queries");
  }
}

/// Queries every edge of G[V \ P] in `served` and returns P plus the oracle's cover of what was found.
template <CoverProvider Oracle>
RunResult commit_then_query(const BaseGraph& g, const VertexSet& committed, const Realization& served,
                            const Oracle& oracle, std::uint64_t oracle_seed = 0) {
  RunResult r;
  r.committed = committed;
  r.queried = uncovered_edges(g, committed);
  r.queried_edges = r.queried.count();
  r.cover = committed | oracle.cover(g, served.present & r.queried, oracle_seed).vertices;
  return r;
}

/// Smallest grid point tau in [0.5, 1] with sum_{c>tau} c <= sum_{c<1-tau-eps} c.
/// The grid holds the breakpoints of both step functions and the midpoints between them.
inline double select_tau(const std::vector<double>& c, double eps) {
  std::vector<double> points{0.5, 1.0};
  for (double x : c) {
    for (double b : {x, 1.0 - x - eps}) {
      if (b >= 0.5 && b <= 1.0) points.push_back(b);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<double> grid;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) grid.push_back(0.5 * (points[i - 1] + points[i]));
    grid.push_back(points[i]);
  }
  auto feasible = [&](double tau) {
    long double high = 0, low = 0;
    const double lower = 1.0 - tau - eps;
    for (double x : c) {
      if (x > tau) high += x;
      if (x < lower) low += x;
    }
    return high <= low;
  };
  for (double tau : grid) {
    if (feasible(tau)) return tau;
  }
  return 1.0;
}

/// P = {c_v >= 0.5 - eps}.
inline VertexSet threshold_commit(const std::vector<double>& c, double eps) {
  VertexSet p(c.size());
  for (Vertex v = 0; v < c.size(); ++v) {
    if (c[v] >= 0.5 - eps) p.insert(v);
  }
  return p;
}

/// P = {c_v > tau} plus the band [1 - tau - eps, tau] restricted to C.
inline VertexSet main_commit(const std::vector<double>& c, double tau, double eps, const VertexSet& hallucinated) {
  VertexSet p(c.size());
  const double lower = 1.0 - tau - eps;
  for (Vertex v = 0; v < c.size(); ++v) {
    if (c[v] > tau || (c[v] >= lower && c[v] <= tau && hallucinated.contains(v))) p.insert(v);
  }
  return p;
}

/// eps used by main and analysis: halved for an estimated profile.
inline double effective_eps(const MarginalProfile& profile, double eps) {
  return profile.is_estimated() ? eps / 2 : eps;
}

namespace detail {

/// Stream layout under one run's internal seed.
enum Stream : std::uint64_t { stream_g1 = 1, stream_completion = 2, stream_commit_oracle = 3, stream_final_oracle = 4 };

/// S = P plus the oracle cover of the queried edges and a completion of G \ H
/// drawn conditioned on them.
template <CoverProvider Oracle>
void finish_with_completion(const StochasticModel& model, const Oracle& oracle, const Realization& served,
                            std::uint64_t internal, RunResult& r) {
  const auto& g = model.graph();
  const Observation obs{r.queried, served.present & r.queried};
  const EdgeMask rest = ~r.queried;
  const EdgeMask completed = obs.values | model.complete(obs, rest, derive_seed(internal, stream_completion));
  r.cover = r.committed | oracle.cover(g, completed, derive_seed(internal, stream_final_oracle)).vertices;
}

template <CoverProvider Oracle>
VertexSet first_hallucination(const StochasticModel& model, const Oracle& oracle, std::uint64_t internal) {
  const auto& g = model.graph();
  const EdgeMask g1 = model.complete(Observation::none(g.edge_count()), g.full_mask(),
                                     derive_seed(internal, stream_g1));
  return oracle.cover(g, g1, derive_seed(internal, stream_commit_oracle)).vertices;
}

inline void set_plan(const BaseGraph& g, VertexSet committed, RunResult& r) {
  auto plan = make_plan(g, std::move(committed));
  r.committed = std::move(plan.committed);
  r.queried = std::move(plan.query_edges);
  r.queried_edges = r.queried.count();
}

}  // namespace detail

/// The served realization and internal stream a convenience overload derives from one seed.
struct RunSeeds {
  Realization served;
  std::uint64_t internal = 0;
  std::uint64_t realization_seed = 0;
};

inline RunSeeds seeds_for(const StochasticModel& model, std::uint64_t seed) {
  const auto rs = derive_seed(seed, 0);
  return {model.sample(rs), derive_seed(seed, 1), rs};
}

/// P = MVC(G1); S = P plus MVC(H* with a hallucinated G \ H).
template <CoverProvider Oracle>
RunResult alg_hallucinate(const StochasticModel& model, const Oracle& oracle, const Realization& served,
                          std::uint64_t internal) {
  check_completion(model);
  RunResult r;
  r.algorithm = Algorithm::hallucinate;
  auto c = detail::first_hallucination(model, oracle, internal);
  r.hallucinated_cover = c;
  detail::set_plan(model.graph(), std::move(c), r);
  detail::finish_with_completion(model, oracle, served, internal, r);
  return r;
}

/// P = {c_v >= 0.5 - eps}; completion as in alg_hallucinate.
template <CoverProvider Oracle>
RunResult alg_threshold(const StochasticModel& model, const MarginalProfile& profile, double eps,
                        const Oracle& oracle, const Realization& served, std::uint64_t internal) {
  check_profile(model, profile);
  auto warnings = check_eps(eps);
  check_completion(model);
  RunResult r;
  r.algorithm = Algorithm::threshold;
  r.eps = r.eps_effective = eps;
  r.warnings = std::move(warnings);
  detail::set_plan(model.graph(), threshold_commit(profile.vertex, eps), r);
  detail::finish_with_completion(model, oracle, served, internal, r);
  return r;
}

template <CoverProvider Oracle>
RunResult alg_main_or_analysis(Algorithm which, const StochasticModel& model, const MarginalProfile& profile,
                               double eps, const Oracle& oracle, const Realization& served, std::uint64_t internal) {
  check_profile(model, profile);
  auto warnings = check_eps(eps);
  if (which == Algorithm::analysis) check_completion(model);
  RunResult r;
  r.algorithm = which;
  r.eps = eps;
  r.eps_effective = effective_eps(profile, eps);
  r.warnings = std::move(warnings);
  r.tau = select_tau(profile.vertex, r.eps_effective);
  auto c = detail::first_hallucination(model, oracle, internal);
  detail::set_plan(model.graph(), main_commit(profile.vertex, *r.tau, r.eps_effective, c), r);
  r.hallucinated_cover = std::move(c);
  if (which == Algorithm::main) {
    r.cover = r.committed |
              oracle.cover(model.graph(), served.present & r.queried, derive_seed(internal, detail::stream_final_oracle))
                  .vertices;
  } else {
    detail::finish_with_completion(model, oracle, served, internal, r);
  }
  return r;
}

/// Band vertices join P when they appear in C; S = P plus MVC(H*).
template <CoverProvider Oracle>
RunResult alg_main(const StochasticModel& model, const MarginalProfile& profile, double eps, const Oracle& oracle,
                   const Realization& served, std::uint64_t internal) {
  return alg_main_or_analysis(Algorithm::main, model, profile, eps, oracle, served, internal);
}

/// P as in alg_main; S = P plus MVC(H* with a hallucinated G \ H).
template <CoverProvider Oracle>
RunResult alg_analysis(const StochasticModel& model, const MarginalProfile& profile, double eps,
                       const Oracle& oracle, const Realization& served, std::uint64_t internal) {
  return alg_main_or_analysis(Algorithm::analysis, model, profile, eps, oracle, served, internal);
}

/// hallucinate and threshold on the same served realization; keeps the smaller cover.
template <CoverProvider Oracle>
RunResult best_of_two(const StochasticModel& model, const MarginalProfile& profile, double eps,
                      const Oracle& oracle, const Realization& served, std::uint64_t internal) {
  auto a = alg_hallucinate(model, oracle, served, derive_seed(internal, 11));
  auto b = alg_threshold(model, profile, eps, oracle, served, derive_seed(internal, 12));
  const std::array<std::size_t, 2> sizes{a.cover.size(), b.cover.size()};
  EdgeMask queried = a.queried | b.queried;
  RunResult r = sizes[1] < sizes[0] ? std::move(b) : std::move(a);
  r.algorithm = Algorithm::best_of_two;
  r.queried = std::move(queried);
  r.queried_edges = r.queried.count();
  r.sizes = sizes;
  r.eps = r.eps_effective = eps;
  return r;
}

/// Dispatch with served realization and internal stream derived from one seed.
template <CoverProvider Oracle>
RunResult run_algorithm(Algorithm alg, const StochasticModel& model, const MarginalProfile& profile, double eps,
                        const Oracle& oracle, const Realization& served, std::uint64_t internal) {
  switch (alg) {
    case Algorithm::hallucinate: return alg_hallucinate(model, oracle, served, internal);
    case Algorithm::threshold: return alg_threshold(model, profile, eps, oracle, served, internal);
    case Algorithm::best_of_two: return best_of_two(model, profile, eps, oracle, served, internal);
    case Algorithm::main: return alg_main(model, profile, eps, oracle, served, internal);
    case Algorithm::analysis: return alg_analysis(model, profile, eps, oracle, served, internal);
  }
  fail(ErrorKind::ParameterOutOfRange, "unknown algorithm");
}

template <CoverProvider Oracle>
RunResult run_algorithm(Algorithm alg, const StochasticModel& model, const MarginalProfile& profile, double eps,
                        const Oracle& oracle, std::uint64_t seed) {
  auto s = seeds_for(model, seed);
  auto r = run_algorithm(alg, model, profile, eps, oracle, s.served, s.internal);
  r.realization_seed = s.realization_seed;
  return r;
}

template <CoverProvider Oracle>
RunResult alg_hallucinate(const StochasticModel& model, const Oracle& oracle, std::uint64_t seed) {
  MarginalProfile unused;
  unused.vertex.assign(model.vertex_count(), 0.0);
  return run_algorithm(Algorithm::hallucinate, model, unused, 0.05, oracle, seed);
}

template <CoverProvider Oracle>
RunResult alg_threshold(const StochasticModel& model, const MarginalProfile& profile, double eps,
                        const Oracle& oracle, std::uint64_t seed) {
  return run_algorithm(Algorithm::threshold, model, profile, eps, oracle, seed);
}

template <CoverProvider Oracle>
RunResult best_of_two(const StochasticModel& model, const MarginalProfile& profile, double eps,
                      const Oracle& oracle, std::uint64_t seed) {
  return run_algorithm(Algorithm::best_of_two, model, profile, eps, oracle, seed);
}

template <CoverProvider Oracle>
RunResult alg_main(const StochasticModel& model, const MarginalProfile& profile, double eps, const Oracle& oracle,
                   std::uint64_t seed) {
  return run_algorithm(Algorithm::main, model, profile, eps, oracle, seed);
}

template <CoverProvider Oracle>
RunResult alg_analysis(const StochasticModel& model, const MarginalProfile& profile, double eps,
                       const Oracle& oracle, std::uint64_t seed) {
  return run_algorithm(Algorithm::analysis, model, profile, eps, oracle, seed);
}

/// Per-vertex surplus b_v and deficit sigma_v of (1.5 + eps) c_v against
/// Pr[v in S], with partition sums over
///   V1 = [0.5 - eps, 0.5],
///   V2 = (tau, 1] and [0, 1 - tau - eps),
///   V3 = (0.5, tau] and [1 - tau - eps, 0.5 - eps).
struct Ledger {
  std::vector<double> budget;
  std::vector<double> cost;
  std::vector<int> part;  // 1, 2 or 3
  std::array<long double, 3> part_sum{};
  long double total = 0;
  double tau = 0.5;
  double eps = 0;
};

inline Ledger budget_ledger(const std::vector<double>& c, const std::vector<double>& inclusion, double eps,
                            double tau) {
  if (c.size() != inclusion.size()) fail(ErrorKind::ParameterOutOfRange, "profile and inclusion sizes differ");
  if (eps < 0) fail(ErrorKind::ParameterOutOfRange, "eps must be non-negative");
  Ledger l;
  l.tau = tau;
  l.eps = eps;
  const double lower = 1.0 - tau - eps;
  CompensatedSum parts[3], total;
  for (std::size_t v = 0; v < c.size(); ++v) {
    const double pr = inclusion[v];
    if (!(pr >= 0.0 && pr <= 1.0)) fail(ErrorKind::ParameterOutOfRange, "inclusion probability outside [0,1]");
    const long double diff = (1.5L + eps) * c[v] - pr;
    l.budget.push_back(static_cast<double>(std::max(diff, 0.0L)));
    l.cost.push_back(static_cast<double>(std::max(-diff, 0.0L)));
    const bool in1 = c[v] >= 0.5 - eps && c[v] <= 0.5;
    const bool in2 = c[v] > tau || c[v] < lower;
    const bool in3 = (c[v] > 0.5 && c[v] <= tau) || (c[v] >= lower && c[v] < 0.5 - eps);
    if (in1 + in2 + in3 != 1) {
      fail(ErrorKind::PartitionNotDisjoint, "vertex " + std::to_string(v) + " with c=" + std::to_string(c[v]) +
                                                " lies in " + std::to_string(in1 + in2 + in3) + " partitions");
    }
    const int k = in1 ? 1 : in2 ? 2 : 3;
    l.part.push_back(k);
    parts[k - 1].add(diff);
    total.add(diff);
  }
  for (int k = 0; k < 3; ++k) l.part_sum[k] = parts[k].value();
  l.total = total.value();
  return l;
}

}  // namespace svc
