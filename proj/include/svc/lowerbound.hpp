#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/model.hpp"
#include "svc/random.hpp"

namespace svc {

/// Bipartite graph on left [0, n) and right [0, n) whose edges are split
/// into t matchings of r edges each.
struct RSGraph {
  std::size_t side = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;  // (left, right)
  std::vector<std::vector<std::size_t>> matchings;

  std::size_t t() const noexcept { return matchings.size(); }
  std::size_t r() const noexcept { return matchings.empty() ? 0 : matchings.front().size(); }

  friend bool operator==(const RSGraph&, const RSGraph&) = default;
};

struct RSReport {
  bool ok = true;
  std::string violation;
  std::vector<std::size_t> witness;  // edge indices

  explicit operator bool() const noexcept { return ok; }
};

namespace detail {

inline RSReport rs_violation(std::string what, std::vector<std::size_t> witness = {}) {
  return {false, std::move(what), std::move(witness)};
}

}  // namespace detail

/// Checks, in order: edge endpoints and duplicates, that the matchings
/// partition the edges, that each is a matching, that all have the same
/// size, and that each is induced. Reports the first violation found.
inline RSReport validate_rs_graph(const RSGraph& rs) {
  const std::size_t n = rs.side;
  std::set<std::pair<Vertex, Vertex>> seen;
  for (std::size_t e = 0; e < rs.edges.size(); ++e) {
    const auto [l, r] = rs.edges[e];
    if (l >= n || r >= n) return detail::rs_violation("edge endpoint outside the side size", {e});
    if (!seen.insert(rs.edges[e]).second) return detail::rs_violation("duplicate edge", {e});
  }
  if (rs.matchings.empty()) return detail::rs_violation("no matchings");
  std::vector<int> owner(rs.edges.size(), -1);
  for (std::size_t i = 0; i < rs.matchings.size(); ++i) {
    for (std::size_t e : rs.matchings[i]) {
      if (e >= rs.edges.size()) return detail::rs_violation("matching " + std::to_string(i) + " names a missing edge");
      if (owner[e] >= 0) {
        return detail::rs_violation("edge in matchings " + std::to_string(owner[e]) + " and " + std::to_string(i), {e});
      }
      owner[e] = static_cast<int>(i);
    }
  }
  for (std::size_t e = 0; e < owner.size(); ++e) {
    if (owner[e] < 0) return detail::rs_violation("edge in no matching", {e});
  }
  for (std::size_t i = 0; i < rs.matchings.size(); ++i) {
    const auto& m = rs.matchings[i];
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = a + 1; b < m.size(); ++b) {
        if (rs.edges[m[a]].first == rs.edges[m[b]].first || rs.edges[m[a]].second == rs.edges[m[b]].second) {
          return detail::rs_violation("matching " + std::to_string(i) + " shares an endpoint", {m[a], m[b]});
        }
      }
    }
  }
  const std::size_t r = rs.r();
  for (std::size_t i = 0; i < rs.matchings.size(); ++i) {
    if (rs.matchings[i].size() != r) {
      return detail::rs_violation("matching " + std::to_string(i) + " has size " +
                                  std::to_string(rs.matchings[i].size()) + ", expected " + std::to_string(r));
    }
  }
  for (std::size_t i = 0; i < rs.matchings.size(); ++i) {
    std::vector<bool> left(n), right(n);
    for (std::size_t e : rs.matchings[i]) {
      left[rs.edges[e].first] = true;
      right[rs.edges[e].second] = true;
    }
    for (std::size_t e = 0; e < rs.edges.size(); ++e) {
      if (owner[e] != static_cast<int>(i) && left[rs.edges[e].first] && right[rs.edges[e].second]) {
        return detail::rs_violation("matching " + std::to_string(i) + " is not induced", {e});
      }
    }
  }
  return {};
}

/// The 6-cycle L0R0, L0R1, L1R1, L1R2, L2R2, L2R0 with three induced matchings of size 2.
inline RSGraph six_cycle_rs() {
  return {3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}}, {{0, 3}, {2, 5}, {4, 1}}};
}

/// Random search for an RS graph with t induced matchings of size r on
/// sides of size n. Each attempt adds random matchings greedily.
inline std::optional<RSGraph> search_rs_graph(std::size_t n, std::size_t r, std::size_t t, std::uint64_t seed,
                                              std::size_t attempts = 1000) {
  if (r == 0 || r > n || t == 0) fail(ErrorKind::ParameterOutOfRange, "need 0 < r <= n and t > 0");
  CounterEngine rng(seed);
  std::vector<Vertex> lefts(n), rights(n);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    RSGraph g{n, {}, {}};
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
    std::vector<std::pair<std::vector<bool>, std::vector<bool>>> covered;
    for (std::size_t tries = 0; g.matchings.size() < t && tries < 50 * t; ++tries) {
      std::iota(lefts.begin(), lefts.end(), Vertex{0});
      std::iota(rights.begin(), rights.end(), Vertex{0});
      seeded_shuffle(std::span<Vertex>(lefts), rng());
      seeded_shuffle(std::span<Vertex>(rights), rng());
      std::vector<bool> lin(n), rin(n);
      for (std::size_t k = 0; k < r; ++k) {
        lin[lefts[k]] = true;
        rin[rights[k]] = true;
      }
      bool ok = true;
      for (std::size_t l = 0; l < n && ok; ++l) {
        for (std::size_t x = 0; x < n && ok; ++x) {
          if (adj[l][x] && lin[l] && rin[x]) ok = false;
        }
      }
      for (std::size_t k = 0; k < r && ok; ++k) {
        for (const auto& [cl, cr] : covered) {
          if (cl[lefts[k]] && cr[rights[k]]) ok = false;
        }
      }
      if (!ok) continue;
      std::vector<std::size_t> m;
      for (std::size_t k = 0; k < r; ++k) {
        adj[lefts[k]][rights[k]] = true;
        m.push_back(g.edges.size());
        g.edges.emplace_back(lefts[k], rights[k]);
      }
      g.matchings.push_back(std::move(m));
      covered.emplace_back(std::move(lin), std::move(rin));
    }
    if (g.matchings.size() == t && validate_rs_graph(g)) return g;
  }
  return std::nullopt;
}

inline constexpr double kDefaultEps2 = 0.02;
inline constexpr std::size_t kMaxExplicitScenarios = std::size_t{1} << 16;

/// k vertex-disjoint copies of the RS construction. Copy c uses vertices
/// [4nc, 4n(c+1)): left i -> i, right j -> n + j, exterior of RS vertex x -> 2n + x.
/// RS edges exist independently with probability eps2; each copy draws its
/// planted matching M* uniformly and realizes the exterior edges of the RS
/// vertices M* leaves uncovered. Scenario s encodes the per-copy choices in
/// base t, copy 0 least significant.
struct LowerBoundInstance {
  RSGraph rs;
  double eps2 = kDefaultEps2;
  std::size_t copies = 1;
  StochasticModel model;
  std::vector<std::vector<std::size_t>> rs_edge;        // [copy][rs edge] -> base edge
  std::vector<std::vector<std::size_t>> exterior_edge;  // [copy][rs vertex] -> base edge

  std::size_t side() const noexcept { return rs.side; }
  std::size_t block_vertices() const noexcept { return 4 * rs.side; }

  std::size_t scenario_of_copy(std::size_t scenario, std::size_t copy) const {
    for (std::size_t c = 0; c < copy; ++c) scenario /= rs.t();
    return scenario % rs.t();
  }

  /// Exterior edges realized when copy `copy` plants matching `m`.
  EdgeMask exterior_pattern(std::size_t copy, std::size_t m) const {
    EdgeMask out(model.edge_count());
    std::vector<bool> covered(2 * rs.side);
    for (std::size_t e : rs.matchings[m]) {
      covered[rs.edges[e].first] = true;
      covered[rs.side + rs.edges[e].second] = true;
    }
    for (std::size_t x = 0; x < 2 * rs.side; ++x) {
      if (!covered[x]) out.set(exterior_edge[copy][x]);
    }
    return out;
  }
};

namespace detail {

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

}  // namespace detail

inline LowerBoundInstance replicate_rs_instance(const RSGraph& rs, double eps2, std::size_t copies) {
  if (auto report = validate_rs_graph(rs); !report) fail(ErrorKind::InvalidRSGraph, report.violation);
  if (!(eps2 > 0.0 && eps2 <= 1.0)) fail(ErrorKind::ParameterOutOfRange, "eps2 must lie in (0,1]");
  if (copies == 0) fail(ErrorKind::ParameterOutOfRange, "copies must be at least 1");
  const std::size_t n = rs.side;
  std::vector<WeightedEdge> edges;
  for (std::size_t c = 0; c < copies; ++c) {
    const auto base = static_cast<Vertex>(4 * n * c);
    for (const auto& [l, r] : rs.edges) {
      edges.push_back({base + l, static_cast<Vertex>(base + n + r), eps2, std::nullopt});
    }
    for (std::size_t x = 0; x < 2 * n; ++x) {
      edges.push_back({static_cast<Vertex>(base + x), static_cast<Vertex>(base + 2 * n + x), 1.0, std::nullopt});
    }
  }
  BaseGraph g = build_graph(4 * n * copies, edges);

  LowerBoundInstance inst;
  inst.rs = rs;
  inst.eps2 = eps2;
  inst.copies = copies;
  EdgeMask correlated(g.edge_count());
  for (std::size_t c = 0; c < copies; ++c) {
    const auto base = static_cast<Vertex>(4 * n * c);
    std::vector<std::size_t> rs_map, ext_map;
    for (const auto& [l, r] : rs.edges) rs_map.push_back(*g.find_edge(base + l, static_cast<Vertex>(base + n + r)));
    for (std::size_t x = 0; x < 2 * n; ++x) {
      ext_map.push_back(*g.find_edge(static_cast<Vertex>(base + x), static_cast<Vertex>(base + 2 * n + x)));
      correlated.set(ext_map.back());
    }
    inst.rs_edge.push_back(std::move(rs_map));
    inst.exterior_edge.push_back(std::move(ext_map));
  }
  inst.model = StochasticModel::independent(g);
  std::vector<std::vector<EdgeMask>> patterns(copies);
  for (std::size_t c = 0; c < copies; ++c) {
    for (std::size_t m = 0; m < rs.t(); ++m) patterns[c].push_back(inst.exterior_pattern(c, m));
  }
  const std::size_t count = detail::checked_power(rs.t(), copies, kMaxExplicitScenarios);
  if (count <= kMaxExplicitScenarios) {
    std::vector<Scenario> scenarios;
    scenarios.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      EdgeMask present(g.edge_count());
      std::size_t rest = s;
      for (std::size_t c = 0; c < copies; ++c) {
        present |= patterns[c][rest % rs.t()];
        rest /= rs.t();
      }
      scenarios.push_back({1.0 / static_cast<double>(count),
                           Rational{1, static_cast<std::int64_t>(count)}, std::move(present)});
    }
    inst.model = StochasticModel::correlated(std::move(g), std::move(correlated), std::move(scenarios));
  } else {
    const std::size_t t = rs.t();
    CorrelatedSampler sampler = [patterns, t](const EdgeMask&, std::uint64_t seed) {
      EdgeMask present(patterns.front().front().size());
      for (std::size_t c = 0; c < patterns.size(); ++c) {
        CounterEngine rng(mix_seed(seed, c));
        present |= patterns[c][rng.below(t)];
      }
      return present;
    };
    inst.model = StochasticModel::correlated(std::move(g), std::move(correlated), std::move(sampler));
  }
  return inst;
}

inline LowerBoundInstance build_lowerbound_instance(const RSGraph& rs, double eps2 = kDefaultEps2) {
  return replicate_rs_instance(rs, eps2, 1);
}

/// k disjoint copies of an instance with independent planted matchings.
inline LowerBoundInstance replicate_instance(const LowerBoundInstance& inst, std::size_t copies) {
  return replicate_rs_instance(inst.rs, inst.eps2, inst.copies * copies);
}

/// Realization of the instance for a given scenario and RS-edge outcome.
inline Realization lowerbound_realization(const LowerBoundInstance& inst, std::size_t scenario,
                                          const EdgeMask& rs_present) {
  Realization r{rs_present & ~inst.model.correlated_edges(), scenario};
  for (std::size_t c = 0; c < inst.copies; ++c) r.present |= inst.exterior_pattern(c, inst.scenario_of_copy(scenario, c));
  return r;
}

/// 2(n - r) + realized M* edges, summed over copies.
inline std::size_t exact_opt_lb(const LowerBoundInstance& inst, const Realization& realization) {
  if (!realization.scenario) fail(ErrorKind::ScenarioUnknown, "realization does not record its planted matching");
  const std::size_t n = inst.rs.side, r = inst.rs.r();
  std::size_t total = 0;
  for (std::size_t c = 0; c < inst.copies; ++c) {
    const auto m = inst.scenario_of_copy(*realization.scenario, c);
    total += 2 * (n - r);
    for (std::size_t e : inst.rs.matchings[m]) total += realization.present.test(inst.rs_edge[c][e]);
  }
  return total;
}

struct ForcedCover {
  double forced = 0;
  double expected_opt = 0;
  double ratio() const { return expected_opt > 0 ? forced / expected_opt : 1.0; }
};

/// Expected size of the cover a non-adaptive algorithm querying Q is forced
/// to output: per copy, (1/t) sum_i [2(n - r) + |M_i \ Q| + eps2 |M_i and Q|].
/// Also returns the expected optimum 2(n - r) + eps2 r per copy.
inline ForcedCover nonadaptive_forced_cover(const LowerBoundInstance& inst, const EdgeMask& queried) {
  const std::size_t n = inst.rs.side, r = inst.rs.r(), t = inst.rs.t();
  long double forced = 0;
  for (std::size_t c = 0; c < inst.copies; ++c) {
    long double copy_sum = 0;
    for (const auto& m : inst.rs.matchings) {
      std::size_t hit = 0;
      for (std::size_t e : m) hit += queried.test(inst.rs_edge[c][e]);
      copy_sum += static_cast<long double>(2 * (n - r) + (m.size() - hit)) + inst.eps2 * static_cast<long double>(hit);
    }
    forced += copy_sum / static_cast<long double>(t);
  }
  const long double opt = static_cast<long double>(inst.copies) *
                          (static_cast<long double>(2 * (n - r)) + inst.eps2 * static_cast<long double>(r));
  return {static_cast<double>(forced), static_cast<double>(opt)};
}

/// Query set of `budget` RS edges filled one whole matching at a time,
/// visiting matching 0 of every copy first, then matching 1, and so on.
inline EdgeMask matching_query_set(const LowerBoundInstance& inst, std::size_t budget) {
  EdgeMask q(inst.model.edge_count());
  for (std::size_t m = 0; m < inst.rs.t() && budget > 0; ++m) {
    for (std::size_t c = 0; c < inst.copies && budget > 0; ++c) {
      for (std::size_t e : inst.rs.matchings[m]) {
        if (budget == 0) break;
        q.set(inst.rs_edge[c][e]);
        --budget;
      }
    }
  }
  return q;
}

}  // namespace svc
