#pragma once

#include <bit>
#include <concepts>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/random.hpp"

namespace svc {

struct Cover {
  VertexSet vertices;
  std::size_t size() const noexcept { return vertices.size(); }
};

enum class OracleKind { exact, greedy2, bruteforce };

/// canonical: the lexicographically smallest cover among those the solver
/// considers optimal (size first, then sorted vertex list). seeded_random:
/// the same rule under a seed-dependent relabelling of the vertices.
enum class TieBreak { canonical, seeded_random };

inline const char* to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::exact: return "exact";
    case OracleKind::greedy2: return "greedy2";
    case OracleKind::bruteforce: return "bruteforce";
  }
  return "?";
}

/// Size limits for mvc_exact; counted over vertices that touch an edge.
struct ExactLimits {
  std::size_t max_vertices = 64;
  std::size_t max_edges = 256;
};

inline constexpr std::size_t kBruteforceMaxVertices = 22;

namespace detail {

inline std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

/// Branch and bound over a graph of at most 64 vertices held as adjacency bitmasks.
class BitCoverSolver {
 public:
  explicit BitCoverSolver(std::vector<std::uint64_t> adj) : adj_(std::move(adj)) {}

  int vertex_count() const { return static_cast<int>(adj_.size()); }
  std::uint64_t neighbors(int v) const { return adj_[v]; }

  int minimum(std::uint64_t alive) {
    best_ = std::popcount(alive) + 1;
    search(alive, 0);
    return best_;
  }

  bool fits_within(std::uint64_t alive, int budget) {
    if (budget < 0) return false;
    best_ = budget + 1;
    search(alive, 0);
    return best_ <= budget;
  }

 private:
  int matching_lower_bound(std::uint64_t alive) const {
    int matched = 0;
    while (alive) {
      const int v = std::countr_zero(alive);
      alive &= ~bit(v);
      const std::uint64_t nb = adj_[v] & alive;
      if (nb) {
        alive &= ~bit(std::countr_zero(nb));
        ++matched;
      }
    }
    return matched;
  }

  void search(std::uint64_t alive, int taken) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::uint64_t rest = alive; rest; rest &= rest - 1) {
        const int v = std::countr_zero(rest);
        if (!(alive & bit(v))) continue;
        const std::uint64_t nb = adj_[v] & alive;
        if (nb == 0) {
          alive &= ~bit(v);
          changed = true;
        } else if (std::popcount(nb) == 1) {
          alive &= ~(nb | bit(v));
          ++taken;
          changed = true;
        }
      }
      if (changed || taken >= best_) continue;
      // Dominance: u adjacent to v with N[v] within N[u] lies in some minimum cover.
      for (std::uint64_t rest = alive; rest && !changed; rest &= rest - 1) {
        const int v = std::countr_zero(rest);
        const std::uint64_t closed_v = (adj_[v] | bit(v)) & alive;
        for (std::uint64_t nb = adj_[v] & alive; nb; nb &= nb - 1) {
          const int u = std::countr_zero(nb);
          const std::uint64_t closed_u = (adj_[u] | bit(u)) & alive;
          if ((closed_v & ~closed_u) == 0) {
            alive &= ~bit(u);
            ++taken;
            changed = true;
            break;
          }
        }
      }
    }
    if (taken >= best_) return;
    if (alive == 0) {
      best_ = taken;
      return;
    }
    if (taken + matching_lower_bound(alive) >= best_) return;

    int pivot = -1;
    int pivot_degree = -1;
    for (std::uint64_t rest = alive; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const int d = std::popcount(adj_[v] & alive);
      if (d > pivot_degree) {
        pivot = v;
        pivot_degree = d;
      }
    }
    search(alive & ~bit(pivot), taken + 1);
    const std::uint64_t nb = adj_[pivot] & alive;
    search(alive & ~(nb | bit(pivot)), taken + pivot_degree);
  }

  std::vector<std::uint64_t> adj_;
  int best_ = 0;
};

inline void check_edges(std::size_t n, std::span<const Edge> edges) {
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) fail(ErrorKind::EndpointOutOfRange, "cover input edge out of range");
    if (e.u == e.v) fail(ErrorKind::SelfLoop, "cover input contains a self-loop");
  }
}

/// Positions in `order` define the lexicographic preference; identity for canonical.
inline std::vector<Vertex> vertex_order(std::size_t n, TieBreak tie, std::uint64_t seed) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  if (tie == TieBreak::seeded_random) seeded_shuffle(std::span<Vertex>(order), seed);
  return order;
}

}  // namespace detail

/// Minimum vertex cover by reduction rules (isolated vertices, degree-1
/// neighbours, dominated vertices) plus branch and bound on a maximum-degree
/// vertex with a maximal-matching lower bound. The optimum size is found
/// first; the reported cover is then fixed vertex by vertex in tie-break
/// order, keeping each vertex whenever an optimum cover containing the
/// decisions so far still exists.
inline Cover mvc_exact(std::size_t n, std::span<const Edge> edges, const ExactLimits& limits = {},
                       TieBreak tie = TieBreak::canonical, std::uint64_t seed = 0) {
  detail::check_edges(n, edges);
  Cover out{VertexSet(n)};
  if (edges.empty()) return out;
  if (edges.size() > limits.max_edges) {
    fail(ErrorKind::InstanceTooLarge, std::to_string(edges.size()) + " edges exceeds exact-solver limit " +
                                          std::to_string(limits.max_edges));
  }
  std::vector<int> compact(n, -1);
  std::vector<Vertex> label;
  for (const auto& e : edges) {
    for (Vertex x : {e.u, e.v}) {
      if (compact[x] < 0) {
        compact[x] = 0;
      }
    }
  }
  for (Vertex v = 0; v < n; ++v) {
    if (compact[v] == 0) {
      compact[v] = static_cast<int>(label.size());
      label.push_back(v);
    }
  }
  const std::size_t k = label.size();
  if (k > std::min<std::size_t>(limits.max_vertices, 64)) {
    fail(ErrorKind::InstanceTooLarge, std::to_string(k) + " non-isolated vertices exceeds exact-solver limit");
  }
  std::vector<std::uint64_t> adj(k, 0);
  for (const auto& e : edges) {
    const int a = compact[e.u];
    const int b = compact[e.v];
    adj[a] |= detail::bit(b);
    adj[b] |= detail::bit(a);
  }
  detail::BitCoverSolver solver(adj);
  const std::uint64_t everything = k == 64 ? ~std::uint64_t{0} : (detail::bit(static_cast<int>(k)) - 1);
  const int optimum = solver.minimum(everything);

  std::vector<int> order;
  for (Vertex v : detail::vertex_order(n, tie, seed)) {
    if (compact[v] >= 0) order.push_back(compact[v]);
  }
  std::uint64_t chosen = 0;
  std::uint64_t excluded = 0;
  auto feasible = [&](std::uint64_t in, std::uint64_t out_set) {
    std::uint64_t forced = in;
    for (std::uint64_t rest = out_set; rest; rest &= rest - 1) {
      const int u = std::countr_zero(rest);
      if (adj[u] & out_set) return false;
      forced |= adj[u];
    }
    const int remaining = optimum - std::popcount(forced);
    return solver.fits_within(everything & ~forced & ~out_set, remaining);
  };
  for (int v : order) {
    if (std::popcount(chosen) == optimum) break;
    if (feasible(chosen | detail::bit(v), excluded)) {
      chosen |= detail::bit(v);
    } else {
      excluded |= detail::bit(v);
    }
  }
  for (std::uint64_t rest = chosen; rest; rest &= rest - 1) {
    out.vertices.insert(label[std::countr_zero(rest)]);
  }
  return out;
}

/// Both endpoints of a maximal matching built greedily in edge order
/// (sorted order when canonical, seed-shuffled otherwise). At most twice the optimum.
inline Cover mvc_greedy(std::size_t n, std::span<const Edge> edges, TieBreak tie = TieBreak::canonical,
                        std::uint64_t seed = 0) {
  detail::check_edges(n, edges);
  std::vector<Edge> order(edges.begin(), edges.end());
  for (auto& e : order) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(order.begin(), order.end());
  if (tie == TieBreak::seeded_random) seeded_shuffle(std::span<Edge>(order), seed);
  Cover out{VertexSet(n)};
  for (const auto& e : order) {
    if (!out.vertices.contains(e.u) && !out.vertices.contains(e.v)) {
      out.vertices.insert(e.u);
      out.vertices.insert(e.v);
    }
  }
  return out;
}

/// Exhaustive search by size, then lexicographically within a size.
/// Test oracle only; n must not exceed 22.
inline Cover mvc_bruteforce(std::size_t n, std::span<const Edge> edges, TieBreak tie = TieBreak::canonical,
                            std::uint64_t seed = 0) {
  detail::check_edges(n, edges);
  if (n > kBruteforceMaxVertices) {
    fail(ErrorKind::InstanceTooLarge, "brute force is limited to 22 vertices, got " + std::to_string(n));
  }
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& e : edges) {
    adj[e.u] |= std::uint32_t{1} << e.v;
    adj[e.v] |= std::uint32_t{1} << e.u;
  }
  const auto order = detail::vertex_order(n, tie, seed);
  auto covers = [&](std::uint32_t set) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!(set >> v & 1U) && (adj[v] & ~set)) return false;
    }
    return true;
  };
  Cover out{VertexSet(n)};
  std::vector<std::size_t> pick;
  for (std::size_t k = 0; k <= n; ++k) {
    pick.resize(k);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      std::uint32_t set = 0;
      for (auto i : pick) set |= std::uint32_t{1} << order[i];
      if (covers(set)) {
        for (auto i : pick) out.vertices.insert(order[i]);
        return out;
      }
      // next combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

/// Minimum-vertex-cover function used by the algorithms, with its declared
/// approximation factor.
class CoverOracle {
 public:
  explicit CoverOracle(OracleKind kind = OracleKind::exact, TieBreak tie = TieBreak::canonical,
                       ExactLimits limits = {})
      : kind_(kind), tie_(tie), limits_(limits) {}

  OracleKind kind() const noexcept { return kind_; }
  TieBreak tie_break() const noexcept { return tie_; }
  const ExactLimits& limits() const noexcept { return limits_; }
  double alpha() const noexcept { return kind_ == OracleKind::greedy2 ? 2.0 : 1.0; }
  bool canonical() const noexcept { return tie_ == TieBreak::canonical; }

  Cover operator()(std::size_t n, std::span<const Edge> edges, std::uint64_t seed = 0) const {
    switch (kind_) {
      case OracleKind::exact: return mvc_exact(n, edges, limits_, tie_, seed);
      case OracleKind::greedy2: return mvc_greedy(n, edges, tie_, seed);
      case OracleKind::bruteforce: return mvc_bruteforce(n, edges, tie_, seed);
    }
    return Cover{VertexSet(n)};
  }

  Cover cover(const BaseGraph& g, const EdgeMask& present, std::uint64_t seed = 0) const {
    const auto edges = realized_edges(g, present);
    return (*this)(g.vertex_count(), edges, seed);
  }

 private:
  OracleKind kind_;
  TieBreak tie_;
  ExactLimits limits_;
};

template <class O>
concept CoverProvider = requires(const O& o, const BaseGraph& g, const EdgeMask& m, std::uint64_t s) {
  { o.cover(g, m, s) } -> std::convertible_to<Cover>;
  { o.canonical() } -> std::convertible_to<bool>;
  { o.alpha() } -> std::convertible_to<double>;
};

/// Caches a canonical oracle's answers by realized edge mask. Bound to one
/// base graph; randomized oracles are passed through uncached.
class MemoOracle {
 public:
  MemoOracle(const CoverOracle& oracle, const BaseGraph& graph) : oracle_(oracle), graph_(&graph) {}

  bool canonical() const noexcept { return oracle_.canonical(); }
  double alpha() const noexcept { return oracle_.alpha(); }
  const CoverOracle& oracle() const noexcept { return oracle_; }
  std::size_t cache_size() const noexcept { return cache_.size(); }

  const Cover& cover(const BaseGraph& g, const EdgeMask& present, std::uint64_t seed = 0) const {
    if (&g != graph_ || !oracle_.canonical()) {
      scratch_ = oracle_.cover(g, present, seed);
      return scratch_;
    }
    key_.clear();
    boost::to_block_range(present, std::back_inserter(key_));
    auto it = cache_.find(key_);
    if (it == cache_.end()) it = cache_.emplace(key_, oracle_.cover(g, present, seed)).first;
    return it->second;
  }

 private:
  struct BlockHash {
    std::size_t operator()(const std::vector<std::uint64_t>& blocks) const noexcept {
      std::uint64_t h = blocks.size();
      for (auto b : blocks) h = mix_seed(h, b);
      return static_cast<std::size_t>(h);
    }
  };

  CoverOracle oracle_;
  const BaseGraph* graph_;
  mutable std::vector<std::uint64_t> key_;
  mutable Cover scratch_;
  mutable std::unordered_map<std::vector<std::uint64_t>, Cover, BlockHash> cache_;
};

}  // namespace svc
