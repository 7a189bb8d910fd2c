#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "svc/error.hpp"
#include "svc/random.hpp"

namespace svc {

using Vertex = std::uint32_t;

/// One flag per base edge, indexed like BaseGraph::edges().
using EdgeMask = boost::dynamic_bitset<std::uint64_t>;

/// Subset of [0, n).
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe) : bits_(universe) {}

  static VertexSet all(std::size_t universe) {
    VertexSet s(universe);
    s.bits_.set();
    return s;
  }

  static VertexSet of(std::size_t universe, std::initializer_list<Vertex> members) {
    VertexSet s(universe);
    for (Vertex v : members) s.insert(v);
    return s;
  }

  std::size_t universe() const noexcept { return bits_.size(); }
  std::size_t size() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }
  bool contains(Vertex v) const { return bits_.test(v); }
  void insert(Vertex v) { bits_.set(v); }
  void erase(Vertex v) { bits_.reset(v); }

  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    out.reserve(size());
    for (auto i = bits_.find_first(); i != Bits::npos; i = bits_.find_next(i)) {
      out.push_back(static_cast<Vertex>(i));
    }
    return out;
  }

  bool is_subset_of(const VertexSet& other) const { return bits_.is_subset_of(other.bits_); }

  VertexSet& operator|=(const VertexSet& other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.bits_ == b.bits_; }

  const boost::dynamic_bitset<std::uint64_t>& bits() const noexcept { return bits_; }

 private:
  using Bits = boost::dynamic_bitset<std::uint64_t>;
  Bits bits_;
};

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Exact probability given as "a/b" text in an instance file.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  long double exact_value() const {
    return static_cast<long double>(num) / static_cast<long double>(den);
  }
  long double complement() const {
    return static_cast<long double>(den - num) / static_cast<long double>(den);
  }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Rational&, const Rational&) = default;

  /// Parses "a/b" with non-negative a and positive b; nullopt for anything else.
  static std::optional<Rational> parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    Rational r;
    const auto lhs = text.substr(0, slash);
    const auto rhs = text.substr(slash + 1);
    auto [p1, e1] = std::from_chars(lhs.data(), lhs.data() + lhs.size(), r.num);
    auto [p2, e2] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), r.den);
    if (e1 != std::errc{} || e2 != std::errc{} || p1 != lhs.data() + lhs.size() ||
        p2 != rhs.data() + rhs.size() || lhs.empty() || rhs.empty() || r.num < 0 || r.den <= 0) {
      return std::nullopt;
    }
    return r;
  }
};

struct WeightedEdge {
  Vertex u = 0;
  Vertex v = 0;
  double p = 1.0;
  std::optional<Rational> exact{};
};

/// Known base graph with per-edge existence probabilities. Immutable after
/// build_graph(); edges are stored sorted with u < v.
class BaseGraph {
 public:
  BaseGraph() = default;

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  double probability(std::size_t e) const { return prob_[e]; }
  const std::optional<Rational>& exact_probability(std::size_t e) const { return exact_[e]; }

  /// Probability used by enumeration paths: rebuilt from the rational text
  /// when the instance provided one.
  long double enumeration_probability(std::size_t e) const {
    return exact_[e] ? exact_[e]->exact_value() : static_cast<long double>(prob_[e]);
  }
  long double enumeration_complement(std::size_t e) const {
    return exact_[e] ? exact_[e]->complement() : 1.0L - static_cast<long double>(prob_[e]);
  }

  std::optional<std::size_t> find_edge(Vertex a, Vertex b) const {
    const Edge key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
  }

  EdgeMask empty_mask() const { return EdgeMask(edges_.size()); }
  EdgeMask full_mask() const { return ~EdgeMask(edges_.size()); }

  friend bool operator==(const BaseGraph& a, const BaseGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.prob_ == b.prob_ && a.exact_ == b.exact_;
  }

 private:
  friend BaseGraph build_graph(std::size_t n, std::span<const WeightedEdge> weighted_edges);

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> prob_;
  std::vector<std::optional<Rational>> exact_;
};

inline BaseGraph build_graph(std::size_t n, std::span<const WeightedEdge> weighted_edges) {
  struct Item {
    Edge edge;
    double p;
    std::optional<Rational> exact;
  };
  std::vector<Item> items;
  items.reserve(weighted_edges.size());
  for (const auto& we : weighted_edges) {
    if (we.u >= n || we.v >= n) {
      fail(ErrorKind::EndpointOutOfRange, "edge (" + std::to_string(we.u) + "," +
                                              std::to_string(we.v) + ") with n=" + std::to_string(n));
    }
    if (we.u == we.v) fail(ErrorKind::SelfLoop, "self-loop at vertex " + std::to_string(we.u));
    double p = we.exact ? we.exact->value() : we.p;
    if (!(p > 0.0 && p <= 1.0)) {
      fail(ErrorKind::ProbabilityOutOfRange,
           "edge (" + std::to_string(we.u) + "," + std::to_string(we.v) + ") has p=" + std::to_string(p));
    }
    items.push_back({Edge{std::min(we.u, we.v), std::max(we.u, we.v)}, p, we.exact});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.edge < b.edge; });
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].edge == items[i - 1].edge) {
      fail(ErrorKind::DuplicateEdge, "edge (" + std::to_string(items[i].edge.u) + "," +
                                         std::to_string(items[i].edge.v) + ") listed twice");
    }
  }
  BaseGraph g;
  g.n_ = n;
  for (auto& item : items) {
    g.edges_.push_back(item.edge);
    g.prob_.push_back(item.p);
    g.exact_.push_back(item.exact);
  }
  return g;
}

inline BaseGraph build_graph(std::size_t n, std::initializer_list<WeightedEdge> weighted_edges) {
  return build_graph(n, std::span<const WeightedEdge>(weighted_edges.begin(), weighted_edges.size()));
}

/// Minimum edge probability; 1 for a graph without edges.
inline double min_probability(const BaseGraph& g) {
  double p = 1.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) p = std::min(p, g.probability(e));
  return p;
}

/// Base edges with both endpoints outside `committed`, i.e. the edge set of G[V \ committed].
inline EdgeMask uncovered_edges(const BaseGraph& g, const VertexSet& committed) {
  EdgeMask out(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& [u, v] = g.edge(e);
    if (!committed.contains(u) && !committed.contains(v)) out.set(e);
  }
  return out;
}

struct InducedSubgraph {
  BaseGraph graph;                          // same vertex labels as the parent
  std::vector<std::size_t> parent_edge;     // edge index in the parent graph
};

inline InducedSubgraph induced_subgraph(const BaseGraph& g, const VertexSet& keep) {
  InducedSubgraph out;
  std::vector<WeightedEdge> kept;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& [u, v] = g.edge(e);
    if (keep.contains(u) && keep.contains(v)) {
      kept.push_back({u, v, g.probability(e), g.exact_probability(e)});
      out.parent_edge.push_back(e);
    }
  }
  out.graph = build_graph(g.vertex_count(), kept);
  return out;
}

/// A concrete outcome of the random graph: which base edges exist.
struct Realization {
  EdgeMask present;
  std::optional<std::size_t> scenario{};  // correlated block outcome, when the model has one
};

inline std::vector<Edge> realized_edges(const BaseGraph& g, const EdgeMask& present) {
  std::vector<Edge> out;
  out.reserve(present.count());
  for (auto e = present.find_first(); e != EdgeMask::npos; e = present.find_next(e)) {
    out.push_back(g.edge(e));
  }
  return out;
}

/// Independent-edge sampling: edge e is present iff unit_uniform(seed, e) < p_e.
inline Realization sample_realization(const BaseGraph& g, std::uint64_t seed) {
  Realization r{EdgeMask(g.edge_count())};
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (unit_uniform(seed, e) < g.probability(e)) r.present.set(e);
  }
  return r;
}

inline bool is_vertex_cover(std::span<const Edge> edges, const VertexSet& cover) {
  return std::all_of(edges.begin(), edges.end(),
                     [&](const Edge& e) { return cover.contains(e.u) || cover.contains(e.v); });
}

inline bool is_vertex_cover(const BaseGraph& g, const EdgeMask& present, const VertexSet& cover) {
  for (auto e = present.find_first(); e != EdgeMask::npos; e = present.find_next(e)) {
    const auto& [u, v] = g.edge(e);
    if (!cover.contains(u) && !cover.contains(v)) return false;
  }
  return true;
}

}  // namespace svc
