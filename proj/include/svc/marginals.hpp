#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "svc/error.hpp"
#include "svc/graph.hpp"
#include "svc/model.hpp"
#include "svc/mvc.hpp"
#include "svc/parallel.hpp"
#include "svc/random.hpp"

namespace svc {

enum class Provenance { exact, estimated };

struct EstimateInfo {
  std::size_t t = 0;
  double eps = 0;
  double delta = 0;
  std::uint64_t seed = 0;
};

/// c_v = Pr[v in oracle cover of a fresh realization], c_e = Pr[e covered by it],
/// opt = E[cover size].
struct MarginalProfile {
  std::vector<double> vertex;
  std::vector<double> edge;
  double opt = 0;
  Provenance provenance = Provenance::exact;
  std::optional<EstimateInfo> estimate{};

  bool is_estimated() const noexcept { return provenance == Provenance::estimated; }
  std::size_t vertex_count() const noexcept { return vertex.size(); }
};

/// Largest number of uncertain independent edges exact enumeration accepts.
inline constexpr std::size_t kMaxEnumeratedEdges = 22;

inline void check_enumerable(const StochasticModel& model, std::size_t max_uncertain = kMaxEnumeratedEdges) {
  if (!model.has_scenario_space()) {
    fail(ErrorKind::ScenarioSpaceUnavailable, "exact enumeration needs an explicit scenario list");
  }
  const auto k = model.uncertain_edge_count();
  if (k > max_uncertain) {
    fail(ErrorKind::InstanceTooLarge, std::to_string(k) + " uncertain edges exceeds enumeration limit " +
                                          std::to_string(max_uncertain));
  }
}

template <CoverProvider Oracle>
MarginalProfile exact_marginals(const StochasticModel& model, const Oracle& oracle,
                                std::size_t max_uncertain = kMaxEnumeratedEdges) {
  if (!oracle.canonical()) fail(ErrorKind::NonCanonicalOracle, "exact marginals need a canonical oracle");
  check_enumerable(model, max_uncertain);
  const auto& g = model.graph();
  std::vector<CompensatedSum> cv(g.vertex_count()), ce(g.edge_count());
  CompensatedSum opt;
  model.for_each_realization([&](const EdgeMask& present, std::optional<std::size_t>, long double w) {
    const Cover c = oracle.cover(g, present, 0);
    for (Vertex v : c.vertices.members()) cv[v].add(w);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (c.vertices.contains(g.edge(e).u) || c.vertices.contains(g.edge(e).v)) ce[e].add(w);
    }
    opt.add(w * static_cast<long double>(c.size()));
  });
  MarginalProfile p;
  for (auto& s : cv) p.vertex.push_back(static_cast<double>(std::clamp(s.value(), 0.0L, 1.0L)));
  for (auto& s : ce) p.edge.push_back(static_cast<double>(std::clamp(s.value(), 0.0L, 1.0L)));
  p.opt = static_cast<double>(opt.value());
  return p;
}

/// t = ceil(n^2 / (8 eps^2) * ln(2n / delta)).
inline std::size_t estimator_sample_count(std::size_t n, double eps, double delta) {
  if (!(eps > 0)) fail(ErrorKind::ParameterOutOfRange, "eps must be positive");
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::ParameterOutOfRange, "delta must lie in (0,1)");
  if (n == 0) return 1;
  const double nd = static_cast<double>(n);
  const double t = std::ceil(nd * nd / (8.0 * eps * eps) * std::log(2.0 * nd / delta));
  return static_cast<std::size_t>(std::max(1.0, t));
}

struct EstimateOptions {
  unsigned workers = 1;
  std::size_t chunk = 256;
};

/// Empirical inclusion frequencies over t sampled realizations. Realization
/// i uses seed derive_seed(seed, i); its oracle call derive_seed(seed, i, 1).
template <CoverProvider Oracle>
MarginalProfile estimate_marginals_t(const StochasticModel& model, const Oracle& oracle, std::size_t t,
                                     std::uint64_t seed, double eps = 0, double delta = 0,
                                     EstimateOptions options = {}) {
  if (t == 0) fail(ErrorKind::ParameterOutOfRange, "sample count must be positive");
  const auto& g = model.graph();
  struct Counts {
    std::vector<std::uint64_t> v, e;
  };
  auto chunks = parallel_chunks(t, options.chunk, options.workers, [&](std::size_t begin, std::size_t end) {
    Counts c{std::vector<std::uint64_t>(g.vertex_count()), std::vector<std::uint64_t>(g.edge_count())};
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = model.sample(derive_seed(seed, i));
      const Cover cover = oracle.cover(g, r.present, derive_seed(seed, i, 1));
      for (Vertex v : cover.vertices.members()) ++c.v[v];
      for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (cover.vertices.contains(g.edge(e).u) || cover.vertices.contains(g.edge(e).v)) ++c.e[e];
      }
    }
    return c;
  });
  std::vector<std::uint64_t> vcount(g.vertex_count()), ecount(g.edge_count());
  for (const auto& c : chunks) {
    for (std::size_t v = 0; v < vcount.size(); ++v) vcount[v] += c.v[v];
    for (std::size_t e = 0; e < ecount.size(); ++e) ecount[e] += c.e[e];
  }
  MarginalProfile p;
  p.provenance = Provenance::estimated;
  p.estimate = EstimateInfo{t, eps, delta, seed};
  const double td = static_cast<double>(t);
  std::uint64_t total = 0;
  for (auto c : vcount) {
    p.vertex.push_back(static_cast<double>(c) / td);
    total += c;
  }
  for (auto c : ecount) p.edge.push_back(static_cast<double>(c) / td);
  p.opt = static_cast<double>(total) / td;
  return p;
}

template <CoverProvider Oracle>
MarginalProfile estimate_marginals(const StochasticModel& model, const Oracle& oracle, double eps, double delta,
                                   std::uint64_t seed, EstimateOptions options = {}) {
  const auto t = estimator_sample_count(model.vertex_count(), eps, delta);
  return estimate_marginals_t(model, oracle, t, seed, eps, delta, options);
}

struct OptValue {
  double value = 0;
  double std_error = 0;
  std::size_t trials = 0;  // 0 for an exact value
  bool exact() const noexcept { return trials == 0; }
};

enum class OptMode { exact, monte_carlo };

template <CoverProvider Oracle>
OptValue expected_opt(const StochasticModel& model, const Oracle& oracle, OptMode mode, std::size_t trials = 0,
                      std::uint64_t seed = 0, EstimateOptions options = {}) {
  if (mode == OptMode::exact) return {exact_marginals(model, oracle).opt, 0.0, 0};
  if (trials == 0) fail(ErrorKind::ParameterOutOfRange, "Monte-Carlo mode needs at least one trial");
  const auto& g = model.graph();
  auto sizes = parallel_chunks(trials, options.chunk, options.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> out;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = model.sample(derive_seed(seed, i));
      out.push_back(static_cast<double>(oracle.cover(g, r.present, derive_seed(seed, i, 1)).size()));
    }
    return out;
  });
  double sum = 0, sq = 0;
  for (const auto& chunk : sizes) {
    for (double s : chunk) {
      sum += s;
      sq += s * s;
    }
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n), trials};
}

}  // namespace svc
