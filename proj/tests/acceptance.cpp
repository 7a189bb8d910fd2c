// Acceptance suite: one PASS/FAIL line per criterion.
//
//   svc_acceptance        run all criteria
//   svc_acceptance N      run criterion N only
//
// Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "svc/commit_query.hpp"
#include "svc/exact.hpp"
#include "svc/lowerbound.hpp"
#include "svc/marginals.hpp"
#include "svc/mvc.hpp"
#include "svc/parallel.hpp"

namespace {

using namespace svc;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr double kEps = 0.05;
constexpr double kTol = 1e-9;

/// n <= 8, m <= 10, p in {0.3, 0.5, 1}.
const std::vector<testing::CorpusInstance>& corpus() {
  static const auto c = testing::small_corpus(400, 2024, 10);
  return c;
}

std::vector<Edge> random_edges(std::size_t n, double density, std::uint64_t seed) {
  std::vector<Edge> out;
  std::uint64_t k = 0;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (unit_uniform(seed, k++) < density) out.push_back({u, v});
    }
  }
  return out;
}

Verdict criterion_1() {
  const auto start = Clock::now();
  std::size_t graphs = 0, mismatches = 0;
  for (std::uint64_t s = 0; s < 600; ++s, ++graphs) {
    const std::size_t n = 1 + s % 10;
    const auto e = random_edges(n, 0.1 + 0.08 * static_cast<double>(s % 10), derive_seed(101, s));
    const auto a = mvc_exact(n, e);
    const auto b = mvc_bruteforce(n, e);
    if (a.size() != b.size() || !is_vertex_cover(e, a.vertices) || !is_vertex_cover(e, b.vertices)) ++mismatches;
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 30.0, fmt("%zu graphs, %zu mismatches, %.2fs", graphs, mismatches, t)};
}

Verdict criterion_2() {
  std::size_t instances = 0, leaves = 0, uncovered = 0;
  auto check = [&](const StochasticModel& model) {
    const MemoOracle oracle(CoverOracle{}, model.graph());
    const auto p = exact_marginals(model, oracle);
    ++instances;
    for (auto alg : kAllAlgorithms) {
      const auto st = exact_algorithm(alg, model, p, kEps, oracle);
      leaves += st.leaves;
      uncovered += st.uncovered_leaves;
    }
  };
  for (const auto& inst : corpus()) {
    if (inst.model.edge_count() <= 8) check(inst.model);
  }
  return {uncovered == 0, fmt("%zu instances x 5 algorithms, %zu leaves, %zu uncovered", instances, leaves, uncovered)};
}

Verdict criterion_3() {
  const auto start = Clock::now();
  double worst = 0;
  std::string worst_id;
  std::size_t violations = 0;
  for (const auto& inst : corpus()) {
    const MemoOracle oracle(CoverOracle{}, inst.model.graph());
    const auto p = exact_marginals(inst.model, oracle);
    const auto st = exact_run(Algorithm::main, inst.model, p, kEps, oracle);
    const double size = static_cast<double>(st.expected_size);
    if (size > (1.5 + kEps) * p.opt + kTol) ++violations;
    if (p.opt > 0 && size / p.opt > worst) {
      worst = size / p.opt;
      worst_id = inst.id;
    }
  }
  const double t = seconds_since(start);
  return {violations == 0 && corpus().size() >= 200 && t < 300,
          fmt("%zu instances, worst E|S|/opt = %.6f (%s) vs %.2f, %zu violations, %.2fs", corpus().size(), worst,
              worst_id.c_str(), 1.5 + kEps, violations, t)};
}

Verdict criterion_4() {
  std::size_t bad_h = 0, bad_t = 0, bad_b = 0;
  double worst_h = 0, worst_t = 0, worst_b = 0;  // E|S| / bound
  for (const auto& inst : corpus()) {
    const MemoOracle oracle(CoverOracle{}, inst.model.graph());
    const auto p = exact_marginals(inst.model, oracle);
    if (p.opt <= 0) continue;
    double below = 0;
    for (double c : p.vertex) {
      if (c < 0.5 - kEps) below += c;
    }
    const double alpha = below / p.opt;
    const double h = static_cast<double>(exact_run(Algorithm::hallucinate, inst.model, p, kEps, oracle).expected_size);
    const double th = static_cast<double>(exact_run(Algorithm::threshold, inst.model, p, kEps, oracle).expected_size);
    const double b = static_cast<double>(exact_best_of_two(inst.model, p, kEps, oracle).expected_size);
    const double bh = 2 * p.opt, bt = p.opt * (1 - alpha * (0.5 + kEps)) / (0.5 - kEps),
                 bb = (5.0 / 3.0 + 3 * kEps) * p.opt;
    bad_h += h > bh + kTol;
    bad_t += th > bt + kTol;
    bad_b += b > bb + kTol;
    worst_h = std::max(worst_h, h / bh);
    worst_t = std::max(worst_t, th / bt);
    worst_b = std::max(worst_b, b / bb);
  }
  return {bad_h + bad_t + bad_b == 0,
          fmt("max E|S|/bound: hallucinate %.4f, threshold %.4f, best_of_two %.4f; violations %zu/%zu/%zu", worst_h,
              worst_t, worst_b, bad_h, bad_t, bad_b)};
}

Verdict criterion_5() {
  constexpr std::size_t kTrials = 100000;
  const std::vector<testing::CorpusInstance> instances{
      {"c5-p0.5", StochasticModel::independent(testing::with_probability(5, testing::cycle_edges(5), 0.5))},
      {"path6-p0.5", StochasticModel::independent(testing::with_probability(6, testing::path_edges(6), 0.5))},
      {"random-7", StochasticModel::independent(testing::random_small_graph(derive_seed(55, 7)))},
  };
  double worst_z = 0;
  std::size_t checks = 0, misses = 0;
  for (const auto& inst : instances) {
    const auto& model = inst.model;
    const MemoOracle oracle(CoverOracle{}, model.graph());
    const auto p = exact_marginals(model, oracle);
    const auto& c = p.vertex;
    const double tau = select_tau(c, kEps);
    for (auto alg : {Algorithm::hallucinate, Algorithm::threshold, Algorithm::analysis}) {
      std::vector<std::size_t> hits(model.vertex_count());
      for (std::size_t i = 0; i < kTrials; ++i) {
        const auto seeds = seeds_for(model, derive_seed(5, static_cast<std::uint64_t>(alg), i));
        const auto r = run_algorithm(alg, model, p, kEps, oracle, seeds.served, seeds.internal);
        for (Vertex v : r.cover.members()) ++hits[v];
      }
      for (std::size_t v = 0; v < c.size(); ++v) {
        double expected = c[v] * (2 - c[v]);
        if (alg == Algorithm::threshold) expected = c[v] >= 0.5 - kEps ? 1.0 : c[v];
        if (alg == Algorithm::analysis) {
          expected = c[v] > tau ? 1.0 : c[v] >= 1 - tau - kEps ? c[v] * (2 - c[v]) : c[v];
        }
        const double freq = static_cast<double>(hits[v]) / kTrials;
        const double se = std::sqrt(expected * (1 - expected) / kTrials);
        ++checks;
        if (se == 0) {
          misses += std::fabs(freq - expected) > 1e-12;
        } else {
          const double z = std::fabs(freq - expected) / se;
          worst_z = std::max(worst_z, z);
          misses += z > 4;
        }
      }
    }
  }
  return {misses == 0, fmt("%zu vertex laws at %zu trials, max |z| = %.2f, %zu beyond 4 SE", checks, kTrials,
                           worst_z, misses)};
}

Verdict criterion_6() {
  double worst_part = 1e300, worst_identity = 0;
  std::size_t negative = 0;
  for (const auto& inst : corpus()) {
    const MemoOracle oracle(CoverOracle{}, inst.model.graph());
    const auto p = exact_marginals(inst.model, oracle);
    const auto st = exact_run(Algorithm::analysis, inst.model, p, kEps, oracle);
    std::vector<double> inclusion;
    for (auto x : st.inclusion) inclusion.push_back(std::clamp(static_cast<double>(x), 0.0, 1.0));
    const auto l = budget_ledger(p.vertex, inclusion, kEps, *st.tau);
    for (auto s : l.part_sum) {
      worst_part = std::min(worst_part, static_cast<double>(s));
      negative += s < -kTol;
    }
    const long double identity = (1.5L + kEps) * p.opt - st.expected_size;
    worst_identity = std::max(worst_identity, static_cast<double>(std::fabs(l.total - identity)));
  }
  return {negative == 0 && worst_identity <= kTol,
          fmt("%zu instances, min partition sum %.3e, %zu below -1e-9, max identity gap %.3e", corpus().size(),
              worst_part, negative, worst_identity)};
}

Verdict criterion_7() {
  constexpr std::size_t kTrials = 100;
  constexpr std::size_t kSamples = 400;
  const auto start = Clock::now();
  const CoverOracle oracle(OracleKind::greedy2);
  struct Cell {
    std::size_t n;
    double p, eps, queries, bound;
  };
  std::vector<Cell> cells;
  for (std::size_t n : {50U, 100U, 200U}) {
    for (double p : {0.1, 0.3}) {
      const auto model = StochasticModel::independent([&] {
        std::vector<WeightedEdge> e;
        std::uint64_t k = 0;
        for (Vertex u = 0; u < n; ++u) {
          for (Vertex v = u + 1; v < n; ++v) {
            if (unit_uniform(derive_seed(7, n), k++) < 0.2) e.push_back({u, v, p, std::nullopt});
          }
        }
        return build_graph(n, e);
      }());
      const auto profile = estimate_marginals_t(model, oracle, kSamples, derive_seed(7, n, 1));
      for (double eps : {0.05, 0.1}) {
        double total = 0;
        for (std::size_t i = 0; i < kTrials; ++i) {
          total += static_cast<double>(alg_main(model, profile, eps, oracle, derive_seed(7, n, 2, i)).queried_edges);
        }
        const double nd = static_cast<double>(n);
        cells.push_back({n, p, eps, total / kTrials, nd / (eps * p)});
      }
    }
  }
  double fitted = 0, lo = 1e300, hi = 0;
  std::ostringstream table;
  for (const auto& c : cells) {
    const double k = c.queries / c.bound;
    fitted = std::max(fitted, k);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
    table << fmt(" [n=%zu p=%.1f eps=%.2f q=%.1f k=%.4f]", c.n, c.p, c.eps, c.queries, k);
  }
  const double spread = lo > 0 ? hi / lo : (hi > 0 ? 1e300 : 1.0);
  double faster = 0;  // largest q_a/q_b over (bound_a/bound_b) with bound_a >= bound_b
  for (const auto& a : cells) {
    for (const auto& b : cells) {
      if (a.bound >= b.bound && b.queries > 0) faster = std::max(faster, (a.queries / b.queries) / (a.bound / b.bound));
    }
  }
  const double t = seconds_since(start);
  return {fitted <= 10 && spread <= 2 && t < 600,
          fmt("C = %.4f (<= 10), normalized spread max/min = %.2f (<= 2), one-sided growth excess %.2f, %.1fs;",
              fitted, spread, faster, t) + table.str()};
}

Verdict criterion_8() {
  constexpr double eps = 0.5, delta = 1.0 / 6.0;
  constexpr std::size_t kRuns = 200;
  const auto model = StochasticModel::independent(testing::with_probability(6, testing::path_edges(6), 0.5));
  const auto exact = exact_marginals(model, CoverOracle{});
  const auto t = estimator_sample_count(6, eps, delta);
  std::size_t good = 0;
  double median_dev = 0;
  std::vector<double> devs;
  for (std::size_t run = 0; run < kRuns; ++run) {
    const auto est = estimate_marginals_t(model, CoverOracle{}, t, derive_seed(8, run), eps, delta);
    double worst = 0;
    for (std::size_t v = 0; v < 6; ++v) worst = std::max(worst, std::fabs(est.vertex[v] - exact.vertex[v]));
    devs.push_back(worst);
    good += worst <= eps / 12;
  }
  std::sort(devs.begin(), devs.end());
  median_dev = devs[kRuns / 2];
  const double rate = static_cast<double>(good) / kRuns;
  const double need = (1 - delta) - 0.07;
  return {t == 77 && rate >= need, fmt("t=%zu, event max|c̄-c| <= %.4f in %.3f of %zu runs (need %.3f), median "
                                       "max deviation %.4f",
                                       t, eps / 12, rate, kRuns, need, median_dev)};
}

Verdict criterion_9() {
  const CoverOracle greedy(OracleKind::greedy2);
  double worst = 0;
  std::size_t violations = 0;
  for (const auto& inst : corpus()) {
    const MemoOracle oracle(greedy, inst.model.graph());
    const auto p = exact_marginals(inst.model, oracle);
    const double size = static_cast<double>(exact_run(Algorithm::main, inst.model, p, kEps, oracle).expected_size);
    const double bound = (1.5 * greedy.alpha() + kEps) * p.opt;
    violations += size > bound + kTol;
    if (bound > 0) worst = std::max(worst, size / bound);
  }
  return {violations == 0, fmt("%zu instances, max E|S|/bound = %.4f, %zu violations", corpus().size(), worst,
                               violations)};
}

Verdict criterion_10() {
  bool pass = true;
  std::ostringstream detail;
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  std::size_t mismatches = 0, outcomes = 0;
  const CoverOracle brute(OracleKind::bruteforce);
  for (std::size_t s = 0; s < inst.rs.t(); ++s) {
    for (std::uint32_t bits = 0; bits < 64; ++bits, ++outcomes) {
      EdgeMask rs_present(inst.model.edge_count());
      for (std::size_t e = 0; e < 6; ++e) {
        if (bits >> e & 1U) rs_present.set(inst.rs_edge[0][e]);
      }
      const auto r = lowerbound_realization(inst, s, rs_present);
      mismatches += exact_opt_lb(inst, r) != brute.cover(inst.model.graph(), r.present).size();
    }
  }
  pass = pass && mismatches == 0 && outcomes == 192;
  detail << fmt("opt_lb vs brute force: %zu/%zu mismatches; ", mismatches, outcomes);

  const auto fc = nonadaptive_forced_cover(inst, EdgeMask(inst.model.edge_count()));
  const bool four_thirds = std::fabs(fc.ratio() - 4.0 / 3.0) <= 1e-12;
  pass = pass && four_thirds;
  detail << fmt("eps2=0.5 forced/opt = %.4f/%.4f = %.12f (4/3 %s); ", fc.forced, fc.expected_opt, fc.ratio(),
                four_thirds ? "ok" : "MISMATCH");

  constexpr double eps2 = 0.02;
  const auto family = replicate_rs_instance(six_cycle_rs(), eps2, 10);
  const double target = 1.5 / (1 + 2 * eps2);
  const std::size_t rs_edges = family.rs.edges.size() * family.copies;
  detail << fmt("k=10 eps2=0.02 target %.9f:", target);
  for (double frac : {0.0, 0.01, 0.05, 0.10}) {
    const auto budget = static_cast<std::size_t>(std::floor(frac * static_cast<double>(rs_edges) + 1e-9));
    const auto f = nonadaptive_forced_cover(family, matching_query_set(family, budget));
    const bool ok = std::fabs(f.ratio() - target) <= kTol;
    pass = pass && ok;
    detail << fmt(" [budget %zu: %.9f %s]", budget, f.ratio(), ok ? "ok" : "off");
  }
  return {pass, detail.str()};
}

Verdict criterion_11() {
  bool pass = true;
  std::ostringstream detail;
  for (double eps2 : {kDefaultEps2, 0.5}) {
    const auto inst = build_lowerbound_instance(six_cycle_rs(), eps2);
    const MemoOracle oracle(CoverOracle{}, inst.model.graph());
    const auto p = exact_marginals(inst.model, oracle);
    const auto st = exact_run(Algorithm::main, inst.model, p, kEps, oracle);
    const double size = static_cast<double>(st.expected_size);
    const bool ok = size <= (1.5 + kEps) * p.opt + kTol && st.uncovered_leaves == 0;
    pass = pass && ok;
    detail << fmt("[eps2=%.2f: E|S|=%.6f opt=%.6f ratio=%.4f tau=%.3f %s] ", eps2, size, p.opt, size / p.opt, *st.tau,
                  ok ? "ok" : "VIOLATION");
  }
  return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8,
                                                       criterion_9, criterion_10, criterion_11};
  std::size_t first = 1, last = criteria.size();
  if (argc > 1) {
    first = last = std::strtoul(argv[1], nullptr, 10);
    if (first < 1 || first > criteria.size()) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }
  int failed = 0;
  for (std::size_t k = first; k <= last; ++k) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[k - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %zu: %s (%.2fs) %s\n", k, v.pass ? "PASS" : "FAIL", seconds_since(start), v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
