#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "svc/marginals.hpp"
#include "test_util.hpp"

namespace svc {
namespace {

using testing::error_kind;

StochasticModel single_edge(double p) { return StochasticModel::independent(build_graph(2, {{0, 1, p}})); }

TEST(ExactMarginals, SingleEdgeCertain) {
  const auto p = exact_marginals(single_edge(1.0), CoverOracle{});
  EXPECT_EQ(p.vertex, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(p.edge, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(p.opt, 1.0);
  EXPECT_FALSE(p.is_estimated());
}

TEST(ExactMarginals, SingleEdgeHalf) {
  const auto p = exact_marginals(single_edge(0.5), CoverOracle{});
  EXPECT_DOUBLE_EQ(p.vertex[0], 0.5);
  EXPECT_DOUBLE_EQ(p.vertex[1], 0.0);
  EXPECT_DOUBLE_EQ(p.opt, 0.5);
}

TEST(ExactMarginals, TriangleCertain) {
  const auto m = StochasticModel::independent(testing::with_probability(3, testing::complete_edges(3), 1.0));
  const auto p = exact_marginals(m, CoverOracle{});
  EXPECT_EQ(p.vertex, (std::vector<double>{1.0, 1.0, 0.0}));
  EXPECT_DOUBLE_EQ(p.opt, 2.0);
}

TEST(ExactMarginals, Refusals) {
  const CoverOracle random(OracleKind::exact, TieBreak::seeded_random);
  EXPECT_EQ(error_kind([&] { exact_marginals(single_edge(0.5), random); }), ErrorKind::NonCanonicalOracle);
  const auto big = StochasticModel::independent(testing::with_probability(8, testing::complete_edges(8), 0.5));
  EXPECT_EQ(error_kind([&] { exact_marginals(big, CoverOracle{}); }), ErrorKind::InstanceTooLarge);
  EXPECT_EQ(error_kind([&] { expected_opt(big, CoverOracle{}, OptMode::exact); }), ErrorKind::InstanceTooLarge);
  // Certain edges do not count toward the enumeration limit.
  const auto certain = StochasticModel::independent(testing::with_probability(8, testing::complete_edges(8), 1.0));
  EXPECT_DOUBLE_EQ(exact_marginals(certain, CoverOracle{}).opt, 7.0);
}

TEST(ExactMarginals, ProfileInvariants) {
  for (const auto& inst : testing::small_corpus(120)) {
    const auto p = exact_marginals(inst.model, CoverOracle{});
    const auto& g = inst.model.graph();
    double sum = 0;
    for (double c : p.vertex) {
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      sum += c;
    }
    EXPECT_NEAR(sum, p.opt, 1e-12) << inst.id;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const double cu = p.vertex[g.edge(e).u], cv = p.vertex[g.edge(e).v];
      EXPECT_LE(std::max(cu, cv), p.edge[e] + 1e-12) << inst.id;
      EXPECT_LE(p.edge[e], std::min(1.0, cu + cv) + 1e-12) << inst.id;
    }
  }
}

TEST(ExactMarginals, CertainEdgesNeverLowerOpt) {
  for (const auto& inst : testing::small_corpus(120)) {
    const auto& g = inst.model.graph();
    std::vector<WeightedEdge> all;
    for (std::size_t e = 0; e < g.edge_count(); ++e) all.push_back({g.edge(e).u, g.edge(e).v, 1.0, std::nullopt});
    const auto full = StochasticModel::independent(build_graph(g.vertex_count(), all));
    EXPECT_GE(exact_marginals(full, CoverOracle{}).opt + 1e-12, exact_marginals(inst.model, CoverOracle{}).opt)
        << inst.id;
  }
}

TEST(ExpectedOpt, Examples) {
  EXPECT_DOUBLE_EQ(expected_opt(single_edge(0.5), CoverOracle{}, OptMode::exact).value, 0.5);
  std::vector<WeightedEdge> matching;
  for (Vertex i = 0; i < 4; ++i) matching.push_back({2 * i, 2 * i + 1, 1.0, std::nullopt});
  EXPECT_DOUBLE_EQ(expected_opt(StochasticModel::independent(build_graph(8, matching)), CoverOracle{}, OptMode::exact).value,
                   4.0);
}

TEST(ExpectedOpt, MonteCarloAgreesWithEnumeration) {
  const auto m = StochasticModel::independent(testing::with_probability(3, testing::complete_edges(3), 0.5));
  const auto exact = expected_opt(m, CoverOracle{}, OptMode::exact);
  EXPECT_DOUBLE_EQ(exact.value, 1.0);
  const auto mc = expected_opt(m, CoverOracle{}, OptMode::monte_carlo, 20000, 5);
  EXPECT_GT(mc.std_error, 0.0);
  EXPECT_LE(std::fabs(mc.value - exact.value), 3 * mc.std_error);
  EXPECT_EQ(error_kind([&] { expected_opt(m, CoverOracle{}, OptMode::monte_carlo, 0); }),
            ErrorKind::ParameterOutOfRange);
}

TEST(Estimator, SampleCount) {
  EXPECT_EQ(estimator_sample_count(6, 0.5, 1.0 / 6), 77U);
  EXPECT_EQ(estimator_sample_count(2, 0.5, 0.5), 5U);
  EXPECT_EQ(error_kind([] { estimator_sample_count(6, 0.0, 0.1); }), ErrorKind::ParameterOutOfRange);
  EXPECT_EQ(error_kind([] { estimator_sample_count(6, 0.1, 1.0); }), ErrorKind::ParameterOutOfRange);
}

TEST(Estimator, CertainEdgeIsExact) {
  for (std::size_t t : {1U, 7U, 100U}) {
    const auto p = estimate_marginals_t(single_edge(1.0), CoverOracle{}, t, 3);
    EXPECT_EQ(p.vertex[0], 1.0);
    EXPECT_TRUE(p.is_estimated());
    EXPECT_EQ(p.estimate->t, t);
  }
}

TEST(Estimator, SingleEdgeRepeatedRuns) {
  const double eps = 0.5, delta = 0.5;
  int good = 0;
  for (std::uint64_t run = 0; run < 200; ++run) {
    const auto p = estimate_marginals(single_edge(0.5), CoverOracle{}, eps, delta, derive_seed(77, run));
    good += std::fabs(p.vertex[0] - 0.5) <= eps / 4;
  }
  EXPECT_GE(good, static_cast<int>((1 - delta) * 200));
}

TEST(Estimator, IndependentOfWorkerCount) {
  const auto m = StochasticModel::independent(testing::with_probability(6, testing::cycle_edges(6), 0.5));
  const auto a = estimate_marginals_t(m, CoverOracle{}, 1000, 9, 0, 0, {1, 64});
  const auto b = estimate_marginals_t(m, CoverOracle{}, 1000, 9, 0, 0, {4, 64});
  EXPECT_EQ(a.vertex, b.vertex);
  EXPECT_EQ(a.edge, b.edge);
  EXPECT_EQ(a.opt, b.opt);
}

TEST(Estimator, ErrorShrinksWithSamples) {
  const auto m = StochasticModel::independent(testing::with_probability(5, testing::path_edges(5), 0.5));
  const auto exact = exact_marginals(m, CoverOracle{});
  auto median_error = [&](std::size_t t) {
    std::vector<double> errs;
    for (std::uint64_t run = 0; run < 41; ++run) {
      const auto p = estimate_marginals_t(m, CoverOracle{}, t, derive_seed(t, run));
      double worst = 0;
      for (std::size_t v = 0; v < 5; ++v) worst = std::max(worst, std::fabs(p.vertex[v] - exact.vertex[v]));
      errs.push_back(worst);
    }
    std::nth_element(errs.begin(), errs.begin() + 20, errs.end());
    return errs[20];
  };
  double prev = median_error(50);
  for (std::size_t t : {200U, 800U, 3200U}) {
    const double cur = median_error(t);
    EXPECT_LE(cur, prev) << t;
    prev = cur;
  }
}

}  // namespace
}  // namespace svc
