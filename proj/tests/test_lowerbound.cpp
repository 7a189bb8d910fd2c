#include <gtest/gtest.h>

#include "svc/lowerbound.hpp"
#include "svc/marginals.hpp"
#include "test_util.hpp"

namespace svc {
namespace {

using testing::error_kind;

TEST(RSGraph, SixCycleIsValid) {
  const auto rs = six_cycle_rs();
  EXPECT_TRUE(validate_rs_graph(rs));
  EXPECT_EQ(rs.t(), 3U);
  EXPECT_EQ(rs.r(), 2U);
}

TEST(RSGraph, CompleteBipartiteIsNotInduced) {
  const RSGraph k22{2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {{0, 1}, {2, 3}}};
  const auto report = validate_rs_graph(k22);
  EXPECT_FALSE(report);
  EXPECT_NE(report.violation.find("induced"), std::string::npos);
  EXPECT_FALSE(report.witness.empty());
}

TEST(RSGraph, StructuralViolations) {
  auto rs = six_cycle_rs();
  rs.matchings = {{0, 3}, {2, 5}, {4}, {1}};
  EXPECT_NE(validate_rs_graph(rs).violation.find("size"), std::string::npos);
  rs = six_cycle_rs();
  rs.matchings = {{0, 1}, {2, 5}, {4, 3}};
  EXPECT_NE(validate_rs_graph(rs).violation.find("shares"), std::string::npos);
  rs = six_cycle_rs();
  rs.matchings = {{0, 3}, {2, 5}};
  EXPECT_NE(validate_rs_graph(rs).violation.find("no matching"), std::string::npos);
  rs = six_cycle_rs();
  rs.edges.push_back({0, 0});
  EXPECT_NE(validate_rs_graph(rs).violation.find("duplicate"), std::string::npos);
  EXPECT_EQ(error_kind([&] { build_lowerbound_instance(rs); }), ErrorKind::InvalidRSGraph);
}

TEST(RSGraph, SearchFindsValidGraphs) {
  const auto rs = search_rs_graph(6, 2, 4, 11);
  ASSERT_TRUE(rs);
  EXPECT_TRUE(validate_rs_graph(*rs));
  EXPECT_EQ(rs->t(), 4U);
  EXPECT_EQ(rs->r(), 2U);
}

TEST(LowerBound, ModelBookkeeping) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  const auto& m = inst.model;
  EXPECT_EQ(m.vertex_count(), 12U);
  EXPECT_EQ(m.edge_count(), 12U);
  EXPECT_EQ(m.correlated_edges().count(), 6U);
  EXPECT_EQ(m.scenarios().size(), 3U);
  EXPECT_EQ(m.uncertain_edge_count(), 6U);
  for (std::size_t x = 0; x < 6; ++x) {
    // Each RS vertex is missed by exactly one of the three planted matchings.
    EXPECT_NEAR(m.marginal(inst.exterior_edge[0][x]), 1.0 / 3.0, 1e-15);
  }
  for (std::size_t e = 0; e < 6; ++e) EXPECT_DOUBLE_EQ(m.marginal(inst.rs_edge[0][e]), 0.5);
}

TEST(LowerBound, ExactOptMatchesBruteForce) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  std::size_t checked = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::uint32_t bits = 0; bits < 64; ++bits) {
      EdgeMask rs_present(inst.model.edge_count());
      for (std::size_t e = 0; e < 6; ++e) {
        if (bits >> e & 1U) rs_present.set(inst.rs_edge[0][e]);
      }
      const auto r = lowerbound_realization(inst, s, rs_present);
      const auto brute = CoverOracle(OracleKind::bruteforce).cover(inst.model.graph(), r.present);
      EXPECT_EQ(exact_opt_lb(inst, r), brute.size()) << s << " " << bits;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 192U);
}

TEST(LowerBound, ExactOptMatchesEnumeratedOpt) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  long double total = 0;
  inst.model.for_each_realization([&](const EdgeMask& x, std::optional<std::size_t> s, long double w) {
    total += w * static_cast<long double>(exact_opt_lb(inst, Realization{x, s}));
  });
  EXPECT_NEAR(static_cast<double>(total), exact_marginals(inst.model, CoverOracle{}).opt, 1e-12);
  EXPECT_NEAR(static_cast<double>(total), nonadaptive_forced_cover(inst, EdgeMask(12)).expected_opt, 1e-12);
}

TEST(LowerBound, ScenarioRequired) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  EXPECT_EQ(error_kind([&] { exact_opt_lb(inst, Realization{EdgeMask(12)}); }), ErrorKind::ScenarioUnknown);
}

TEST(LowerBound, ForcedCoverNoQueries) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  const auto fc = nonadaptive_forced_cover(inst, EdgeMask(12));
  EXPECT_DOUBLE_EQ(fc.forced, 4.0);
  EXPECT_DOUBLE_EQ(fc.expected_opt, 3.0);
  EXPECT_DOUBLE_EQ(fc.ratio(), 4.0 / 3.0);
  const auto two = replicate_instance(inst, 2);
  const auto fc2 = nonadaptive_forced_cover(two, EdgeMask(two.model.edge_count()));
  EXPECT_DOUBLE_EQ(fc2.forced, 8.0);
  EXPECT_DOUBLE_EQ(fc2.expected_opt, 6.0);
}

TEST(LowerBound, RatioInvariantUnderCopies) {
  const auto one = build_lowerbound_instance(six_cycle_rs(), 0.02);
  const double base = nonadaptive_forced_cover(one, EdgeMask(one.model.edge_count())).ratio();
  for (std::size_t k : {2U, 5U, 10U}) {
    const auto inst = replicate_rs_instance(six_cycle_rs(), 0.02, k);
    EXPECT_NEAR(nonadaptive_forced_cover(inst, EdgeMask(inst.model.edge_count())).ratio(), base, 1e-12) << k;
  }
}

TEST(LowerBound, QueryingAMatchingLowersForcedCover) {
  const auto inst = build_lowerbound_instance(six_cycle_rs(), 0.5);
  const auto q = matching_query_set(inst, 2);
  EXPECT_EQ(q.count(), 2U);
  // One of three matchings fully queried: (4 + 4 + 3) / 3.
  EXPECT_NEAR(nonadaptive_forced_cover(inst, q).forced, 11.0 / 3.0, 1e-12);
}

TEST(LowerBound, SingleMatchingFamily) {
  const RSGraph rs{2, {{0, 0}, {1, 1}}, {{0, 1}}};
  ASSERT_TRUE(validate_rs_graph(rs));
  const auto inst = build_lowerbound_instance(rs, 0.5);
  const auto fc = nonadaptive_forced_cover(inst, EdgeMask(inst.model.edge_count()));
  EXPECT_DOUBLE_EQ(fc.forced, 2.0);
  EXPECT_DOUBLE_EQ(fc.expected_opt, 1.0);
}

TEST(LowerBound, LargeFamiliesUseASampler) {
  const auto inst = replicate_rs_instance(six_cycle_rs(), 0.02, 12);
  EXPECT_FALSE(inst.model.has_scenario_space());
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto r = inst.model.sample(s);
    EXPECT_EQ((r.present & inst.model.correlated_edges()).count(), 12U * 2U);
  }
}

}  // namespace
}  // namespace svc
