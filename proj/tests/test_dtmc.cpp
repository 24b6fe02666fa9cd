#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "icsdfa/dtmc.hpp"
#include "icsdfa/traffic_gen.hpp"

using namespace icsdfa;
using namespace icsdfa::testing;

TEST(Dtmc, SingleSymbolStream) {
  const Dtmc d = build_dtmc(trace_of({A, A, A}));
  ASSERT_EQ(d.nodes().size(), 1u);
  EXPECT_EQ(d.node(A).freq, 3u);
  ASSERT_NE(d.edge(A, A), nullptr);
  EXPECT_EQ(d.edge(A, A)->count, 2u);
  EXPECT_DOUBLE_EQ(d.edge(A, A)->probability, 1.0);
}

TEST(Dtmc, Alternation) {
  const Dtmc d = build_dtmc(trace_of({A, B, A, B, A}));
  EXPECT_EQ(d.node(A).freq, 3u);
  EXPECT_EQ(d.node(B).freq, 2u);
  EXPECT_EQ(d.edge(A, B)->count, 2u);
  EXPECT_EQ(d.edge(B, A)->count, 2u);
  EXPECT_DOUBLE_EQ(d.edge(A, B)->probability, 1.0);
  EXPECT_DOUBLE_EQ(d.edge(B, A)->probability, 1.0);
}

TEST(Dtmc, RejectsShortTraceAndBadThreshold) {
  EXPECT_THROW(build_dtmc(trace_of({A})), std::invalid_argument);
  EXPECT_THROW(build_dtmc(trace_of({A, B}), 1.0), std::invalid_argument);
  EXPECT_THROW(build_dtmc(trace_of({A, B}), -0.1), std::invalid_argument);
}

TEST(Dtmc, RareBigramFilterUsesIncomingMaximum) {
  // C receives 40 from A and 3 from B: 3 < 0.1 * 40 is dropped.
  std::vector<SymbolId> s;
  for (int i = 0; i < 40; ++i) s.insert(s.end(), {A, C});
  for (int i = 0; i < 3; ++i) s.insert(s.end(), {B, C});
  const Dtmc d = build_dtmc(trace_of(s), 0.10, RareBasis::Target);
  EXPECT_EQ(max_incoming_count(d, C), 40u);
  EXPECT_EQ(d.edge(B, C), nullptr);
  EXPECT_EQ(d.raw_count(B, C), 3u);
  EXPECT_EQ(d.filtered_edges().at({B, C}), 3u);
  EXPECT_NE(d.edge(A, C), nullptr);
  // Nodes survive filtering.
  EXPECT_TRUE(d.contains(B));
}

TEST(Dtmc, FilterBoundaryIsStrict) {
  // count 4 against max 40: 4 < 4 is false, so the edge stays.
  std::vector<SymbolId> s;
  for (int i = 0; i < 40; ++i) s.insert(s.end(), {A, C});
  for (int i = 0; i < 4; ++i) s.insert(s.end(), {B, C});
  for (auto basis : {RareBasis::Target, RareBasis::Endpoints}) {
    const Dtmc d = build_dtmc(trace_of(s), 0.10, basis);
    EXPECT_NE(d.edge(B, C), nullptr);
  }
}

TEST(Dtmc, EndpointBasisDropsStrayEdgeIntoSparseSymbol) {
  // A,B alternate 40 times; one stray A->E. E is entered once, so only the
  // source side (A leaves 40 times towards B) marks the edge as rare.
  std::vector<SymbolId> s;
  for (int i = 0; i < 40; ++i) s.insert(s.end(), {A, B});
  s.insert(s.end(), {A, E});
  const Dtmc target = build_dtmc(trace_of(s), 0.10, RareBasis::Target);
  const Dtmc ends = build_dtmc(trace_of(s), 0.10, RareBasis::Endpoints);
  EXPECT_EQ(max_outgoing_count(ends, A), 40u);
  EXPECT_EQ(max_incoming_count(ends, E), 1u);
  EXPECT_NE(target.edge(A, E), nullptr);
  EXPECT_EQ(ends.edge(A, E), nullptr);
  EXPECT_EQ(ends.raw_count(A, E), 1u);
  EXPECT_NE(ends.edge(A, B), nullptr);
  EXPECT_TRUE(ends.contains(E));
}

TEST(Dtmc, EndpointBasisNeverKeepsMoreEdges) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 50; ++round) {
    Trace t;
    for (int i = 0; i < 300; ++i) t.events.push_back({i, sym(rng() % (2 + round % 7))});
    const Dtmc target = build_dtmc(t, 0.10, RareBasis::Target);
    const Dtmc ends = build_dtmc(t, 0.10, RareBasis::Endpoints);
    for (const auto& [e, _] : ends.edges()) EXPECT_NE(target.edge(e.first, e.second), nullptr);
    EXPECT_EQ(ends.edges().size() + ends.filtered_edges().size(),
              target.edges().size() + target.filtered_edges().size());
  }
}

TEST(Dtmc, RareBasisNames) {
  for (auto b : {RareBasis::Target, RareBasis::Endpoints}) EXPECT_EQ(parse_rare_basis(rare_basis_name(b)), b);
  EXPECT_EQ(rare_basis_name(RareBasis::Endpoints), "endpoints");
  EXPECT_THROW(parse_rare_basis("source"), std::invalid_argument);
}

TEST(Dtmc, MaxIncomingCount) {
  const Dtmc d = build_dtmc(trace_of({A, B, C}));
  EXPECT_EQ(max_outgoing_count(d, C), 0u);
  EXPECT_EQ(max_outgoing_count(d, A), 1u);
  EXPECT_EQ(max_incoming_count(d, A), 0u);
  EXPECT_EQ(max_incoming_count(d, B), 1u);
  EXPECT_THROW(max_incoming_count(d, D), std::out_of_range);
}

TEST(Dtmc, IncomingMaximumIsMeasuredBeforeFiltering) {
  // The 5 and 40 edges both enter C; 5 is above 10% of 40 and survives.
  std::vector<SymbolId> s;
  for (int i = 0; i < 40; ++i) s.insert(s.end(), {A, C});
  for (int i = 0; i < 5; ++i) s.insert(s.end(), {B, C});
  const Dtmc d = build_dtmc(trace_of(s));
  EXPECT_EQ(max_incoming_count(d, C), 40u);
  EXPECT_EQ(d.edge(B, C)->count, 5u);
}

TEST(Dtmc, ScenarioOneCountsMatchBruteForce) {
  const auto spec = builtin_scenario(1, 1, 300'000);
  const auto gen = generate(spec);
  const Dtmc d = build_dtmc(gen.trace, 0.0);
  std::map<Edge, std::uint64_t> pairs;
  std::map<Edge, std::uint64_t> same_burst;
  for (std::size_t i = 0; i + 1 < gen.trace.size(); ++i) {
    const Edge e{gen.trace.events[i].symbol, gen.trace.events[i + 1].symbol};
    ++pairs[e];
    const auto& a = gen.truth.entries[i];
    const auto& b = gen.truth.entries[i + 1];
    if (a.thread == b.thread && b.pos == a.pos + 1) ++same_burst[e];
  }
  ASSERT_EQ(d.edges().size(), pairs.size());
  for (const auto& [e, n] : pairs) EXPECT_EQ(d.edge(e.first, e.second)->count, n);

  // Intra-burst bigrams occur once per uninterrupted burst.
  for (const auto& th : spec.threads) {
    const auto bursts = static_cast<std::uint64_t>((spec.duration_ms + th.period_ms - 1) / th.period_ms);
    for (std::size_t i = 0; i + 1 < th.pattern.size(); ++i) {
      const Edge e{th.pattern[i], th.pattern[i + 1]};
      EXPECT_EQ(d.raw_count(e.first, e.second), same_burst[e]);
      EXPECT_LE(same_burst[e], bursts);
      EXPECT_GE(same_burst[e], bursts * 8 / 10);
    }
  }
}

class DtmcProperty : public ::testing::TestWithParam<int> {};

TEST_P(DtmcProperty, StochasticityConservationAndMonotonicity) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const std::size_t alphabet = 2 + rng() % 12;
  const std::size_t n = 2 + rng() % 2000;
  Trace t;
  for (std::size_t i = 0; i < n; ++i) t.events.push_back({static_cast<std::int64_t>(i), SymbolId{rng() % alphabet}});

  const Dtmc raw = build_dtmc(t, 0.0);
  std::uint64_t node_sum = 0, edge_sum = 0;
  for (const auto& [_, info] : raw.nodes()) node_sum += info.freq;
  for (const auto& [_, info] : raw.edges()) edge_sum += info.count;
  EXPECT_EQ(node_sum, n);
  EXPECT_EQ(edge_sum, n - 1);
  EXPECT_TRUE(raw.filtered_edges().empty());

  std::size_t prev_edges = raw.edges().size();
  for (double t_rare : {0.05, 0.1, 0.3, 0.6, 0.9}) {
    const Dtmc d = build_dtmc(t, t_rare);
    std::map<SymbolId, double> out;
    for (const auto& [e, info] : d.edges()) {
      out[e.first] += info.probability;
      EXPECT_GT(info.probability, 0.0);
      EXPECT_LE(info.probability, 1.0);
      EXPECT_NE(raw.edge(e.first, e.second), nullptr);
    }
    for (const auto& [_, sum] : out) EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_LE(d.edges().size(), prev_edges);
    prev_edges = d.edges().size();
    EXPECT_EQ(d.nodes().size(), raw.nodes().size());
  }
  EXPECT_EQ(format_dtmc_edges(build_dtmc(t)), format_dtmc_edges(build_dtmc(t)));
}

INSTANTIATE_TEST_SUITE_P(RandomTraces, DtmcProperty, ::testing::Range(1, 51));

TEST(Dtmc, EdgeDumpFormat) {
  const std::string dump = format_dtmc_edges(build_dtmc(trace_of({A, B, A})));
  EXPECT_NE(dump.find("000000000000000A,000000000000000B,1,1"), std::string::npos);
}
