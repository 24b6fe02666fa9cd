#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "icsdfa/statechart.hpp"

using namespace icsdfa;
using namespace icsdfa::testing;

namespace {

Statechart random_statechart(std::mt19937_64& rng) {
  std::vector<PatternDfa> dfas;
  const std::size_t n = 1 + rng() % 5;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t len = 1 + rng() % 12;
    std::vector<SymbolId> p;
    std::vector<double> tns;
    for (std::size_t i = 0; i < len; ++i) {
      p.push_back(sym(1 + rng() % 20));
      tns.push_back(static_cast<double>(rng() % 400) / 4.0);
    }
    dfas.emplace_back(static_cast<int>(d), std::move(p), std::move(tns));
  }
  return Statechart(std::move(dfas));
}

}  // namespace

TEST(Statechart, PhiIsRebuiltFromPatterns) {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 100; ++round) {
    const Statechart sc = random_statechart(rng);
    std::map<SymbolId, std::vector<int>> expect;
    for (const auto& d : sc.dfas()) {
      for (SymbolId s : d.pattern()) {
        auto& v = expect[s];
        if (std::find(v.begin(), v.end(), d.id()) == v.end()) v.push_back(d.id());
      }
    }
    EXPECT_EQ(sc.phi_map(), expect);
    for (std::size_t d = 0; d < sc.size(); ++d) EXPECT_EQ(sc.dfas()[d].id(), static_cast<int>(d));
    EXPECT_EQ(parse_model(format_model(sc)).phi_map(), sc.phi_map());
  }
}

TEST(PredictedArrival, SingleHop) {
  Statechart sc({PatternDfa(0, {A, B, C}, {50, 50, 200})});
  sc.reset(1000);
  EXPECT_DOUBLE_EQ(sc.predicted_arrival(B, 0), 1050.0);
}

TEST(PredictedArrival, RetransmissionIsTLast) {
  Statechart sc({PatternDfa(0, {A, B, C}, {50, 50, 200})});
  sc.reset(1000);
  EXPECT_DOUBLE_EQ(sc.predicted_arrival(A, 0), 1000.0);
}

TEST(PredictedArrival, PathSumUpToMissTarget) {
  Statechart sc({PatternDfa(0, {A, B, C, D}, {10, 20, 30, 940})});
  sc.reset(0);
  EXPECT_DOUBLE_EQ(sc.predicted_arrival(C, 0), 30.0);
  EXPECT_THROW(sc.predicted_arrival(E, 0), std::invalid_argument);
}

TEST(PredictedArrival, AdditivityAlongNormalSteps) {
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    Statechart sc = random_statechart(rng);
    sc.reset(static_cast<std::int64_t>(rng() % 10000));
    for (std::size_t d = 0; d < sc.size(); ++d) {
      const auto& dfa = sc.dfas()[d];
      const std::size_t L = dfa.length();
      auto& rt = sc.runtime(static_cast<int>(d));
      rt.current = rng() % L;
      const std::size_t q1 = (rt.current + 1) % L;
      const std::size_t q2 = (rt.current + 2) % L;
      // Only meaningful when both targets are reached by Normal transitions.
      if (L < 3) continue;
      const SymbolId s1 = dfa.pattern()[q1];
      const SymbolId s2 = dfa.pattern()[q2];
      if (peek(dfa, rt, s1).event != TransitionEvent::Normal) continue;
      if (peek(dfa, rt, s2).next_state != q2) continue;
      EXPECT_DOUBLE_EQ(sc.predicted_arrival(s2, static_cast<int>(d)),
                       sc.predicted_arrival(s1, static_cast<int>(d)) + dfa.tns()[q1]);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Selector, UnknownSymbol) {
  Statechart sc({PatternDfa(0, {A, B}, {1, 1})});
  sc.reset(0);
  EXPECT_FALSE(sc.select_dfa(E, 5).has_value());
}

TEST(Selector, SingleOwner) {
  Statechart sc({PatternDfa(0, {A}, {1}), PatternDfa(1, {B}, {1}), PatternDfa(2, {C}, {1})});
  sc.reset(0);
  EXPECT_EQ(sc.select_dfa(C, 5), 2);
}

TEST(Selector, ClosestPredictionWins) {
  // Shared X: DFA 0 predicts 980, DFA 1 predicts 1500.
  const SymbolId X = sym(0x99);
  Statechart sc({PatternDfa(0, {A, X}, {980, 20}), PatternDfa(1, {B, X}, {1500, 20})});
  sc.reset(0);
  EXPECT_DOUBLE_EQ(sc.predicted_arrival(X, 0), 980.0);
  EXPECT_DOUBLE_EQ(sc.predicted_arrival(X, 1), 1500.0);
  EXPECT_EQ(sc.select_dfa(X, 1000), 0);
  EXPECT_EQ(sc.select_dfa(X, 1400), 1);
  EXPECT_EQ(sc.select_dfa(X, 1240), 0);  // tie at 260 each
}

TEST(Selector, DeterministicAndPure) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 100; ++round) {
    Statechart sc = random_statechart(rng);
    sc.reset(0);
    const auto before = sc.runtimes();
    for (std::uint64_t x = 0; x <= 21; ++x) {
      const auto t = static_cast<std::int64_t>(rng() % 1000);
      EXPECT_EQ(sc.select_dfa(sym(x), t), sc.select_dfa(sym(x), t));
    }
    EXPECT_EQ(sc.runtimes(), before);
  }
}

TEST(Size, SumOfDfaSizes) {
  EXPECT_EQ(statechart_model_size(Statechart({PatternDfa(0, {A, B}, {1, 1}), PatternDfa(1, {C}, {1})})), 3u);
  EXPECT_EQ(statechart_model_size(Statechart({PatternDfa(0, {A, B, C, D, E}, {1, 1, 1, 1, 1})})), 5u);
}

TEST(Memory, FormulaExamples) {
  const Statechart three({PatternDfa(0, {A, B}, {1, 1}), PatternDfa(1, {C}, {1})});
  EXPECT_EQ(memory_footprint(three, 3), 120u);
  EXPECT_EQ(distinct_symbols(three), 3u);
  EXPECT_EQ(memory_footprint(Statechart({PatternDfa(0, {A}, {1})}), 1), 28u);
}

TEST(Memory, ClosedFormOnRandomStatecharts) {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 100; ++round) {
    const Statechart sc = random_statechart(rng);
    std::size_t ms = 0;
    std::set<SymbolId> syms;
    for (const auto& d : sc.dfas()) {
      ms += d.length();
      syms.insert(d.pattern().begin(), d.pattern().end());
    }
    const std::size_t extra = rng() % 5;
    EXPECT_EQ(memory_footprint(sc, syms.size() + extra), ms * (syms.size() + extra + 1) * 8 + sc.size() * 12);
  }
}

TEST(Enforce, NoiselessInterleavingOnlyWarmsUp) {
  // Two DFAs, bursts never overlap.
  const Statechart sc({PatternDfa(0, {A, B, C}, {1, 1, 98}), PatternDfa(1, {D, E}, {1, 249})});
  Trace t;
  for (std::int64_t ms = 0; ms < 3000; ++ms) {
    if (ms % 100 == 0) t.events.push_back({ms, A});
    if (ms % 100 == 1) t.events.push_back({ms, B});
    if (ms % 100 == 2) t.events.push_back({ms, C});
    if (ms % 250 == 50) t.events.push_back({ms, D});
    if (ms % 250 == 51) t.events.push_back({ms, E});
  }
  const auto res = enforce(sc, t);
  EXPECT_EQ(res.summary.total, t.size());
  EXPECT_EQ(res.summary.false_alarms, 0u);
  EXPECT_EQ(res.summary.warmup, 5u);
  EXPECT_EQ(res.summary.count(TransitionEvent::Normal), t.size() - 5);
  EXPECT_DOUBLE_EQ(res.summary.normal_fraction, 1.0);
}

TEST(Enforce, CountsPartitionTheTraceAndModelIsUntouched) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    const Statechart sc = random_statechart(rng);
    const Statechart copy = sc;
    Trace t;
    std::int64_t time = 0;
    for (int i = 0; i < 500; ++i) {
      time += static_cast<std::int64_t>(rng() % 20);
      t.events.push_back({time, sym(rng() % 25)});
    }
    const auto res = enforce(sc, t);
    std::size_t sum = res.summary.warmup;
    for (auto c : res.summary.counts) sum += c;
    EXPECT_EQ(sum, t.size());
    EXPECT_EQ(res.records.size(), t.size());
    EXPECT_EQ(res.summary.false_alarms, res.summary.count(TransitionEvent::Miss) + res.summary.count(TransitionEvent::Unknown));
    EXPECT_LE(res.summary.selector_unknown, res.summary.count(TransitionEvent::Unknown));
    for (const auto& r : res.records) {
      EXPECT_EQ(!r.dfa_id.has_value(), r.event == TransitionEvent::Unknown);
    }
    EXPECT_EQ(sc, copy);
    EXPECT_EQ(sc.runtimes(), copy.runtimes());
    // Same result twice.
    EXPECT_EQ(enforce(sc, t).summary.false_alarms, res.summary.false_alarms);
  }
}

TEST(Enforce, SelectorUnknownMutatesNothing) {
  Statechart sc({PatternDfa(0, {A, B}, {1, 99})});
  sc.reset(0);
  const auto before = sc.runtimes();
  Trace t;
  t.events.push_back({10, E});
  const auto res = enforce_in_place(sc, t);
  EXPECT_EQ(sc.runtimes(), before);
  EXPECT_EQ(res.summary.selector_unknown, 1u);
  EXPECT_FALSE(res.records[0].dfa_id.has_value());
}

TEST(Enforce, EmptyTrace) {
  const Statechart sc({PatternDfa(0, {A}, {1})});
  const auto res = enforce(sc, Trace{});
  EXPECT_TRUE(res.records.empty());
  EXPECT_EQ(format_event_log(res.records), "time_ms,symbol,dfa_id,event\n");
  EXPECT_DOUBLE_EQ(res.summary.false_alarm_rate, 0.0);
}

TEST(Enforce, BucketsNormalizeByAer) {
  // 10 events per second, one Unknown per 5 s bucket.
  const Statechart sc({PatternDfa(0, {A}, {100})});
  Trace t;
  for (std::int64_t ms = 0; ms < 10000; ms += 100) t.events.push_back({ms, ms % 5000 == 2500 ? E : A});
  const auto res = enforce(sc, t);
  ASSERT_EQ(res.summary.buckets.size(), 2u);
  const double aer = 100.0 / 9.9;
  EXPECT_NEAR(res.summary.aer, aer, 1e-9);
  EXPECT_NEAR(res.summary.buckets[0].false_alarm_pct_of_aer, 100.0 / (aer * 5.0), 1e-9);
  const std::string text = format_summary(res.summary);
  EXPECT_EQ(text.rfind("bucket_start_ms,false_alarm_pct_of_aer\n0,", 0), 0u);
  EXPECT_NE(text.find("\ntotal,"), std::string::npos);
}

TEST(EventLog, Format) {
  const Statechart sc({PatternDfa(0, {A, B}, {1, 99})});
  Trace t;
  t.events = {{0, A}, {1, B}, {2, E}};
  EXPECT_EQ(format_event_log(enforce(sc, t).records),
            "time_ms,symbol,dfa_id,event\n0,000000000000000A,0,R\n1,000000000000000B,0,N\n2,000000000000000E,-,U\n");
}

TEST(ModelFile, RoundTrip) {
  std::mt19937_64 rng(6);
  const auto path = std::filesystem::temp_directory_path() / "icsdfa_model_roundtrip.txt";
  for (int round = 0; round < 50; ++round) {
    const Statechart sc = random_statechart(rng);
    write_model(sc, path);
    EXPECT_EQ(read_model(path), sc);
  }
  std::filesystem::remove(path);
}

TEST(ModelFile, ExactLayout) {
  const Statechart sc({PatternDfa(0, {A, B}, {1, 299.5})});
  EXPECT_EQ(format_model(sc), "statechart v1\nn_dfas=1\ndfa 0\npattern=000000000000000A,000000000000000B\ntns=1,299.5\n");
}

TEST(ModelFile, RejectsMalformed) {
  EXPECT_THROW(parse_model(""), std::runtime_error);
  EXPECT_THROW(parse_model("statechart v2\nn_dfas=0\n"), std::runtime_error);
  EXPECT_THROW(parse_model("statechart v1\nn_dfas=0\n"), std::runtime_error);
  EXPECT_THROW(parse_model("statechart v1\nn_dfas=1\ndfa 0\npattern=000000000000000A\ntns=1,2\n"), std::runtime_error);
  EXPECT_THROW(parse_model("statechart v1\nn_dfas=1\ndfa 0\npattern=XYZ\ntns=1\n"), std::runtime_error);
  EXPECT_THROW(parse_model("statechart v1\nn_dfas=2\ndfa 0\npattern=000000000000000A\ntns=1\n"), std::runtime_error);
}
