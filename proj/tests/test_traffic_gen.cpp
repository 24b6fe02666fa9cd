#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "icsdfa/metrics.hpp"
#include "icsdfa/traffic_gen.hpp"

using namespace icsdfa;
using namespace icsdfa::testing;

namespace {

struct Row {
  int length, unique;
  std::int64_t period;
};

const std::vector<std::vector<Row>> kTable = {
    {{6, 6, 300}, {4, 4, 950}},
    {{6, 6, 300}, {4, 4, 950}},
    {{6, 4, 300}, {4, 1, 400}},
    {{6, 4, 300}, {4, 2, 950}},
    {{10, 9, 300}, {4, 2, 600}, {4, 3, 200}},
    {{10, 7, 300}, {10, 7, 950}, {10, 7, 2000}},
    {{10, 8, 300}, {8, 7, 350}, {10, 9, 400}},
    {{10, 8, 300}, {8, 7, 850}, {10, 9, 1300}},
    {{10, 7, 300}, {8, 4, 350}, {10, 8, 400}},
    {{6, 3, 300}, {4, 2, 350}, {6, 2, 400}},
    {{10, 8, 250}, {4, 2, 650}, {6, 4, 1100}, {8, 7, 420}},
    {{6, 4, 250}, {4, 4, 350}, {10, 9, 550}, {8, 7, 420}},
    {{10, 9, 300}, {4, 2, 600}, {4, 2, 200}, {6, 3, 350}},
};

}  // namespace

TEST(Generate, ScheduleArithmetic) {
  ScenarioSpec spec;
  spec.threads.push_back({{A, B}, 300, 0});
  spec.duration_ms = 900;
  const auto gen = generate(spec);
  std::vector<std::int64_t> times;
  for (const auto& e : gen.trace.events) times.push_back(e.time_ms);
  EXPECT_EQ(times, (std::vector<std::int64_t>{0, 1, 300, 301, 600, 601}));
  EXPECT_EQ(gen.trace.events[2].symbol, A);
  EXPECT_EQ(gen.shifted, 0u);
  EXPECT_DOUBLE_EQ(time_overlap(gen.truth), 0.0);
}

TEST(Generate, NonOverlappingThreadsInterleave) {
  ScenarioSpec spec;
  spec.threads.push_back({{A, B}, 100, 0});
  spec.threads.push_back({{C}, 250, 0});
  spec.duration_ms = 1000;
  // C bursts start at 0, 250, 500, 750: 0 and 500 collide with A.
  const auto gen = generate(spec);
  ASSERT_EQ(gen.trace.size(), 24u);
  for (std::size_t i = 0; i < gen.trace.size(); ++i) {
    const auto& e = gen.truth.entries[i];
    EXPECT_EQ(gen.trace.events[i].symbol, spec.threads[static_cast<std::size_t>(e.thread)].pattern[static_cast<std::size_t>(e.pos)]);
    EXPECT_GE(gen.trace.events[i].time_ms, e.scheduled_ms);
  }
  EXPECT_NO_THROW(validate_trace(gen.trace));
  for (std::size_t i = 1; i < gen.trace.size(); ++i) EXPECT_LT(gen.trace.events[i - 1].time_ms, gen.trace.events[i].time_ms);
}

TEST(Generate, DeterministicPerSeed) {
  for (int id = 1; id <= kBuiltinCount; ++id) {
    const auto a = generate(builtin_scenario(id, 17, 60'000));
    const auto b = generate(builtin_scenario(id, 17, 60'000));
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.truth, b.truth);
    EXPECT_EQ(format_trace(a.trace), format_trace(b.trace));
    const auto c = generate(builtin_scenario(id, 18, 60'000));
    EXPECT_NE(a.truth, c.truth);
  }
}

TEST(Generate, ScheduleFidelityWithoutJitter) {
  for (int id = 1; id <= kBuiltinCount; ++id) {
    const auto spec = builtin_scenario(id, 1, 60'000, 0);
    const auto gen = generate(spec);
    for (const auto& e : gen.truth.entries) {
      const auto period = spec.threads[static_cast<std::size_t>(e.thread)].period_ms;
      EXPECT_EQ((e.scheduled_ms - e.pos) % period, 0);
    }
  }
}

TEST(Generate, JitterStaysInBounds) {
  const auto spec = builtin_scenario(7, 3, 100'000, 4);
  const auto gen = generate(spec);
  for (const auto& e : gen.truth.entries) {
    const auto period = spec.threads[static_cast<std::size_t>(e.thread)].period_ms;
    const auto start = e.scheduled_ms - e.pos;
    const auto nominal = ((start + period / 2) / period) * period;
    EXPECT_LE(std::abs(start - nominal), 4);
  }
}

TEST(Generate, CountLawAndCyclicProjection) {
  for (int id = 1; id <= kBuiltinCount; ++id) {
    const auto spec = builtin_scenario(id, 1, 200'000);
    const auto gen = generate(spec);
    ASSERT_EQ(gen.truth.entries.size(), gen.trace.size());
    std::vector<std::size_t> count(spec.threads.size(), 0);
    std::vector<int> expect_pos(spec.threads.size(), 0);
    for (const auto& e : gen.truth.entries) {
      const auto k = static_cast<std::size_t>(e.thread);
      ++count[k];
      EXPECT_EQ(e.pos, expect_pos[k]);
      expect_pos[k] = (e.pos + 1) % static_cast<int>(spec.threads[k].pattern.size());
    }
    for (std::size_t k = 0; k < spec.threads.size(); ++k) {
      const auto& th = spec.threads[k];
      const auto full = static_cast<std::size_t>(spec.duration_ms / th.period_ms);
      EXPECT_GE(count[k], full * th.pattern.size()) << id;
      EXPECT_LE(count[k], (full + 1) * th.pattern.size()) << id;
      EXPECT_EQ(count[k] % th.pattern.size(), 0u);
    }
  }
}

TEST(Builtin, MatchesTable) {
  const auto all = builtin_scenarios();
  ASSERT_EQ(all.size(), 13u);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& spec = all[i];
    ASSERT_EQ(spec.threads.size(), kTable[i].size());
    std::map<SymbolId, std::set<std::size_t>> owners;
    for (std::size_t k = 0; k < spec.threads.size(); ++k)
      for (SymbolId s : spec.threads[k].pattern) owners[s].insert(k);
    for (std::size_t k = 0; k < spec.threads.size(); ++k) {
      const auto& th = spec.threads[k];
      EXPECT_EQ(static_cast<int>(th.pattern.size()), kTable[i][k].length);
      EXPECT_EQ(th.period_ms, kTable[i][k].period);
      EXPECT_EQ(th.jitter_ms, kDefaultJitterMs);
      int unique = 0;
      for (SymbolId s : th.pattern) unique += owners[s].size() == 1;
      EXPECT_EQ(unique, kTable[i][k].unique) << "scenario " << i + 1 << " thread " << k;
    }
    EXPECT_NO_THROW(validate_scenario(spec));
    EXPECT_EQ(builtin_scenario(static_cast<int>(i) + 1), spec);
  }
}

TEST(Builtin, SymbolsRepeatWithinAPattern) {
  // Scenario 10's third thread has four shared slots drawn from a pool of two.
  const auto spec = builtin_scenario(10);
  std::set<SymbolId> distinct(spec.threads[2].pattern.begin(), spec.threads[2].pattern.end());
  EXPECT_LT(distinct.size(), spec.threads[2].pattern.size());
}

TEST(Builtin, BadIdThrows) {
  EXPECT_THROW(builtin_scenario(0), std::out_of_range);
  EXPECT_THROW(builtin_scenario(14), std::out_of_range);
}

TEST(ScenarioSpec, Validation) {
  ScenarioSpec spec;
  spec.duration_ms = 1000;
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
  spec.threads.push_back({{}, 100, 0});
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
  spec.threads[0] = {{A, B, C}, 3, 0};
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
  spec.threads[0] = {{A, B, C}, 10, 4};
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
  spec.threads[0] = {{A, B, C}, 10, -1};
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
  spec.threads[0] = {{A, B, C}, 10, 3};
  EXPECT_NO_THROW(validate_scenario(spec));
  spec.duration_ms = 0;
  EXPECT_THROW(validate_scenario(spec), std::invalid_argument);
}

TEST(ScenarioFile, RoundTrip) {
  for (int id = 1; id <= kBuiltinCount; ++id) {
    const auto spec = builtin_scenario(id, 99, 12345, 3);
    EXPECT_EQ(parse_scenario_text(format_scenario(spec)), spec);
  }
  const auto path = std::filesystem::temp_directory_path() / "icsdfa_scenario.txt";
  std::ofstream(path) << format_scenario(builtin_scenario(5));
  EXPECT_EQ(parse_scenario(path), builtin_scenario(5));
  std::filesystem::remove(path);
}

TEST(ScenarioFile, ParsesCommentsAndDefaults) {
  const auto spec = parse_scenario_text(
      "# two threads\nduration_ms=900\nseed=4\n\npattern=000000000000000A,000000000000000B\nperiod_ms=300\n"
      "pattern=000000000000000C\nperiod_ms=50\njitter_ms=0\n");
  ASSERT_EQ(spec.threads.size(), 2u);
  EXPECT_EQ(spec.threads[0].jitter_ms, kDefaultJitterMs);
  EXPECT_EQ(spec.threads[1].jitter_ms, 0);
  EXPECT_EQ(spec.seed, 4u);
}

TEST(ScenarioFile, RejectsMalformed) {
  EXPECT_THROW(parse_scenario_text("pattern=000000000000000A\nperiod_ms=10\n"), std::invalid_argument);
  EXPECT_THROW(parse_scenario_text("duration_ms=10\nperiod_ms=10\n"), std::invalid_argument);
  EXPECT_THROW(parse_scenario_text("duration_ms=10\nbogus=1\n"), std::invalid_argument);
  EXPECT_THROW(parse_scenario_text("duration_ms=ten\n"), std::invalid_argument);
  EXPECT_THROW(parse_scenario_text("duration_ms=10\npattern=ZZ\nperiod_ms=5\n"), std::invalid_argument);
}

TEST(GroundTruthFile, Format) {
  ScenarioSpec spec;
  spec.threads.push_back({{A, B}, 300, 0});
  spec.duration_ms = 300;
  const auto gen = generate(spec);
  EXPECT_EQ(format_ground_truth(gen.trace, gen.truth),
            "time_ms,symbol,thread,pos\n0,000000000000000A,0,0\n1,000000000000000B,0,1\n");
  EXPECT_THROW(format_ground_truth(Trace{}, gen.truth), std::invalid_argument);
}
