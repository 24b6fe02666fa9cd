#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icsdfa/trace.hpp"

namespace icsdfa {

/// One simulated HMI thread: every `period_ms` it wakes (perturbed by up to
/// `jitter_ms` either way) and emits its pattern as a 1 ms/symbol burst.
struct ThreadSpec {
  std::vector<SymbolId> pattern;
  std::int64_t period_ms = 0;
  std::int64_t jitter_ms = 0;

  friend bool operator==(const ThreadSpec&, const ThreadSpec&) = default;
};

struct ScenarioSpec {
  std::vector<ThreadSpec> threads;
  std::int64_t duration_ms = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate_scenario(const ScenarioSpec& spec);

struct GroundTruthEntry {
  int thread = 0;
  int pos = 0;
  /// Wire time before collision shifting.
  std::int64_t scheduled_ms = 0;

  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

/// Parallel to the generated trace: entry i labels trace event i.
struct GroundTruth {
  std::vector<GroundTruthEntry> entries;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Generated {
  Trace trace;
  GroundTruth truth;
  /// Events whose wire time was pushed back by an occupied slot.
  std::size_t shifted = 0;
};

/// Bursts from all threads are merged by scheduled time (seeded random order
/// among equal times) and serialized one event per millisecond.
Generated generate(const ScenarioSpec& spec);

inline constexpr std::int64_t kDefaultJitterMs = 2;
inline constexpr std::int64_t kDefaultDurationMs = 1'000'000;

/// The thirteen built-in scenarios (ids 1..13 at index 0..12).
std::vector<ScenarioSpec> builtin_scenarios(std::uint64_t seed = 1, std::int64_t duration_ms = kDefaultDurationMs,
                                            std::int64_t jitter_ms = kDefaultJitterMs);
ScenarioSpec builtin_scenario(int id, std::uint64_t seed = 1, std::int64_t duration_ms = kDefaultDurationMs,
                              std::int64_t jitter_ms = kDefaultJitterMs);

inline constexpr int kBuiltinCount = 13;

ScenarioSpec parse_scenario_text(std::string_view text);
ScenarioSpec parse_scenario(const std::filesystem::path& path);
std::string format_scenario(const ScenarioSpec& spec);

/// CSV `time_ms,symbol,thread,pos`.
std::string format_ground_truth(const Trace& trace, const GroundTruth& truth);
void write_ground_truth(const Trace& trace, const GroundTruth& truth, const std::filesystem::path& path);

}  // namespace icsdfa
