#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icsdfa/gw_dfa.hpp"
#include "icsdfa/trace.hpp"

namespace icsdfa {

/// Several pattern DFAs behind a time-aware selector. The selector routes each
/// symbol to one DFA through phi (symbol -> DFAs whose pattern holds it),
/// breaking ambiguity by predicted arrival time.
class Statechart {
 public:
  Statechart() = default;
  /// DFA ids are reassigned to 0..n-1 in the given order.
  explicit Statechart(std::vector<PatternDfa> dfas);

  const std::vector<PatternDfa>& dfas() const { return dfas_; }
  std::size_t size() const { return dfas_.size(); }
  bool empty() const { return dfas_.empty(); }

  /// Sorted DFA ids whose pattern contains `s`; empty for unknown symbols.
  const std::vector<int>& phi(SymbolId s) const;
  const std::map<SymbolId, std::vector<int>>& phi_map() const { return phi_; }

  const std::vector<DfaRuntime>& runtimes() const { return runtimes_; }
  DfaRuntime& runtime(int d) { return runtimes_.at(static_cast<std::size_t>(d)); }

  /// Every DFA back to state 0 with t_last = t0.
  void reset(std::int64_t t0);

  /// T_last(d) plus the TNS of every state on the Normal path from the
  /// current state up to (excluding) the state `s` would move d to.
  /// Throws std::invalid_argument when d is not in phi(s).
  double predicted_arrival(SymbolId s, int d) const;

  /// nullopt means the selector itself reports Unknown.
  std::optional<int> select_dfa(SymbolId s, std::int64_t t) const;

  friend bool operator==(const Statechart& a, const Statechart& b) { return a.dfas_ == b.dfas_; }

 private:
  std::vector<PatternDfa> dfas_;
  std::map<SymbolId, std::vector<int>> phi_;
  std::vector<DfaRuntime> runtimes_;
};

std::size_t statechart_model_size(const Statechart& sc);

/// Distinct symbols across all patterns.
std::size_t distinct_symbols(const Statechart& sc);

/// M_s * (n_dsym + 1) * 8 + N_dfas * 12 bytes.
std::size_t memory_footprint(const Statechart& sc, std::size_t n_dsym);

struct EnforcementRecord {
  std::int64_t time_ms = 0;
  SymbolId symbol;
  std::optional<int> dfa_id;
  TransitionEvent event = TransitionEvent::Unknown;
  /// Inside the selected DFA's first traversal of its pattern.
  bool warmup = false;
};

struct BucketRate {
  std::int64_t start_ms = 0;
  double false_alarm_pct_of_aer = 0.0;
};

struct EnforcementSummary {
  std::size_t total = 0;
  std::size_t warmup = 0;
  /// Non-warm-up events by type, indexed by TransitionEvent.
  std::array<std::size_t, 4> counts{};
  /// Unknown raised by the selector (no DFA knows the symbol).
  std::size_t selector_unknown = 0;
  std::size_t false_alarms = 0;
  double false_alarm_rate = 0.0;
  double normal_fraction = 0.0;
  double aer = 0.0;
  std::vector<BucketRate> buckets;

  std::size_t count(TransitionEvent e) const { return counts[static_cast<std::size_t>(e)]; }
  std::size_t scored() const { return total - warmup; }
};

struct EnforcementResult {
  std::vector<EnforcementRecord> records;
  EnforcementSummary summary;
};

inline constexpr std::int64_t kBucketMs = 5000;

/// Replay `trace` through a fresh copy of `sc` (runtimes reset to the first
/// event). `sc` itself is not modified.
EnforcementResult enforce(const Statechart& sc, const Trace& trace, std::int64_t bucket_ms = kBucketMs);

/// Same, but running `sc` in place from its current runtime state.
EnforcementResult enforce_in_place(Statechart& sc, const Trace& trace, std::int64_t bucket_ms = kBucketMs);

std::string format_model(const Statechart& sc);
Statechart parse_model(std::string_view text);
void write_model(const Statechart& sc, const std::filesystem::path& path);
Statechart read_model(const std::filesystem::path& path);

std::string format_event_log(const std::vector<EnforcementRecord>& records);
std::string format_summary(const EnforcementSummary& summary);

}  // namespace icsdfa
