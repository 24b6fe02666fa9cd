#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "icsdfa/cycle_build.hpp"
#include "icsdfa/cycle_split.hpp"
#include "icsdfa/dtmc.hpp"
#include "icsdfa/statechart.hpp"
#include "icsdfa/trace.hpp"

namespace icsdfa {

struct LearnConfig {
  std::size_t max_pattern_len = 200;
  double t_rare = 0.10;
  RareBasis rare_basis = RareBasis::Endpoints;
  double t_sim = 0.05;
  double t_med = 0.05;
  std::size_t validation_multiplier = 4;
  std::size_t max_candidates = 64;
  /// Symbols in the learning window, before trimming to a burst boundary.
  std::size_t learn_window = 800;
  std::size_t max_alternatives = 4;
  /// Also offer each set's max_weight_cycle as a cycle alternative.
  bool weighted_cycles = true;
  /// Accepted for reproducibility records; learning is deterministic.
  std::uint64_t seed = 0;

  std::size_t validation_window() const { return validation_multiplier * max_pattern_len; }
};

LearnConfig parse_learn_config_text(std::string_view text);
LearnConfig parse_learn_config(const std::filesystem::path& path);

struct TimeGaps {
  std::vector<double> tns;
  double period = 0.0;
  /// Window duration divided by the number of periods the set frequency spans.
  double duration_period = 0.0;
  /// Median recurrence interval of the cycle's once-per-cycle symbols; 0 if none.
  double recurrence_period = 0.0;
};

/// Per-state time to next state for `cycle`. Consecutive pairs observed back to
/// back within a burst (gap below half the period) take their median gap; the
/// pairs never seen that way share what is left of the period.
TimeGaps deduce_time_gaps(const Trace& trace, const EulerCycle& cycle, double set_freq);

/// Index just past the learning window: at most `window` events, pulled back
/// to the last gap longer than 1 ms so that no burst is cut.
std::size_t learning_window_end(const Trace& trace, std::size_t window);

struct CandidateCycle {
  int set_id = 0;
  double set_freq = 0.0;
  EulerCycle cycle;
};

struct Candidate {
  std::size_t partition = 0;
  std::vector<CandidateCycle> cycles;
  double score = 0.0;
};

struct LearnReport {
  std::size_t learn_end = 0;
  std::size_t validation_end = 0;
  std::vector<Partition> partitions;
  std::vector<Candidate> candidates;
  std::size_t chosen = 0;
  std::vector<std::string> warnings;
};

/// Carries whatever the learner produced before giving up.
class LearnError : public std::runtime_error {
 public:
  explicit LearnError(const std::string& what, LearnReport report = {})
      : std::runtime_error(what), report_(std::move(report)) {}
  const LearnReport& report() const { return report_; }

 private:
  LearnReport report_;
};

struct LearnResult {
  Statechart statechart;
  LearnReport report;
};

/// Unsupervised statechart construction: DTMC, symbol sets, repaired per-set
/// subgraphs, Euler cycles, time gaps, then validation-based selection among
/// all combinations. Throws LearnError when no set yields a cycle.
LearnResult learn_statechart(const Trace& trace, const LearnConfig& cfg = {});

/// Single-DFA baseline wrapped as a one-DFA statechart.
Statechart learn_naive(const Trace& trace, const LearnConfig& cfg = {});

std::string format_report(const LearnReport& report);

}  // namespace icsdfa
