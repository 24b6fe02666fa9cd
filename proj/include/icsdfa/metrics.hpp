#pragma once

#include <optional>
#include <string>
#include <vector>

#include "icsdfa/cycle_split.hpp"
#include "icsdfa/learner.hpp"
#include "icsdfa/statechart.hpp"
#include "icsdfa/traffic_gen.hpp"

namespace icsdfa {

/// Share of pattern slots held by symbols that occur in exactly one thread.
double symbol_uniqueness(const ScenarioSpec& spec);

/// Percentage of occupied 1 ms slots (pre-shift schedule) holding two or more
/// scheduled events.
double time_overlap(const GroundTruth& truth);

/// One set per thread with the thread pattern's symbol multiplicities; the set
/// frequency is the burst rate per second.
Partition truth_partition(const ScenarioSpec& spec);

/// One set per DFA of `sc`.
Partition model_partition(const Statechart& sc);

/// Statechart built from the known thread patterns, with time gaps measured
/// from labelled events in [0, learn_end).
Statechart ideal_statechart(const ScenarioSpec& spec, const Trace& trace, const GroundTruth& truth,
                            std::size_t learn_end);

struct ModelScore {
  std::string model;
  bool failed = false;
  std::string failure;
  double false_alarm_pct = 0.0;
  std::size_t model_size = 0;
  std::size_t mem_bytes = 0;
};

ModelScore score_model(const std::string& name, const Statechart& sc, const Trace& trace);

struct ComparisonRow {
  int scenario = 0;
  ModelScore score;
  double uniqueness = 0.0;
  double overlap_pct = 0.0;
};

/// Enforce the three models on fresh runtimes over `trace`. A missing
/// practical model is reported as failed.
std::vector<ModelScore> compare_models(const Trace& trace, const Statechart& ideal,
                                       const std::optional<Statechart>& practical, const Statechart& naive,
                                       const std::string& practical_failure = {});

struct ScenarioEvaluation {
  int scenario = 0;
  double uniqueness = 0.0;
  double overlap_pct = 0.0;
  std::size_t trace_events = 0;
  std::size_t enforce_from = 0;
  Statechart ideal;
  std::optional<Statechart> practical;
  std::optional<LearnReport> practical_report;
  std::string practical_failure;
  Statechart naive;
  std::vector<ModelScore> scores;  // naive, practical, ideal
  /// Symbol split behind the chosen candidate (first split on failure) against the threads.
  double partition_accuracy = 0.0;
  bool partition_exact = false;
  int true_instances = 0;
  int matched_instances = 0;

  std::vector<ComparisonRow> rows() const;
};

struct EvaluationConfig {
  std::uint64_t seed = 1;
  std::int64_t duration_ms = kDefaultDurationMs;
  std::int64_t jitter_ms = kDefaultJitterMs;
  LearnConfig practical;
  /// The naive baseline searches shorter patterns with its own window.
  std::size_t naive_max_len = 100;
};

/// Generate a builtin scenario, learn naive and practical models, build the
/// ideal one, and enforce all three on the events after the learning window.
ScenarioEvaluation evaluate_scenario(int id, const EvaluationConfig& cfg = {});

std::string report_csv_header();
std::string format_report_rows(const std::vector<ComparisonRow>& rows);

double median_of(std::vector<double> v);

}  // namespace icsdfa
