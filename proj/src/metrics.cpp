#include "icsdfa/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace icsdfa {

double symbol_uniqueness(const ScenarioSpec& spec) {
  if (spec.threads.empty()) throw std::invalid_argument("symbol_uniqueness needs at least one thread");
  std::map<SymbolId, std::set<std::size_t>> owners;
  for (std::size_t k = 0; k < spec.threads.size(); ++k) {
    for (SymbolId s : spec.threads[k].pattern) owners[s].insert(k);
  }
  std::size_t unique_slots = 0;
  std::size_t slots = 0;
  for (const auto& th : spec.threads) {
    for (SymbolId s : th.pattern) {
      ++slots;
      if (owners[s].size() == 1) ++unique_slots;
    }
  }
  return static_cast<double>(unique_slots) / static_cast<double>(slots);
}

double time_overlap(const GroundTruth& truth) {
  std::map<std::int64_t, int> slots;
  for (const auto& e : truth.entries) ++slots[e.scheduled_ms];
  if (slots.empty()) return 0.0;
  std::size_t multi = 0;
  for (const auto& [_, n] : slots) {
    if (n >= 2) ++multi;
  }
  return 100.0 * static_cast<double>(multi) / static_cast<double>(slots.size());
}

Partition truth_partition(const ScenarioSpec& spec) {
  Partition p;
  for (std::size_t k = 0; k < spec.threads.size(); ++k) {
    SymbolSet s;
    s.id = static_cast<int>(k);
    s.freq = 1000.0 / static_cast<double>(spec.threads[k].period_ms);
    for (SymbolId sym : spec.threads[k].pattern) ++s.members[sym];
    p.sets.push_back(std::move(s));
  }
  return p;
}

Partition model_partition(const Statechart& sc) {
  Partition p;
  for (const auto& d : sc.dfas()) {
    SymbolSet s;
    s.id = d.id();
    s.freq = d.period() > 0 ? 1000.0 / d.period() : 0.0;
    for (SymbolId sym : d.pattern()) ++s.members[sym];
    p.sets.push_back(std::move(s));
  }
  return p;
}

Statechart ideal_statechart(const ScenarioSpec& spec, const Trace& trace, const GroundTruth& truth,
                            std::size_t learn_end) {
  learn_end = std::min(learn_end, trace.size());
  const std::size_t nthreads = spec.threads.size();
  std::vector<std::vector<double>> sum(nthreads), n(nthreads);
  for (std::size_t k = 0; k < nthreads; ++k) {
    sum[k].assign(spec.threads[k].pattern.size(), 0.0);
    n[k].assign(spec.threads[k].pattern.size(), 0.0);
  }
  // Last event seen per thread: (position, wire time).
  std::vector<std::optional<std::pair<int, std::int64_t>>> last(nthreads);
  for (std::size_t i = 0; i < learn_end; ++i) {
    const auto& e = truth.entries[i];
    const auto k = static_cast<std::size_t>(e.thread);
    const int len = static_cast<int>(spec.threads[k].pattern.size());
    if (last[k] && (last[k]->first + 1) % len == e.pos) {
      const auto p = static_cast<std::size_t>(last[k]->first);
      sum[k][p] += static_cast<double>(trace.events[i].time_ms - last[k]->second);
      n[k][p] += 1.0;
    }
    last[k] = {e.pos, trace.events[i].time_ms};
  }

  std::vector<PatternDfa> dfas;
  for (std::size_t k = 0; k < nthreads; ++k) {
    const auto& th = spec.threads[k];
    const std::size_t len = th.pattern.size();
    std::vector<double> tns(len);
    for (std::size_t p = 0; p < len; ++p) {
      if (n[k][p] > 0) {
        tns[p] = sum[k][p] / n[k][p];
      } else {
        tns[p] = p + 1 == len ? static_cast<double>(th.period_ms - static_cast<std::int64_t>(len) + 1) : 1.0;
      }
    }
    dfas.emplace_back(static_cast<int>(k), th.pattern, std::move(tns));
  }
  return Statechart(std::move(dfas));
}

ModelScore score_model(const std::string& name, const Statechart& sc, const Trace& trace) {
  ModelScore s;
  s.model = name;
  s.false_alarm_pct = 100.0 * enforce(sc, trace).summary.false_alarm_rate;
  s.model_size = statechart_model_size(sc);
  s.mem_bytes = memory_footprint(sc, distinct_symbols(sc));
  return s;
}

std::vector<ModelScore> compare_models(const Trace& trace, const Statechart& ideal,
                                       const std::optional<Statechart>& practical, const Statechart& naive,
                                       const std::string& practical_failure) {
  std::vector<ModelScore> out;
  out.push_back(score_model("naive", naive, trace));
  if (practical) {
    out.push_back(score_model("practical", *practical, trace));
  } else {
    ModelScore failed;
    failed.model = "practical";
    failed.failed = true;
    failed.failure = practical_failure;
    out.push_back(failed);
  }
  out.push_back(score_model("ideal", ideal, trace));
  return out;
}

std::vector<ComparisonRow> ScenarioEvaluation::rows() const {
  std::vector<ComparisonRow> out;
  for (const auto& s : scores) out.push_back({scenario, s, uniqueness, overlap_pct});
  return out;
}

ScenarioEvaluation evaluate_scenario(int id, const EvaluationConfig& cfg) {
  const ScenarioSpec spec = builtin_scenario(id, cfg.seed, cfg.duration_ms, cfg.jitter_ms);
  const Generated gen = generate(spec);

  ScenarioEvaluation ev;
  ev.scenario = id;
  ev.uniqueness = symbol_uniqueness(spec);
  ev.overlap_pct = time_overlap(gen.truth);
  ev.trace_events = gen.trace.size();

  LearnConfig naive_cfg = cfg.practical;
  naive_cfg.max_pattern_len = cfg.naive_max_len;
  ev.naive = learn_naive(gen.trace, naive_cfg);

  std::size_t learn_end = learning_window_end(gen.trace, cfg.practical.learn_window);
  std::optional<Partition> split;
  try {
    auto learned = learn_statechart(gen.trace, cfg.practical);
    learn_end = learned.report.learn_end;
    const auto& r = learned.report;
    split = r.partitions.at(r.candidates.at(r.chosen).partition);
    ev.practical = std::move(learned.statechart);
    ev.practical_report = std::move(learned.report);
  } catch (const LearnError& e) {
    ev.practical_failure = e.what();
    if (!e.report().partitions.empty()) split = e.report().partitions.front();
  }
  ev.enforce_from = learn_end;
  ev.ideal = ideal_statechart(spec, gen.trace, gen.truth, learn_end);

  const Trace rest = gen.trace.slice(learn_end, gen.trace.size());
  ev.scores = compare_models(rest, ev.ideal, ev.practical, ev.naive, ev.practical_failure);

  const Partition truth = truth_partition(spec);
  for (const auto& s : truth.sets) ev.true_instances += s.instance_count();
  if (split) {
    ev.partition_accuracy = partition_accuracy(*split, truth);
    ev.matched_instances = static_cast<int>(std::lround(ev.partition_accuracy * ev.true_instances));
    int found_instances = 0;
    for (const auto& s : split->sets) found_instances += s.instance_count();
    ev.partition_exact = ev.matched_instances == ev.true_instances && split->sets.size() == truth.sets.size() &&
                         found_instances == ev.true_instances;
  }
  return ev;
}

std::string report_csv_header() {
  return "scenario,model,false_alarm_pct,model_size,mem_bytes,uniqueness,overlap_pct\n";
}

namespace {
std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  (void)ec;
  return std::string(buf, ptr);
}
}  // namespace

std::string format_report_rows(const std::vector<ComparisonRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += std::to_string(r.scenario) + ',' + r.score.model + ',';
    if (r.score.failed) {
      out += "FAILED,FAILED,FAILED,";
    } else {
      out += num(r.score.false_alarm_pct) + ',' + std::to_string(r.score.model_size) + ',' +
             std::to_string(r.score.mem_bytes) + ',';
    }
    out += num(r.uniqueness) + ',' + num(r.overlap_pct) + '\n';
  }
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace icsdfa
