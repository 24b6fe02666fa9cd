#include "icsdfa/learner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "icsdfa/dtmc.hpp"

namespace icsdfa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config: bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

LearnConfig parse_learn_config_text(std::string_view text) {
  LearnConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("config: expected key=value, got '" + raw + "'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "max_pattern_len") cfg.max_pattern_len = parse_value<std::size_t>(key, value);
    else if (key == "t_rare") cfg.t_rare = parse_value<double>(key, value);
    else if (key == "rare_basis") cfg.rare_basis = parse_rare_basis(value);
    else if (key == "t_sim") cfg.t_sim = parse_value<double>(key, value);
    else if (key == "t_med") cfg.t_med = parse_value<double>(key, value);
    else if (key == "validation_multiplier") cfg.validation_multiplier = parse_value<std::size_t>(key, value);
    else if (key == "max_candidates") cfg.max_candidates = parse_value<std::size_t>(key, value);
    else if (key == "learn_window") cfg.learn_window = parse_value<std::size_t>(key, value);
    else if (key == "max_alternatives") cfg.max_alternatives = parse_value<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "weighted_cycles") cfg.weighted_cycles = parse_value<int>(key, value) != 0;
    else throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
  if (cfg.max_pattern_len == 0) throw std::invalid_argument("config: max_pattern_len must be positive");
  return cfg;
}

LearnConfig parse_learn_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_learn_config_text(buf.str());
}

TimeGaps deduce_time_gaps(const Trace& trace, const EulerCycle& cycle, double set_freq) {
  if (cycle.empty()) throw std::invalid_argument("deduce_time_gaps on an empty cycle");
  if (trace.size() < 2 || !(set_freq > 0.0)) throw std::invalid_argument("deduce_time_gaps needs events and a positive frequency");

  std::map<SymbolId, int> multiplicity;
  for (SymbolId s : cycle) ++multiplicity[s];
  std::map<SymbolId, std::vector<std::int64_t>> seen;
  for (const auto& ev : trace.events) {
    if (multiplicity.count(ev.symbol)) seen[ev.symbol].push_back(ev.time_ms);
  }
  for (const auto& [s, _] : multiplicity) {
    if (!seen.count(s)) throw std::invalid_argument("cycle symbol " + format_symbol(s) + " never observed");
  }

  TimeGaps out;
  const double duration = static_cast<double>(trace.events.back().time_ms - trace.events.front().time_ms);
  // n occurrences span n - 1 periods
  out.duration_period = duration / (set_freq > 1.0 ? set_freq - 1.0 : set_freq);

  // Recurrence of once-per-cycle symbols, kept near the duration estimate so
  // that occurrences belonging to other cycles do not pollute it. Symbols
  // seen about set_freq times are preferred; the others are likely shared.
  std::vector<SymbolId> once, own;
  for (const auto& [s, k] : multiplicity) {
    if (k != 1) continue;
    once.push_back(s);
    const auto n = static_cast<double>(seen[s].size());
    if (std::abs(n - set_freq) <= 0.25 * set_freq) own.push_back(s);
  }
  std::vector<double> gaps;
  for (SymbolId s : own.empty() ? once : own) {
    const auto& times = seen[s];
    for (std::size_t i = 1; i < times.size(); ++i) {
      const auto g = static_cast<double>(times[i] - times[i - 1]);
      if (g > 0.5 * out.duration_period && g < 1.5 * out.duration_period) gaps.push_back(g);
    }
  }
  if (!gaps.empty()) out.recurrence_period = median(gaps);
  out.period = gaps.empty() ? out.duration_period : out.recurrence_period;

  const std::size_t len = cycle.size();
  std::map<std::pair<SymbolId, SymbolId>, std::vector<double>> pair_gaps;
  for (std::size_t i = 0; i < len; ++i) pair_gaps[{cycle[i], cycle[(i + 1) % len]}];
  // S_i to the next S_{i+1}, skipping events of other cycles in between.
  std::map<SymbolId, std::vector<SymbolId>> succ;
  for (std::size_t i = 0; i < len; ++i) succ[cycle[i]].push_back(cycle[(i + 1) % len]);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const SymbolId from = trace.events[j].symbol;
    auto it = succ.find(from);
    if (it == succ.end()) continue;
    for (SymbolId to : it->second) {
      for (std::size_t k = j + 1; k < trace.size(); ++k) {
        const auto g = static_cast<double>(trace.events[k].time_ms - trace.events[j].time_ms);
        if (g >= 0.5 * out.period) break;
        if (trace.events[k].symbol == to) {
          pair_gaps[{from, to}].push_back(g);
          break;
        }
        if (trace.events[k].symbol == from) break;
      }
    }
  }

  out.tns.assign(len, 0.0);
  std::vector<std::size_t> open;
  double known = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const auto& g = pair_gaps[{cycle[i], cycle[(i + 1) % len]}];
    if (g.empty()) {
      open.push_back(i);
    } else {
      out.tns[i] = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
      known += out.tns[i];
    }
  }
  const double rest = std::max(0.0, out.period - known);
  if (open.empty()) {
    out.tns[len - 1] += rest;
  } else {
    for (auto i : open) out.tns[i] = rest / static_cast<double>(open.size());
  }
  return out;
}

std::size_t learning_window_end(const Trace& trace, std::size_t window) {
  const std::size_t end = std::min(window, trace.size());
  if (end == trace.size()) return end;
  for (std::size_t i = end; i > end / 2; --i) {
    if (trace.events[i].time_ms - trace.events[i - 1].time_ms > 1) return i;
  }
  return end;
}

namespace {

struct SetCycles {
  int set_id;
  double freq;
  std::vector<EulerCycle> alternatives;
};

std::size_t leftover_members(const Partition& p) {
  std::size_t n = 0;
  for (const auto& s : p.sets) {
    if (s.leftover) n += s.members.size();
  }
  return n;
}

std::string describe_set(const SymbolSet& s) {
  return "set " + std::to_string(s.id) + " (" + std::to_string(s.members.size()) + " symbols" +
         (s.leftover ? ", leftover" : "") + ")";
}

}  // namespace

LearnResult learn_statechart(const Trace& trace, const LearnConfig& cfg) {
  const std::size_t need = cfg.max_pattern_len * 5;
  if (trace.size() < need) {
    throw LearnError("trace too short: need " + std::to_string(need) + " events, have " +
                     std::to_string(trace.size()));
  }

  LearnReport report;
  report.learn_end = learning_window_end(trace, cfg.learn_window);
  report.validation_end = std::min(trace.size(), report.learn_end + cfg.validation_window());
  const Trace learn = trace.slice(0, report.learn_end);
  const Trace validation = trace.slice(report.learn_end, report.validation_end);

  const Dtmc dtmc = build_dtmc(learn, cfg.t_rare, cfg.rare_basis);
  SplitOptions split_opts;
  split_opts.t_sim = cfg.t_sim;
  report.partitions = split_symbol_sets(dtmc, split_opts);

  const EdgeHint hint = [&dtmc](SymbolId a, SymbolId b) { return static_cast<double>(dtmc.raw_count(a, b)); };

  std::vector<std::vector<SetCycles>> per_partition;
  for (std::size_t pi = 0; pi < report.partitions.size(); ++pi) {
    std::vector<SetCycles> sets;
    std::map<SymbolId, int> owners;
    for (const auto& set : report.partitions[pi].sets) {
      for (const auto& [v, _] : set.members) ++owners[v];
    }
    for (const auto& set : report.partitions[pi].sets) {
      auto g = build_subgraph(dtmc, set);
      std::vector<EulerCycle> cycles;
      if (g.edges.empty()) {
        report.warnings.push_back("partition " + std::to_string(pi) + ": " + describe_set(set) + " has no edges");
      } else {
        if (!g.balanced()) g = add_missed_edges(drop_redundant_edges(g, cfg.t_med), hint);
        cycles = euler_cycles(g, cfg.max_alternatives);
        if (cycles.empty()) {
          report.warnings.push_back("partition " + std::to_string(pi) + ": " + describe_set(set) +
                                    " is not Eulerian after repair");
        }
      }
      if (cfg.weighted_cycles && set.freq > 0.0) {
        std::set<SymbolId> anchors;
        for (const auto& [v, _] : set.members) {
          if (owners[v] == 1) anchors.insert(v);
        }
        for (const auto& variant : {set, estimate_instances(set, anchors, hint)}) {
          auto best = max_weight_cycle(variant, hint);
          if (std::find(cycles.begin(), cycles.end(), best) == cycles.end()) cycles.push_back(std::move(best));
        }
      }
      if (cycles.empty()) continue;
      sets.push_back({set.id, set.freq, std::move(cycles)});
    }
    per_partition.push_back(std::move(sets));
  }

  std::vector<std::size_t> order(report.partitions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return leftover_members(report.partitions[a]) < leftover_members(report.partitions[b]);
  });

  std::set<std::vector<EulerCycle>> distinct;
  for (std::size_t pi : order) {
    const auto& sets = per_partition[pi];
    if (sets.empty()) continue;
    std::vector<std::size_t> pick(sets.size(), 0);
    while (report.candidates.size() < cfg.max_candidates) {
      Candidate c;
      c.partition = pi;
      std::vector<EulerCycle> key;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        c.cycles.push_back({sets[k].set_id, sets[k].freq, sets[k].alternatives[pick[k]]});
        key.push_back(sets[k].alternatives[pick[k]]);
      }
      if (distinct.insert(key).second) report.candidates.push_back(std::move(c));

      std::size_t k = 0;
      for (; k < sets.size(); ++k) {
        if (++pick[k] < sets[k].alternatives.size()) break;
        pick[k] = 0;
      }
      if (k == sets.size()) break;
    }
  }

  if (report.candidates.empty()) {
    std::string msg = "no symbol set yields an Euler cycle";
    for (const auto& w : report.warnings) msg += "\n  " + w;
    throw LearnError(msg, std::move(report));
  }

  std::vector<Statechart> charts;
  for (auto& c : report.candidates) {
    std::vector<PatternDfa> dfas;
    for (const auto& cc : c.cycles) {
      auto gaps = deduce_time_gaps(learn, cc.cycle, cc.set_freq);
      dfas.emplace_back(static_cast<int>(dfas.size()), cc.cycle, std::move(gaps.tns));
    }
    charts.emplace_back(std::move(dfas));
    c.score = enforce(charts.back(), validation).summary.normal_fraction;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < report.candidates.size(); ++i) {
    if (report.candidates[i].score > report.candidates[best].score) best = i;
  }
  report.chosen = best;
  return {std::move(charts[best]), std::move(report)};
}

Statechart learn_naive(const Trace& trace, const LearnConfig& cfg) {
  auto fit = learn_pattern(trace, cfg.max_pattern_len, cfg.validation_multiplier);
  return Statechart({std::move(fit.dfa)});
}

std::string format_report(const LearnReport& report) {
  std::ostringstream out;
  out << "learning window: events [0," << report.learn_end << "), validation [" << report.learn_end << ","
      << report.validation_end << ")\n";
  out << "partitions: " << report.partitions.size() << '\n';
  for (std::size_t i = 0; i < report.partitions.size(); ++i) {
    const auto& p = report.partitions[i];
    out << "  partition " << i << ": " << p.sets.size() << " sets, " << p.unclassified.size()
        << " unclassified\n";
  }
  out << "candidates scored: " << report.candidates.size() << '\n';
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const auto& c = report.candidates[i];
    out << "  candidate " << i << " (partition " << c.partition << ", " << c.cycles.size()
        << " cycles): score " << c.score << (i == report.chosen ? "  <- chosen" : "") << '\n';
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace icsdfa
