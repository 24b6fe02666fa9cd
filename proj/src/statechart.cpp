#include "icsdfa/statechart.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace icsdfa {

Statechart::Statechart(std::vector<PatternDfa> dfas) {
  dfas_.reserve(dfas.size());
  for (std::size_t d = 0; d < dfas.size(); ++d) {
    dfas_.emplace_back(static_cast<int>(d), dfas[d].pattern(), dfas[d].tns());
    for (SymbolId s : dfas_.back().pattern()) {
      auto& ids = phi_[s];
      if (ids.empty() || ids.back() != static_cast<int>(d)) ids.push_back(static_cast<int>(d));
    }
  }
  runtimes_.assign(dfas_.size(), DfaRuntime{});
}

const std::vector<int>& Statechart::phi(SymbolId s) const {
  static const std::vector<int> kNone;
  auto it = phi_.find(s);
  return it == phi_.end() ? kNone : it->second;
}

void Statechart::reset(std::int64_t t0) {
  for (auto& rt : runtimes_) rt = DfaRuntime{0, t0};
}

double Statechart::predicted_arrival(SymbolId s, int d) const {
  const auto& ids = phi(s);
  if (!std::binary_search(ids.begin(), ids.end(), d)) {
    throw std::invalid_argument("DFA " + std::to_string(d) + " does not know symbol " + format_symbol(s));
  }
  const auto& dfa = dfas_[static_cast<std::size_t>(d)];
  const auto& rt = runtimes_[static_cast<std::size_t>(d)];
  const std::size_t target = peek(dfa, rt, s).next_state;
  double t = static_cast<double>(rt.t_last);
  for (std::size_t r = rt.current; r != target; r = (r + 1) % dfa.length()) t += dfa.tns()[r];
  return t;
}

std::optional<int> Statechart::select_dfa(SymbolId s, std::int64_t t) const {
  const auto& ids = phi(s);
  if (ids.empty()) return std::nullopt;
  if (ids.size() == 1) return ids.front();
  int best = ids.front();
  double best_diff = std::abs(static_cast<double>(t) - predicted_arrival(s, best));
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const double diff = std::abs(static_cast<double>(t) - predicted_arrival(s, ids[k]));
    if (diff < best_diff) {
      best_diff = diff;
      best = ids[k];
    }
  }
  return best;
}

std::size_t statechart_model_size(const Statechart& sc) {
  std::size_t n = 0;
  for (const auto& d : sc.dfas()) n += model_size(d);
  return n;
}

std::size_t distinct_symbols(const Statechart& sc) {
  return sc.phi_map().size();
}

std::size_t memory_footprint(const Statechart& sc, std::size_t n_dsym) {
  return statechart_model_size(sc) * (n_dsym + 1) * 8 + sc.size() * 12;
}

EnforcementResult enforce_in_place(Statechart& sc, const Trace& trace, std::int64_t bucket_ms) {
  EnforcementResult res;
  auto& sum = res.summary;
  res.records.reserve(trace.size());
  sum.total = trace.size();

  std::vector<std::size_t> seen(sc.size(), 0);
  for (const auto& ev : trace.events) {
    EnforcementRecord rec;
    rec.time_ms = ev.time_ms;
    rec.symbol = ev.symbol;
    rec.dfa_id = sc.select_dfa(ev.symbol, ev.time_ms);
    if (rec.dfa_id) {
      const auto d = static_cast<std::size_t>(*rec.dfa_id);
      rec.event = step(sc.dfas()[d], sc.runtime(*rec.dfa_id), ev.symbol, ev.time_ms);
      if (rec.event == TransitionEvent::Unknown) {
        throw std::logic_error("selected DFA rejected a symbol listed in phi");
      }
      rec.warmup = seen[d] < sc.dfas()[d].length();
      ++seen[d];
    } else {
      rec.event = TransitionEvent::Unknown;
    }

    if (rec.warmup) {
      ++sum.warmup;
    } else {
      ++sum.counts[static_cast<std::size_t>(rec.event)];
      if (!rec.dfa_id) ++sum.selector_unknown;
    }
    res.records.push_back(rec);
  }

  sum.false_alarms = sum.count(TransitionEvent::Miss) + sum.count(TransitionEvent::Unknown);
  const auto scored = sum.scored();
  if (scored > 0) {
    sum.false_alarm_rate = static_cast<double>(sum.false_alarms) / static_cast<double>(scored);
    sum.normal_fraction = static_cast<double>(sum.count(TransitionEvent::Normal)) / static_cast<double>(scored);
  }

  if (!trace.empty()) {
    const double span_s =
        static_cast<double>(trace.events.back().time_ms - trace.events.front().time_ms) / 1000.0;
    sum.aer = static_cast<double>(trace.size()) / std::max(span_s, 1.0);
    std::map<std::int64_t, std::size_t> per_bucket;
    for (const auto& ev : trace.events) per_bucket[(ev.time_ms / bucket_ms) * bucket_ms];
    for (const auto& rec : res.records) {
      if (!rec.warmup && rec.event != TransitionEvent::Normal && rec.event != TransitionEvent::Retransmission) {
        ++per_bucket[(rec.time_ms / bucket_ms) * bucket_ms];
      }
    }
    const double expected = sum.aer * static_cast<double>(bucket_ms) / 1000.0;
    for (const auto& [start, fa] : per_bucket) {
      sum.buckets.push_back({start, 100.0 * static_cast<double>(fa) / expected});
    }
  }
  return res;
}

EnforcementResult enforce(const Statechart& sc, const Trace& trace, std::int64_t bucket_ms) {
  Statechart fresh = sc;
  fresh.reset(trace.empty() ? 0 : trace.events.front().time_ms);
  return enforce_in_place(fresh, trace, bucket_ms);
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(sep, pos);
    out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void model_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("model line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_model(const Statechart& sc) {
  std::string out = "statechart v1\n";
  out += "n_dfas=" + std::to_string(sc.size()) + '\n';
  for (const auto& d : sc.dfas()) {
    out += "dfa " + std::to_string(d.id()) + '\n';
    out += "pattern=";
    for (std::size_t i = 0; i < d.length(); ++i) {
      if (i) out += ',';
      out += format_symbol(d.pattern()[i]);
    }
    out += "\ntns=";
    for (std::size_t i = 0; i < d.length(); ++i) {
      if (i) out += ',';
      out += format_double(d.tns()[i]);
    }
    out += '\n';
  }
  return out;
}

Statechart parse_model(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != "statechart v1") model_error(1, "expected header 'statechart v1'");
  if (lines.size() < 2 || lines[1].substr(0, 7) != "n_dfas=") model_error(2, "expected 'n_dfas=<k>'");

  std::size_t n = 0;
  {
    auto v = lines[1].substr(7);
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size()) model_error(2, "bad DFA count");
  }
  if (lines.size() != 2 + 3 * n) model_error(lines.size(), "expected 3 lines per DFA");

  std::vector<PatternDfa> dfas;
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t base = 2 + 3 * d;
    if (lines[base] != "dfa " + std::to_string(d)) model_error(base + 1, "expected 'dfa " + std::to_string(d) + "'");
    if (lines[base + 1].substr(0, 8) != "pattern=") model_error(base + 2, "expected 'pattern='");
    if (lines[base + 2].substr(0, 4) != "tns=") model_error(base + 3, "expected 'tns='");

    std::vector<SymbolId> pattern;
    for (auto tok : split(lines[base + 1].substr(8), ',')) {
      try {
        pattern.push_back(parse_symbol(tok));
      } catch (const std::invalid_argument& e) {
        model_error(base + 2, e.what());
      }
    }
    std::vector<double> tns;
    for (auto tok : split(lines[base + 2].substr(4), ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) model_error(base + 3, "bad tns value");
      tns.push_back(v);
    }
    try {
      dfas.emplace_back(static_cast<int>(d), std::move(pattern), std::move(tns));
    } catch (const std::invalid_argument& e) {
      model_error(base + 2, e.what());
    }
  }
  if (dfas.empty()) model_error(2, "model has no DFAs");
  return Statechart(std::move(dfas));
}

void write_model(const Statechart& sc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << format_model(sc);
}

Statechart read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string format_event_log(const std::vector<EnforcementRecord>& records) {
  std::string out = "time_ms,symbol,dfa_id,event\n";
  for (const auto& r : records) {
    out += std::to_string(r.time_ms);
    out += ',';
    out += format_symbol(r.symbol);
    out += ',';
    out += r.dfa_id ? std::to_string(*r.dfa_id) : std::string("-");
    out += ',';
    out += event_code(r.event);
    out += '\n';
  }
  return out;
}

std::string format_summary(const EnforcementSummary& summary) {
  std::string out = "bucket_start_ms,false_alarm_pct_of_aer\n";
  for (const auto& b : summary.buckets) {
    out += std::to_string(b.start_ms) + ',' + format_double(b.false_alarm_pct_of_aer) + '\n';
  }
  out += "total," + format_double(100.0 * summary.false_alarm_rate) + '\n';
  return out;
}

}  // namespace icsdfa
