#include "icsdfa/gw_dfa.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace icsdfa {

char event_code(TransitionEvent e) {
  switch (e) {
    case TransitionEvent::Normal: return 'N';
    case TransitionEvent::Retransmission: return 'R';
    case TransitionEvent::Miss: return 'M';
    case TransitionEvent::Unknown: return 'U';
  }
  return '?';
}

TransitionEvent parse_event_code(char c) {
  switch (c) {
    case 'N': return TransitionEvent::Normal;
    case 'R': return TransitionEvent::Retransmission;
    case 'M': return TransitionEvent::Miss;
    case 'U': return TransitionEvent::Unknown;
    default: throw std::invalid_argument(std::string("unknown event code '") + c + "'");
  }
}

PatternDfa::PatternDfa(int dfa_id, std::vector<SymbolId> pattern, std::vector<double> tns)
    : id_(dfa_id), pattern_(std::move(pattern)), tns_(std::move(tns)) {
  if (pattern_.empty()) throw std::invalid_argument("pattern must not be empty");
  if (tns_.size() != pattern_.size()) throw std::invalid_argument("tns length must equal pattern length");
  for (double t : tns_) {
    if (!(t >= 0.0)) throw std::invalid_argument("tns entries must be non-negative");
  }
  for (std::size_t i = 0; i < pattern_.size(); ++i) index_[pattern_[i]].push_back(i);
}

const std::vector<std::size_t>& PatternDfa::positions(SymbolId s) const {
  static const std::vector<std::size_t> kNone;
  auto it = index_.find(s);
  return it == index_.end() ? kNone : it->second;
}

double PatternDfa::period() const {
  return std::accumulate(tns_.begin(), tns_.end(), 0.0);
}

namespace {

// Closest state strictly ahead of `from` (cyclically) holding the symbol.
std::size_t forward_position(const std::vector<std::size_t>& pos, std::size_t from) {
  auto it = std::upper_bound(pos.begin(), pos.end(), from);
  return it == pos.end() ? pos.front() : *it;
}

}  // namespace

Transition peek(const PatternDfa& dfa, const DfaRuntime& rt, SymbolId s) {
  const auto& p = dfa.pattern();
  const std::size_t i = rt.current;
  const std::size_t next = (i + 1) % p.size();
  if (p[next] == s) return {TransitionEvent::Normal, next};
  if (p[i] == s) return {TransitionEvent::Retransmission, i};
  const auto& pos = dfa.positions(s);
  if (!pos.empty()) return {TransitionEvent::Miss, forward_position(pos, i)};
  return {TransitionEvent::Unknown, i};
}

TransitionEvent step(const PatternDfa& dfa, DfaRuntime& rt, SymbolId s, std::int64_t t) {
  const Transition tr = peek(dfa, rt, s);
  if (tr.event != TransitionEvent::Unknown) {
    rt.current = tr.next_state;
    rt.t_last = t;
  }
  return tr.event;
}

namespace {

// Dense-id replay used to score candidates without hashing on every step.
class CandidateScorer {
 public:
  explicit CandidateScorer(const Trace& trace) {
    std::unordered_map<SymbolId, int> ids;
    dense_.reserve(trace.size());
    for (const auto& ev : trace.events) {
      auto [it, _] = ids.emplace(ev.symbol, static_cast<int>(ids.size()));
      dense_.push_back(it->second);
    }
    positions_.resize(ids.size());
  }

  // Normal count when replaying [first, last) against dense_[offset, offset + len).
  std::size_t normals(std::size_t offset, std::size_t len, std::size_t first, std::size_t last) {
    for (std::size_t k = 0; k < len; ++k) positions_[dense_[offset + k]].push_back(k);

    std::size_t state = len - 1;
    std::size_t count = 0;
    for (std::size_t j = first; j < last; ++j) {
      const int s = dense_[j];
      const std::size_t next = state + 1 == len ? 0 : state + 1;
      if (dense_[offset + next] == s) {
        state = next;
        ++count;
      } else if (dense_[offset + state] != s && !positions_[s].empty()) {
        state = forward_position(positions_[s], state);
      }
    }

    for (std::size_t k = 0; k < len; ++k) positions_[dense_[offset + k]].clear();
    return count;
  }

 private:
  std::vector<int> dense_;
  std::vector<std::vector<std::size_t>> positions_;
};

}  // namespace

PatternFit learn_pattern(const Trace& trace, std::size_t max_len, std::size_t validation_multiplier) {
  if (max_len == 0) throw std::invalid_argument("max_len must be positive");
  if (trace.size() < max_len * (validation_multiplier + 1)) {
    throw std::invalid_argument("trace too short: need " +
                                std::to_string(max_len * (validation_multiplier + 1)) + " events, have " +
                                std::to_string(trace.size()));
  }

  const std::size_t window = validation_multiplier * max_len;
  CandidateScorer scorer(trace);

  double best_score = -1.0;
  std::size_t best_len = 1;
  std::size_t best_offset = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (std::size_t offset = 0; offset < len; ++offset) {
      const std::size_t first = offset + len;
      const std::size_t last = std::min(trace.size(), first + window);
      if (first >= last) continue;
      const double score =
          static_cast<double>(scorer.normals(offset, len, first, last)) / static_cast<double>(last - first);
      if (score > best_score) {
        best_score = score;
        best_len = len;
        best_offset = offset;
      }
    }
  }

  std::vector<SymbolId> pattern;
  for (std::size_t k = 0; k < best_len; ++k) pattern.push_back(trace.events[best_offset + k].symbol);

  // Measure time-to-next-state over the validation replay.
  const PatternDfa shape(0, pattern, std::vector<double>(best_len, 0.0));
  DfaRuntime rt{best_len - 1, trace.events[best_offset + best_len - 1].time_ms};
  std::vector<double> sum(best_len, 0.0);
  std::vector<std::size_t> n(best_len, 0);
  double all_sum = 0.0;
  std::size_t all_n = 0;
  const std::size_t first = best_offset + best_len;
  const std::size_t last = std::min(trace.size(), first + window);
  for (std::size_t j = first; j < last; ++j) {
    const auto& ev = trace.events[j];
    const std::size_t from = rt.current;
    const std::int64_t prev = rt.t_last;
    if (j > first) {
      all_sum += static_cast<double>(ev.time_ms - trace.events[j - 1].time_ms);
      ++all_n;
    }
    if (step(shape, rt, ev.symbol, ev.time_ms) == TransitionEvent::Normal) {
      sum[from] += static_cast<double>(ev.time_ms - prev);
      ++n[from];
    }
  }
  const double fallback = all_n ? all_sum / static_cast<double>(all_n) : 0.0;
  std::vector<double> tns(best_len);
  for (std::size_t i = 0; i < best_len; ++i) tns[i] = n[i] ? sum[i] / static_cast<double>(n[i]) : fallback;

  return {PatternDfa(0, std::move(pattern), std::move(tns)), best_score, best_offset};
}

}  // namespace icsdfa
