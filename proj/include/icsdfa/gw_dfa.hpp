#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "icsdfa/trace.hpp"

namespace icsdfa {

enum class TransitionEvent { Normal, Retransmission, Miss, Unknown };

char event_code(TransitionEvent e);
TransitionEvent parse_event_code(char c);

/// One cyclic pattern. State i "is at" pattern[i]; the Normal transition out of
/// state i expects pattern[(i + 1) % L] after roughly tns[i] milliseconds.
class PatternDfa {
 public:
  PatternDfa() = default;
  PatternDfa(int dfa_id, std::vector<SymbolId> pattern, std::vector<double> tns);

  int id() const { return id_; }
  const std::vector<SymbolId>& pattern() const { return pattern_; }
  const std::vector<double>& tns() const { return tns_; }
  std::size_t length() const { return pattern_.size(); }

  bool contains(SymbolId s) const { return index_.count(s) != 0; }
  /// Sorted state indices whose symbol is `s`.
  const std::vector<std::size_t>& positions(SymbolId s) const;

  double period() const;

  friend bool operator==(const PatternDfa& a, const PatternDfa& b) {
    return a.id_ == b.id_ && a.pattern_ == b.pattern_ && a.tns_ == b.tns_;
  }

 private:
  int id_ = 0;
  std::vector<SymbolId> pattern_;
  std::vector<double> tns_;
  std::unordered_map<SymbolId, std::vector<std::size_t>> index_;
};

/// Mutable cursor of one DFA during enforcement. The model itself stays
/// immutable and is passed alongside.
struct DfaRuntime {
  std::size_t current = 0;
  std::int64_t t_last = 0;

  friend bool operator==(const DfaRuntime&, const DfaRuntime&) = default;
};

struct Transition {
  TransitionEvent event;
  std::size_t next_state;
};

/// The transition `step` would take, without applying it.
Transition peek(const PatternDfa& dfa, const DfaRuntime& rt, SymbolId s);

/// Advance the runtime on one symbol. Unknown leaves the runtime untouched.
TransitionEvent step(const PatternDfa& dfa, DfaRuntime& rt, SymbolId s, std::int64_t t);

inline std::size_t model_size(const PatternDfa& dfa) { return dfa.length(); }

struct PatternFit {
  PatternDfa dfa;
  double score = 0.0;
  std::size_t offset = 0;
};

/// Naive single-pattern learner: every candidate window of length 1..max_len
/// starting at an offset below its length is replayed over the following
/// validation_multiplier * max_len symbols; the highest Normal fraction wins.
PatternFit learn_pattern(const Trace& trace, std::size_t max_len, std::size_t validation_multiplier = 4);

}  // namespace icsdfa
