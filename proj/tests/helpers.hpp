#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "icsdfa/trace.hpp"

namespace icsdfa::testing {

inline SymbolId sym(std::uint64_t v) { return SymbolId{v}; }

inline const SymbolId A = sym(0xA);
inline const SymbolId B = sym(0xB);
inline const SymbolId C = sym(0xC);
inline const SymbolId D = sym(0xD);
inline const SymbolId E = sym(0xE);

/// Events one millisecond apart starting at t0.
inline Trace trace_of(const std::vector<SymbolId>& symbols, std::int64_t t0 = 0) {
  Trace t;
  for (std::size_t i = 0; i < symbols.size(); ++i) t.events.push_back({t0 + static_cast<std::int64_t>(i), symbols[i]});
  return t;
}

/// `reps` bursts of `pattern` at 1 ms per symbol, one burst every `period` ms.
inline Trace bursts(const std::vector<SymbolId>& pattern, std::int64_t period, int reps, std::int64_t t0 = 0) {
  Trace t;
  for (int n = 0; n < reps; ++n) {
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      t.events.push_back({t0 + n * period + static_cast<std::int64_t>(i), pattern[i]});
    }
  }
  return t;
}

}  // namespace icsdfa::testing
