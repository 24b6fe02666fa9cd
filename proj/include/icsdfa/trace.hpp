#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icsdfa {

/// 64-bit hashed message symbol. Ordering exists only for deterministic
/// iteration and tie-breaking.
struct SymbolId {
  std::uint64_t value = 0;

  friend constexpr bool operator==(SymbolId, SymbolId) = default;
  friend constexpr auto operator<=>(SymbolId, SymbolId) = default;
};

struct SymbolEvent {
  std::int64_t time_ms = 0;
  SymbolId symbol;

  friend bool operator==(const SymbolEvent&, const SymbolEvent&) = default;
};

struct Trace {
  std::vector<SymbolEvent> events;
  std::string channel_id;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  /// Copy of events [first, last) clamped to the trace bounds.
  Trace slice(std::size_t first, std::size_t last) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Parse or I/O failure. `line()` is 0 when the error is not tied to a line.
class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// 16 uppercase hex digits.
std::string format_symbol(SymbolId s);

/// Accepts exactly 16 hex digits (either case). Throws std::invalid_argument.
SymbolId parse_symbol(std::string_view text);

inline constexpr std::string_view kTraceHeader = "time_ms,symbol";

Trace parse_trace(const std::filesystem::path& path);
Trace parse_trace_text(std::string_view text, std::string channel_id = {});

void write_trace(const Trace& trace, const std::filesystem::path& path);
std::string format_trace(const Trace& trace);

/// Throws std::invalid_argument if timestamps are negative or decreasing.
void validate_trace(const Trace& trace);

}  // namespace icsdfa

template <>
struct std::hash<icsdfa::SymbolId> {
  std::size_t operator()(icsdfa::SymbolId s) const noexcept {
    return std::hash<std::uint64_t>{}(s.value);
  }
};
