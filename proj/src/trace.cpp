#include "icsdfa/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace icsdfa {

Trace Trace::slice(std::size_t first, std::size_t last) const {
  last = std::min(last, events.size());
  first = std::min(first, last);
  Trace out;
  out.channel_id = channel_id;
  out.events.assign(events.begin() + static_cast<std::ptrdiff_t>(first),
                    events.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

std::string format_symbol(SymbolId s) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out(16, '0');
  std::uint64_t v = s.value;
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

SymbolId parse_symbol(std::string_view text) {
  if (text.size() != 16) {
    throw std::invalid_argument("symbol must be 16 hex digits: '" + std::string(text) + "'");
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("symbol is not hexadecimal: '" + std::string(text) + "'");
  }
  return SymbolId{v};
}

namespace {

SymbolEvent parse_event_line(std::string_view line, std::size_t line_no) {
  const auto comma = line.find(',');
  if (comma == std::string_view::npos) {
    throw TraceError("malformed line " + std::to_string(line_no) + ": expected 'time_ms,symbol'",
                     line_no);
  }
  const auto time_text = line.substr(0, comma);
  const auto sym_text = line.substr(comma + 1);

  SymbolEvent ev;
  auto [ptr, ec] = std::from_chars(time_text.data(), time_text.data() + time_text.size(), ev.time_ms);
  if (time_text.empty() || ec != std::errc{} || ptr != time_text.data() + time_text.size() ||
      time_text.front() == '-' || time_text.front() == '+') {
    throw TraceError("malformed time at line " + std::to_string(line_no), line_no);
  }
  try {
    ev.symbol = parse_symbol(sym_text);
  } catch (const std::invalid_argument& e) {
    throw TraceError("malformed symbol at line " + std::to_string(line_no) + ": " + e.what(),
                     line_no);
  }
  return ev;
}

}  // namespace

Trace parse_trace_text(std::string_view text, std::string channel_id) {
  if (text.empty()) throw TraceError("empty trace file");

  Trace trace;
  trace.channel_id = std::move(channel_id);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    if (line_no == 1) {
      if (line != kTraceHeader) {
        throw TraceError("missing header 'time_ms,symbol' at line 1", 1);
      }
      continue;
    }
    // A single trailing newline leaves nothing to parse; blank lines elsewhere are errors.
    if (line.empty() && pos >= text.size()) break;

    SymbolEvent ev = parse_event_line(line, line_no);
    if (!trace.events.empty() && ev.time_ms < trace.events.back().time_ms) {
      throw TraceError("decreasing timestamp at line " + std::to_string(line_no), line_no);
    }
    trace.events.push_back(ev);
  }
  return trace;
}

Trace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceError("cannot open trace file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_text(buf.str(), path.stem().string());
}

std::string format_trace(const Trace& trace) {
  std::string out;
  out.reserve(16 + trace.events.size() * 26);
  out += kTraceHeader;
  out += '\n';
  for (const auto& ev : trace.events) {
    out += std::to_string(ev.time_ms);
    out += ',';
    out += format_symbol(ev.symbol);
    out += '\n';
  }
  return out;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  validate_trace(trace);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceError("cannot write trace file: " + path.string());
  const auto text = format_trace(trace);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw TraceError("write failed: " + path.string());
}

void validate_trace(const Trace& trace) {
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].time_ms < 0) {
      throw std::invalid_argument("negative timestamp at event " + std::to_string(i));
    }
    if (i > 0 && trace.events[i].time_ms < trace.events[i - 1].time_ms) {
      throw std::invalid_argument("decreasing timestamp at event " + std::to_string(i));
    }
  }
}

}  // namespace icsdfa
