#include "icsdfa/traffic_gen.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace icsdfa {

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.threads.empty()) throw std::invalid_argument("scenario needs at least one thread");
  if (spec.duration_ms <= 0) throw std::invalid_argument("duration_ms must be positive");
  for (std::size_t k = 0; k < spec.threads.size(); ++k) {
    const auto& t = spec.threads[k];
    const auto name = "thread " + std::to_string(k) + ": ";
    if (t.pattern.empty()) throw std::invalid_argument(name + "empty pattern");
    if (t.jitter_ms < 0) throw std::invalid_argument(name + "negative jitter");
    // Consecutive bursts of one thread must never overlap.
    const auto len = static_cast<std::int64_t>(t.pattern.size());
    if (t.period_ms <= len + 2 * t.jitter_ms) {
      throw std::invalid_argument(name + "period_ms must exceed pattern length plus twice the jitter");
    }
  }
}

namespace {

struct Scheduled {
  std::int64_t time;
  std::uint64_t tie;
  int thread;
  int pos;
};

}  // namespace

Generated generate(const ScenarioSpec& spec) {
  validate_scenario(spec);
  std::mt19937_64 rng(spec.seed);

  std::vector<Scheduled> sched;
  for (std::size_t k = 0; k < spec.threads.size(); ++k) {
    const auto& th = spec.threads[k];
    const auto span = static_cast<std::uint64_t>(2 * th.jitter_ms + 1);
    for (std::int64_t n = 0; n * th.period_ms < spec.duration_ms; ++n) {
      const auto jitter = static_cast<std::int64_t>(rng() % span) - th.jitter_ms;
      const std::int64_t start = std::max<std::int64_t>(0, n * th.period_ms + jitter);
      for (std::size_t i = 0; i < th.pattern.size(); ++i) {
        sched.push_back({start + static_cast<std::int64_t>(i), 0, static_cast<int>(k), static_cast<int>(i)});
      }
    }
  }
  for (auto& s : sched) s.tie = rng();
  std::sort(sched.begin(), sched.end(), [](const Scheduled& a, const Scheduled& b) {
    return a.time != b.time ? a.time < b.time : a.tie < b.tie;
  });

  Generated out;
  out.trace.channel_id = "synthetic";
  out.trace.events.reserve(sched.size());
  out.truth.entries.reserve(sched.size());
  std::int64_t wire_free = 0;
  for (const auto& s : sched) {
    const std::int64_t t = std::max(s.time, wire_free);
    if (t != s.time) ++out.shifted;
    wire_free = t + 1;
    const auto& th = spec.threads[static_cast<std::size_t>(s.thread)];
    out.trace.events.push_back({t, th.pattern[static_cast<std::size_t>(s.pos)]});
    out.truth.entries.push_back({s.thread, s.pos, s.time});
  }
  return out;
}

namespace {

struct TableRow {
  int length;
  int unique;
  std::int64_t period;
};

// Length, unique-symbol count and period of every thread, per scenario.
const std::array<std::vector<TableRow>, kBuiltinCount>& table() {
  static const std::array<std::vector<TableRow>, kBuiltinCount> rows = {{
      {{6, 6, 300}, {4, 4, 950}},
      {{6, 6, 300}, {4, 4, 950}},
      {{6, 4, 300}, {4, 1, 400}},
      {{6, 4, 300}, {4, 2, 950}},
      {{10, 9, 300}, {4, 2, 600}, {4, 3, 200}},
      {{10, 7, 300}, {10, 7, 950}, {10, 7, 2000}},
      {{10, 8, 300}, {8, 7, 350}, {10, 9, 400}},
      {{10, 8, 300}, {8, 7, 850}, {10, 9, 1300}},
      {{10, 7, 300}, {8, 4, 350}, {10, 8, 400}},
      {{6, 3, 300}, {4, 2, 350}, {6, 2, 400}},
      {{10, 8, 250}, {4, 2, 650}, {6, 4, 1100}, {8, 7, 420}},
      {{6, 4, 250}, {4, 4, 350}, {10, 9, 550}, {8, 7, 420}},
      {{10, 9, 300}, {4, 2, 600}, {4, 2, 200}, {6, 3, 350}},
  }};
  return rows;
}

SymbolId unique_symbol(int scenario, int thread, int index) {
  return SymbolId{0x5C00'0000'0000'0000ull | (static_cast<std::uint64_t>(scenario) << 16) |
                  (static_cast<std::uint64_t>(thread + 1) << 8) | static_cast<std::uint64_t>(index)};
}

SymbolId shared_symbol(int scenario, int index) {
  return SymbolId{0x5C00'0000'0000'0000ull | (static_cast<std::uint64_t>(scenario) << 16) | 0xF000ull |
                  static_cast<std::uint64_t>(index)};
}

}  // namespace

ScenarioSpec builtin_scenario(int id, std::uint64_t seed, std::int64_t duration_ms, std::int64_t jitter_ms) {
  if (id < 1 || id > kBuiltinCount) {
    throw std::out_of_range("builtin scenario id must be in 1.." + std::to_string(kBuiltinCount));
  }
  const auto& rows = table()[static_cast<std::size_t>(id - 1)];

  // The shared pool is as large as the smallest non-zero shared quota, so every
  // pool symbol lands in every thread that has shared slots.
  int pool = 0;
  for (const auto& r : rows) {
    const int shared = r.length - r.unique;
    if (shared > 0 && (pool == 0 || shared < pool)) pool = shared;
  }

  ScenarioSpec spec;
  spec.duration_ms = duration_ms;
  spec.seed = seed;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const int shared = r.length - r.unique;
    std::vector<SymbolId> pattern(static_cast<std::size_t>(r.length));
    std::vector<bool> is_shared(pattern.size(), false);
    // Shared slots are spread evenly, starting at position 1.
    for (int j = 0; j < shared; ++j) {
      const auto p = static_cast<std::size_t>((j * r.length / shared + 1) % r.length);
      is_shared[p] = true;
      pattern[p] = shared_symbol(id, j % pool);
    }
    int fresh = 0;
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      if (!is_shared[p]) pattern[p] = unique_symbol(id, static_cast<int>(k), fresh++);
    }
    spec.threads.push_back({std::move(pattern), r.period, jitter_ms});
  }
  return spec;
}

std::vector<ScenarioSpec> builtin_scenarios(std::uint64_t seed, std::int64_t duration_ms, std::int64_t jitter_ms) {
  std::vector<ScenarioSpec> out;
  for (int id = 1; id <= kBuiltinCount; ++id) out.push_back(builtin_scenario(id, seed, duration_ms, jitter_ms));
  return out;
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("scenario line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ScenarioSpec parse_scenario_text(std::string_view text) {
  ScenarioSpec spec;
  bool have_duration = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "pattern") {
      ThreadSpec th;
      th.jitter_ms = kDefaultJitterMs;
      std::size_t p = 0;
      while (p <= value.size()) {
        auto comma = value.find(',', p);
        if (comma == std::string_view::npos) comma = value.size();
        try {
          th.pattern.push_back(parse_symbol(trim(value.substr(p, comma - p))));
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": " + e.what());
        }
        p = comma + 1;
      }
      spec.threads.push_back(std::move(th));
    } else if (key == "period_ms" || key == "jitter_ms") {
      if (spec.threads.empty()) {
        throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": " + std::string(key) +
                                    " before any pattern=");
      }
      auto& th = spec.threads.back();
      (key == "period_ms" ? th.period_ms : th.jitter_ms) = parse_number<std::int64_t>(value, line_no);
    } else if (key == "duration_ms") {
      spec.duration_ms = parse_number<std::int64_t>(value, line_no);
      have_duration = true;
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(value, line_no);
    } else {
      throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": unknown key '" +
                                  std::string(key) + "'");
    }
  }
  if (!have_duration) throw std::invalid_argument("scenario is missing duration_ms");
  validate_scenario(spec);
  return spec;
}

ScenarioSpec parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string format_scenario(const ScenarioSpec& spec) {
  std::string out = "duration_ms=" + std::to_string(spec.duration_ms) + "\nseed=" + std::to_string(spec.seed) + '\n';
  for (const auto& th : spec.threads) {
    out += "\npattern=";
    for (std::size_t i = 0; i < th.pattern.size(); ++i) {
      if (i) out += ',';
      out += format_symbol(th.pattern[i]);
    }
    out += "\nperiod_ms=" + std::to_string(th.period_ms) + "\njitter_ms=" + std::to_string(th.jitter_ms) + '\n';
  }
  return out;
}

std::string format_ground_truth(const Trace& trace, const GroundTruth& truth) {
  if (trace.size() != truth.entries.size()) throw std::invalid_argument("ground truth does not match trace length");
  std::string out = "time_ms,symbol,thread,pos\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(trace.events[i].time_ms) + ',' + format_symbol(trace.events[i].symbol) + ',' +
           std::to_string(truth.entries[i].thread) + ',' + std::to_string(truth.entries[i].pos) + '\n';
  }
  return out;
}

void write_ground_truth(const Trace& trace, const GroundTruth& truth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write ground truth file: " + path.string());
  out << format_ground_truth(trace, truth);
}

}  // namespace icsdfa
