#include "icsdfa/cycle_split.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace icsdfa {

int SymbolSet::instance_count() const {
  int n = 0;
  for (const auto& [_, k] : members) n += k;
  return n;
}

bool freq_similar(double a, double b, double t_sim) {
  return a * (1.0 - t_sim) < b && b < a * (1.0 + t_sim);
}

namespace {

// Mutable state of one splitting run. Residuals start at freq(v) and every
// membership deducts the joined set's frequency.
struct SplitState {
  std::vector<SymbolSet> sets;
  std::map<SymbolId, double> residual;
  std::array<std::size_t, 7> sets_after_step{};
};

class Splitter {
 public:
  Splitter(const Dtmc& g, const SplitOptions& opts) : g_(g), opts_(opts) {}

  std::vector<Partition> run() {
    SplitState st;
    for (const auto& [s, info] : g_.nodes()) st.residual[s] = static_cast<double>(info.freq);

    step1(st);
    st.sets_after_step[0] = st.sets.size();
    step2(st);
    st.sets_after_step[1] = st.sets.size();
    step3(st);
    st.sets_after_step[2] = st.sets.size();

    std::vector<SplitState> forks = step4(std::move(st));

    std::vector<Partition> out;
    for (auto& f : forks) {
      f.sets_after_step[3] = f.sets.size();
      step5(f);
      f.sets_after_step[4] = f.sets.size();
      const auto leftover = step6(f);
      f.sets_after_step[5] = f.sets.size();
      step7(f, leftover);
      f.sets_after_step[6] = f.sets.size();
      out.push_back(finish(f));
    }
    return out;
  }

 private:
  double freq(SymbolId v) const { return static_cast<double>(g_.node(v).freq); }

  bool is_zero(const SplitState& st, SymbolId v) const {
    return st.residual.at(v) < opts_.t_sim * freq(v);
  }

  bool unit_degree(SymbolId v) const { return g_.in_degree(v) == 1 && g_.out_degree(v) == 1; }

  std::vector<SymbolId> remaining(const SplitState& st) const {
    std::vector<SymbolId> out;
    for (const auto& [v, _] : g_.nodes()) {
      if (!is_zero(st, v)) out.push_back(v);
    }
    return out;
  }

  // Closest frequency-similar set; ties go to the lowest id.
  std::optional<std::size_t> similar_set(const SplitState& st, double f) const {
    std::optional<std::size_t> best;
    double best_diff = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.sets.size(); ++i) {
      if (!freq_similar(st.sets[i].freq, f, opts_.t_sim)) continue;
      const double d = std::abs(st.sets[i].freq - f);
      if (d < best_diff) {
        best_diff = d;
        best = i;
      }
    }
    return best;
  }

  static void join(SplitState& st, std::size_t set_index, SymbolId v) {
    auto& s = st.sets[set_index];
    ++s.members[v];
    st.residual[v] -= s.freq;
  }

  // Index of the only set containing `v`, if exactly one does.
  static std::optional<std::size_t> sole_set(const SplitState& st, SymbolId v) {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < st.sets.size(); ++i) {
      if (st.sets[i].members.count(v) == 0) continue;
      if (found) return std::nullopt;
      found = i;
    }
    return found;
  }

  static bool member_of(const SplitState& st, std::size_t set_index, SymbolId v) {
    return st.sets[set_index].members.count(v) != 0;
  }

  void step1(SplitState& st) const {
    for (const auto& [v, info] : g_.nodes()) {
      if (!unit_degree(v)) continue;
      if (auto idx = similar_set(st, freq(v))) {
        join(st, *idx, v);
      } else {
        SymbolSet s;
        s.id = static_cast<int>(st.sets.size());
        s.freq = freq(v);
        st.sets.push_back(std::move(s));
        join(st, st.sets.size() - 1, v);
      }
    }
  }

  void step2(SplitState& st) const {
    for (SymbolId v : remaining(st)) {
      if (g_.in_degree(v) != 1 && g_.out_degree(v) != 1) continue;
      if (auto idx = similar_set(st, st.residual.at(v))) join(st, *idx, v);
    }
  }

  // Set indices of the neighbours that each belong to exactly one set, or
  // nullopt when any neighbour is unclassified or shared.
  std::vector<std::size_t> sole_sets_of(const SplitState& st, const std::vector<SymbolId>& nbrs,
                                        SymbolId self) const {
    std::vector<std::size_t> out;
    for (SymbolId u : nbrs) {
      if (u == self) continue;
      if (auto idx = sole_set(st, u)) out.push_back(*idx);
    }
    return out;
  }

  bool try_sum_join(SplitState& st, SymbolId v, const std::vector<std::size_t>& sets) const {
    if (sets.empty()) return false;
    double sum = 0.0;
    for (auto i : sets) sum += st.sets[i].freq;
    if (!freq_similar(sum, st.residual.at(v), opts_.t_sim)) return false;
    for (auto i : sets) join(st, i, v);
    return true;
  }

  void step3(SplitState& st) const {
    for (SymbolId v : remaining(st)) {
      if (try_sum_join(st, v, sole_sets_of(st, g_.predecessors(v), v))) continue;
      try_sum_join(st, v, sole_sets_of(st, g_.successors(v), v));
    }
  }

  // Every distinct multiset of sets, drawn from single-set adjacent vertices,
  // whose frequencies sum to the residual of `v`.
  std::vector<std::vector<std::size_t>> feasible_subsets(const SplitState& st, SymbolId v) const {
    std::set<SymbolId> adj;
    for (SymbolId u : g_.predecessors(v)) adj.insert(u);
    for (SymbolId u : g_.successors(v)) adj.insert(u);
    adj.erase(v);

    std::vector<std::size_t> adj_sets;
    for (SymbolId u : adj) {
      if (auto idx = sole_set(st, u)) adj_sets.push_back(*idx);
    }
    if (adj_sets.empty() || adj_sets.size() > opts_.max_adjacent) return {};

    std::set<std::vector<std::size_t>> found;
    const double target = st.residual.at(v);
    const std::uint32_t n = static_cast<std::uint32_t>(adj_sets.size());
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> pick;
      double sum = 0.0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          pick.push_back(adj_sets[i]);
          sum += st.sets[adj_sets[i]].freq;
        }
      }
      if (!freq_similar(sum, target, opts_.t_sim)) continue;
      std::sort(pick.begin(), pick.end());
      found.insert(std::move(pick));
    }
    return {found.begin(), found.end()};
  }

  std::vector<SplitState> step4(SplitState st) const {
    std::vector<SplitState> forks;
    forks.push_back(std::move(st));
    for (SymbolId v : remaining(forks.front())) {
      std::vector<SplitState> next;
      for (auto& f : forks) {
        if (is_zero(f, v)) {
          next.push_back(std::move(f));
          continue;
        }
        auto subsets = feasible_subsets(f, v);
        if (subsets.empty()) {
          next.push_back(std::move(f));
          continue;
        }
        for (const auto& pick : subsets) {
          if (next.size() >= opts_.max_forks) break;
          SplitState child = f;
          for (auto i : pick) join(child, i, v);
          next.push_back(std::move(child));
        }
      }
      forks = std::move(next);
    }
    return forks;
  }

  void step5(SplitState& st) const {
    const auto rem = remaining(st);
    for (std::size_t j = 0; j < st.sets.size(); ++j) {
      for (SymbolId v : rem) {
        if (is_zero(st, v) || member_of(st, j, v)) continue;
        bool via = false;
        for (SymbolId in : g_.predecessors(v)) {
          if (in == v || !member_of(st, j, in)) continue;
          for (SymbolId out : g_.successors(v)) {
            if (out == v || !member_of(st, j, out)) continue;
            if (unit_degree(in) || unit_degree(out)) {
              via = true;
              break;
            }
          }
          if (via) break;
        }
        if (via) join(st, j, v);
      }
    }
  }

  std::optional<std::size_t> step6(SplitState& st) const {
    const auto rem = remaining(st);
    if (rem.empty()) return std::nullopt;
    double min_freq = std::numeric_limits<double>::infinity();
    for (SymbolId v : rem) min_freq = std::min(min_freq, st.residual.at(v));

    // Same join-or-found rule as Step 1.
    if (auto idx = similar_set(st, min_freq)) {
      for (SymbolId v : rem) join(st, *idx, v);
      return std::nullopt;
    }
    SymbolSet s;
    s.id = static_cast<int>(st.sets.size());
    s.freq = min_freq;
    s.leftover = true;
    st.sets.push_back(std::move(s));
    for (SymbolId v : rem) join(st, st.sets.size() - 1, v);
    return st.sets.size() - 1;
  }

  void step7(SplitState& st, std::optional<std::size_t> leftover) const {
    if (!leftover) return;
    std::vector<SymbolId> members;
    for (const auto& [v, _] : st.sets[*leftover].members) members.push_back(v);
    for (SymbolId v : members) {
      if (is_zero(st, v)) continue;
      if (auto idx = similar_set(st, st.residual.at(v))) join(st, *idx, v);
    }
  }

  Partition finish(const SplitState& st) const {
    Partition p;
    p.sets = st.sets;
    p.sets_after_step = st.sets_after_step;
    for (const auto& [v, r] : st.residual) {
      if (!is_zero(st, v)) p.unclassified.emplace_back(v, r);
    }
    return p;
  }

  const Dtmc& g_;
  SplitOptions opts_;
};

}  // namespace

std::vector<Partition> split_symbol_sets(const Dtmc& dtmc, const SplitOptions& opts) {
  if (dtmc.nodes().empty()) throw std::invalid_argument("split_symbol_sets on empty DTMC");
  return Splitter(dtmc, opts).run();
}

namespace {

int overlap(const SymbolSet& a, const SymbolSet& b) {
  int n = 0;
  for (const auto& [s, k] : a.members) {
    auto it = b.members.find(s);
    if (it != b.members.end()) n += std::min(k, it->second);
  }
  return n;
}

}  // namespace

double partition_accuracy(const Partition& found, const Partition& truth) {
  int total = 0;
  for (const auto& t : truth.sets) total += t.instance_count();
  if (total == 0) return 1.0;

  const std::size_t nt = truth.sets.size();
  const std::size_t nf = found.sets.size();
  std::vector<std::vector<int>> w(nt, std::vector<int>(nf));
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nf; ++j) w[i][j] = overlap(truth.sets[i], found.sets[j]);

  int best = 0;
  if (nf <= 16) {
    // dp over (true sets processed, mask of used found sets)
    std::vector<int> dp(std::size_t{1} << nf, -1);
    dp[0] = 0;
    for (std::size_t i = 0; i < nt; ++i) {
      std::vector<int> next = dp;  // true set i left unmatched
      for (std::size_t mask = 0; mask < dp.size(); ++mask) {
        if (dp[mask] < 0) continue;
        for (std::size_t j = 0; j < nf; ++j) {
          if (mask & (std::size_t{1} << j)) continue;
          auto& slot = next[mask | (std::size_t{1} << j)];
          slot = std::max(slot, dp[mask] + w[i][j]);
        }
      }
      dp = std::move(next);
    }
    best = *std::max_element(dp.begin(), dp.end());
  } else {
    std::vector<bool> used(nf, false);
    for (std::size_t i = 0; i < nt; ++i) {
      int bw = 0;
      std::optional<std::size_t> bj;
      for (std::size_t j = 0; j < nf; ++j) {
        if (!used[j] && w[i][j] > bw) {
          bw = w[i][j];
          bj = j;
        }
      }
      if (bj) {
        used[*bj] = true;
        best += bw;
      }
    }
  }
  return static_cast<double>(best) / static_cast<double>(total);
}

std::string format_partition(const Partition& p) {
  std::string out = "set_id,freq,symbol,instances\n";
  char buf[64];
  for (const auto& s : p.sets) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.freq);
    (void)ec;
    const std::string f(buf, ptr);
    for (const auto& [sym, k] : s.members) {
      out += std::to_string(s.id) + ',' + f + ',' + format_symbol(sym) + ',' + std::to_string(k) + '\n';
    }
  }
  return out;
}

}  // namespace icsdfa
