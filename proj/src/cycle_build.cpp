#include "icsdfa/cycle_build.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace icsdfa {

std::map<SymbolId, int> CycleSubgraph::in_degrees() const {
  std::map<SymbolId, int> d;
  for (const auto& [v, _] : vertices) d[v] = 0;
  for (const auto& e : edges) ++d[e.to];
  return d;
}

std::map<SymbolId, int> CycleSubgraph::out_degrees() const {
  std::map<SymbolId, int> d;
  for (const auto& [v, _] : vertices) d[v] = 0;
  for (const auto& e : edges) ++d[e.from];
  return d;
}

bool CycleSubgraph::balanced() const {
  return in_degrees() == out_degrees();
}

CycleSubgraph build_subgraph(const Dtmc& dtmc, const SymbolSet& set) {
  CycleSubgraph g;
  g.set_id = set.id;
  g.vertices = set.members;
  for (const auto& [e, info] : dtmc.edges()) {
    if (set.members.count(e.first) && set.members.count(e.second)) {
      g.edges.push_back({e.first, e.second, info.count, false});
    }
  }
  return g;
}

CycleSubgraph drop_redundant_edges(const CycleSubgraph& g, double t_med) {
  if (g.edges.empty()) throw std::invalid_argument("drop_redundant_edges on a graph without edges");

  std::vector<double> counts;
  counts.reserve(g.edges.size());
  for (const auto& e : g.edges) counts.push_back(static_cast<double>(e.count));
  std::sort(counts.begin(), counts.end());
  const std::size_t n = counts.size();
  const double median = n % 2 ? counts[n / 2] : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);

  const double lo = median * (1.0 - t_med);
  const double hi = median * (1.0 + t_med);
  CycleSubgraph out = g;
  out.edges.clear();
  for (const auto& e : g.edges) {
    const auto c = static_cast<double>(e.count);
    if (c >= lo && c <= hi) out.edges.push_back(e);
  }
  return out;
}

CycleSubgraph add_missed_edges(const CycleSubgraph& g, const EdgeHint& hint) {
  CycleSubgraph out = g;
  std::uint64_t weight = std::numeric_limits<std::uint64_t>::max();
  for (const auto& e : g.edges) weight = std::min(weight, e.count);
  if (g.edges.empty()) weight = 1;

  for (std::size_t added = 0; added < g.vertices.size(); ++added) {
    const auto in = out.in_degrees();
    const auto outd = out.out_degrees();
    std::vector<SymbolId> lacks_out;  // in-degree exceeds out-degree
    std::vector<SymbolId> lacks_in;   // out-degree exceeds in-degree
    for (const auto& [v, _] : out.vertices) {
      if (in.at(v) > outd.at(v)) lacks_out.push_back(v);
      if (outd.at(v) > in.at(v)) lacks_in.push_back(v);
    }
    if (lacks_out.empty() || lacks_in.empty()) break;

    SymbolId from = lacks_out.front();
    SymbolId to = lacks_in.front();
    if (hint) {
      double best = -std::numeric_limits<double>::infinity();
      for (SymbolId a : lacks_out) {
        for (SymbolId b : lacks_in) {
          const double s = hint(a, b);
          if (s > best) {
            best = s;
            from = a;
            to = b;
          }
        }
      }
    }
    out.edges.push_back({from, to, weight, true});
  }
  return out;
}

EulerCycle canonical_rotation(const EulerCycle& cycle) {
  if (cycle.empty()) return cycle;
  EulerCycle best = cycle;
  EulerCycle rot = cycle;
  for (std::size_t k = 1; k < cycle.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

namespace {

bool edges_connected(const CycleSubgraph& g) {
  if (g.edges.empty()) return false;
  std::map<SymbolId, std::vector<SymbolId>> und;
  for (const auto& e : g.edges) {
    und[e.from].push_back(e.to);
    und[e.to].push_back(e.from);
  }
  std::set<SymbolId> seen{g.edges.front().from};
  std::vector<SymbolId> stack{g.edges.front().from};
  while (!stack.empty()) {
    SymbolId v = stack.back();
    stack.pop_back();
    for (SymbolId u : und[v]) {
      if (seen.insert(u).second) stack.push_back(u);
    }
  }
  return seen.size() == und.size();
}

// One Hierholzer run. `adj` lists outgoing edge indices per vertex in the
// order they are consumed.
EulerCycle hierholzer(const CycleSubgraph& g, const std::map<SymbolId, std::vector<std::size_t>>& adj,
                      SymbolId start) {
  std::map<SymbolId, std::size_t> next;
  std::vector<SymbolId> stack{start};
  std::vector<SymbolId> circuit;
  while (!stack.empty()) {
    SymbolId v = stack.back();
    auto it = adj.find(v);
    std::size_t& k = next[v];
    if (it != adj.end() && k < it->second.size()) {
      stack.push_back(g.edges[it->second[k++]].to);
    } else {
      circuit.push_back(v);
      stack.pop_back();
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  circuit.pop_back();  // closing vertex repeats the start
  return circuit;
}

}  // namespace

std::vector<EulerCycle> euler_cycles(const CycleSubgraph& g, std::size_t max_alternatives) {
  if (max_alternatives == 0 || !g.balanced() || !edges_connected(g)) return {};

  std::map<SymbolId, std::vector<std::size_t>> base;
  for (std::size_t i = 0; i < g.edges.size(); ++i) base[g.edges[i].from].push_back(i);
  for (auto& [v, list] : base) {
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return g.edges[a].to < g.edges[b].to;
    });
  }

  std::vector<SymbolId> branching;
  for (const auto& [v, list] : base) {
    if (list.size() > 1) branching.push_back(v);
  }

  // Variants rotate the adjacency lists of branching vertices (mixed radix).
  constexpr std::size_t kMaxVariants = 64;
  std::size_t variants = 1;
  for (SymbolId v : branching) {
    variants = std::min(kMaxVariants, variants * base[v].size());
  }

  std::vector<EulerCycle> out;
  std::set<EulerCycle> seen;
  for (const auto& [start, _] : base) {
    for (std::size_t var = 0; var < variants; ++var) {
      auto adj = base;
      std::size_t code = var;
      for (SymbolId v : branching) {
        auto& list = adj[v];
        const std::size_t r = code % list.size();
        code /= list.size();
        std::rotate(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(r), list.end());
      }
      auto cycle = canonical_rotation(hierholzer(g, adj, start));
      if (cycle.size() != g.edges.size()) continue;
      if (seen.insert(cycle).second) {
        out.push_back(std::move(cycle));
        if (out.size() >= max_alternatives) return out;
      }
    }
  }
  return out;
}

namespace {

// Minimum-cost perfect assignment (Hungarian method, O(n^3)). Returns the
// column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

}  // namespace

EulerCycle max_weight_cycle(const SymbolSet& set, const EdgeHint& weight) {
  std::vector<SymbolId> nodes;
  for (const auto& [s, k] : set.members) {
    for (int i = 0; i < k; ++i) nodes.push_back(s);
  }
  const std::size_t n = nodes.size();
  if (n <= 1) return nodes;

  // A node may not succeed itself; copies of one symbol may follow each other.
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  double big = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) w[i][j] = weight ? weight(nodes[i], nodes[j]) : 0.0;
      big = std::max(big, std::abs(w[i][j]));
    }
  }
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = i == j ? big * static_cast<double>(n + 1) * 4.0 : -w[i][j];
  }
  std::vector<std::size_t> next = min_cost_assignment(cost);

  auto cycle_ids = [&] {
    std::vector<int> id(n, -1);
    int c = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (id[s] >= 0) continue;
      for (std::size_t v = s; id[v] < 0; v = next[v]) id[v] = c;
      ++c;
    }
    return std::pair{id, c};
  };

  // Merge sub-cycles by exchanging successors of one node from each.
  for (auto [id, count] = cycle_ids(); count > 1; std::tie(id, count) = cycle_ids()) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (id[a] == id[b]) continue;
        const double gain = w[a][next[b]] + w[b][next[a]] - w[a][next[a]] - w[b][next[b]];
        if (gain > best) {
          best = gain;
          ba = a;
          bb = b;
        }
      }
    }
    std::swap(next[ba], next[bb]);
  }

  EulerCycle out;
  std::size_t v = 0;
  do {
    out.push_back(nodes[v]);
    v = next[v];
  } while (v != 0);
  return canonical_rotation(out);
}

SymbolSet estimate_instances(const SymbolSet& set, const std::set<SymbolId>& anchors, const EdgeHint& count) {
  SymbolSet out = set;
  if (!count || set.freq <= 0.0) return out;
  for (auto& [v, k] : out.members) {
    if (anchors.count(v)) continue;
    double in = 0.0, outgoing = 0.0;
    for (const auto& [u, _] : set.members) {
      if (u == v || !anchors.count(u)) continue;
      in += count(u, v);
      outgoing += count(v, u);
    }
    const double seen = std::max(in, outgoing);
    if (seen <= 0.0) continue;
    k = std::max(1, static_cast<int>(std::lround(seen / set.freq)));
  }
  return out;
}

}  // namespace icsdfa
